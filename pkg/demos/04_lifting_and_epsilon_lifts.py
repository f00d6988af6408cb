"""The lifting ODE du u* = w inside the isotropy group, and almost
isometric lifts of orbit curves.
"""

import numpy as np

from ncgeo import core
from ncgeo.geometry import SampledCurve, epsilon_isometric_lift, lift_ode_solve, loop_deformed_exp_curve
from ncgeo.models import ModelSpec, build_model_space

sp = build_model_space(ModelSpec("diag-m2", blocks=(2,)))
rng = np.random.default_rng(4)

print("polygonal field in the isotropy algebra, solved with defect control:")
nodes = np.array([sp.isotropy.combine(0.4 * rng.standard_normal(sp.isotropy.dim)) for _ in range(9)])
w = SampledCurve(np.linspace(0, 1, 9), nodes, target="algebra")
lift = lift_ode_solve(w, sp)
print(f"  steps: {lift.u.n_intervals}, defect ||du u* - w|| = {lift.defect:.2e}, "
      f"tangent drift {lift.projection_drift:.2e}")
print("  u stays in the isotropy group:",
      max(sp.isotropy_defect(uk) for uk in lift.u.nodes[::32]))

print("\nalmost isometric lift of a wandering orbit curve:")
z = core.random_skew(sp.ambient, rng, 0.4)
xi = core.random_skew(sp.ambient, rng, 0.3)
gamma = loop_deformed_exp_curve(z, xi, 0.5, n_nodes=65)
for eps in (1e-2, 1e-3):
    res = epsilon_isometric_lift(gamma, sp, 4, eps)
    print(f"  eps = {eps}: quotient length {res.quotient_length_p:.8f}, "
          f"lift length {res.length_p:.8f}, excess {res.excess:.2e}, "
          f"uniform band {res.band_sup:.2e}")
print("  (the lift has the same orbit curve below it, with p-length within eps)")
