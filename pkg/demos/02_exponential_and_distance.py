"""The unitary exponential, the principal logarithm, and the rectifiable
p-distance: round trips, the diameter, and the norm sandwich.
"""

import numpy as np

from ncgeo import core
from ncgeo.core import TracialAlgebra, operator_norm, p_norm, principal_log, unitary_exp
from ncgeo.geometry import curve_length_p, exp_curve, loop_deformed_exp_curve, unitary_distance

alg = TracialAlgebra.full(4)
rng = np.random.default_rng(2)

z = core.random_skew(alg, rng)
z *= 0.8 * np.pi / operator_norm(z)
u = unitary_exp(z)
print("||log(e^z) - z|| =", operator_norm(principal_log(u) - z), "(z inside the pi-ball)")

one = np.eye(4, dtype=complex)
print("d_p(1, -1) =", unitary_distance(one, -one, 4, alg), "= pi for every p")

print("\nthe sandwich sqrt(1 - pi^2/12) d_p <= ||u - v||_p <= d_p:")
lo = np.sqrt(1 - np.pi**2 / 12)
for _ in range(3):
    a, b = core.random_unitary(alg, rng), core.random_unitary(alg, rng)
    d = unitary_distance(a, b, 4, alg)
    gap = p_norm(a - b, 4, alg)
    print(f"  {lo * d:.6f} <= {gap:.6f} <= {d:.6f}")

print("\none-parameter curves are the shortest paths:")
curve = exp_curve(z, 65)
print("  L_4(e^{tz}) =", curve_length_p(curve, 4, alg), " ||z||_4 =", p_norm(z, 4, alg))
for amp in (0.2, 0.6):
    xi = core.random_skew(alg, rng)
    comp = loop_deformed_exp_curve(z, xi, amp, n_nodes=65)
    print(f"  perturbed competitor (amplitude {amp}): length {curve_length_p(comp, 4, alg):.6f}")

print("\nfolding an oversized Hermitian symbol shortens the curve it generates:")
h = core.random_hermitian(alg, rng)
h *= 1.8 * np.pi / operator_norm(h)
f = core.fold_symbol(h)
print("  ||h||_4 =", p_norm(h, 4, alg), " ||fold(h)||_4 =", p_norm(f, 4, alg))
print("  same endpoint:", operator_norm(unitary_exp(1j * f) - unitary_exp(1j * h)))
