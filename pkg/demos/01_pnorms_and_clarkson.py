"""Trace p-norms on block algebras, and the Clarkson inequalities.

Builds the algebra M_2 (+) M_3 with trace weights (0.4, 0.6), evaluates a
few p-norms against hand computations, and samples both Clarkson regimes.
"""

import numpy as np

from ncgeo import core
from ncgeo.core import TracialAlgebra, p_norm, trace_tau

alg = TracialAlgebra.direct_sum((2, 3), (0.4, 0.6))
rng = np.random.default_rng(1)

print("tau(1) =", trace_tau(alg.identity(), alg).real)

x = np.zeros((5, 5), dtype=complex)
x[0, 0] = 1.0
print("tau of a rank-1 projection in the first block:", trace_tau(x, alg).real,
      "(weight/dim = 0.4/2 = 0.2)")

y = np.diag([1j * np.pi, 0.0]).astype(complex)
m2 = TracialAlgebra.full(2)
print("||diag(i pi, 0)||_4 =", p_norm(y, 4, m2), "= pi (1/2)^(1/4) =", np.pi * 0.5**0.25)

print("\nClarkson inequalities on 2000 random skew pairs:")
for p in (1.5, 4.0):
    q = p / (p - 1.0)
    worst = np.inf
    for _ in range(2000):
        a, b = core.random_skew(alg, rng), core.random_skew(alg, rng)
        na, nb = p_norm(a, p, alg), p_norm(b, p, alg)
        npl, nmi = p_norm(a + b, p, alg), p_norm(a - b, p, alg)
        lhs = (npl**q + nmi**q) ** (1 / q) if p <= 2 else (npl**p + nmi**p) ** (1 / p)
        rhs = 2.0 ** (1 / q) * (na**p + nb**p) ** (1 / p)
        worst = min(worst, rhs - lhs)
    regime = "1 < p <= 2" if p <= 2 else "2 <= p"
    print(f"  p = {p} ({regime}): worst slack {worst:.3e} (nonnegative = holds)")

print("\nUnitary invariance of the norms:")
u, v = core.random_unitary(alg, rng), core.random_unitary(alg, rng)
z = core.random_hermitian(alg, rng)
for p in (2, 4, np.inf):
    print(f"  | ||uzv||_{p} - ||z||_{p} | =", abs(p_norm(u @ z @ v, p, alg) - p_norm(z, p, alg)))
