"""Constructors and special-case verifiers for the example homogeneous
spaces: quotients by a central subalgebra, by the diagonal and the
constant-diagonal algebras of M(x)M2, unitary orbits of projections, and
orbits of partial isometries.

Each constructor wires the exact isotropy basis, the trace-orthogonal
supplement, and the projection bounds: K = 3 for central subalgebras, K = 1
where the best approximant coincides with the conditional expectation
(diagonal algebra, projection orbits), and inflated empirical estimates
where no closed bound is available.  C = 2 whenever the isotropy is the
unitary group of a subalgebra (the horizontal projection is 1 - E with E a
trace-preserving conditional expectation).

The ``*_checks`` functions exercise the kind-specific inequalities and
projection facts on random inputs
and report violation counts and worst margins without raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import core
from .core import TracialAlgebra
from .geometry import HomSpace
from .projection import (
    SkewSubspace,
    best_approximant,
    conditional_expectation,
    hermitian_best_approximant,
    standard_skew_basis,
)

__all__ = [
    "ModelSpec",
    "CheckResult",
    "ModelReport",
    "build_model_space",
    "validate_space",
    "center_q_checks",
    "diag_m2_checks",
    "special_diag_checks",
    "MODEL_KINDS",
]

MODEL_KINDS = (
    "center-quotient",
    "diag-m2",
    "special-diag-m2",
    "partial-isometry-orbit",
    "projection-orbit",
)

#: fixed stream for the empirical constant estimates (deterministic builds)
_CONSTANTS_SEED = 20260810


@dataclass
class ModelSpec:
    """Parameters of a model space.

    ``blocks``: block dimensions of M (center-quotient) or the single inner
    dimension of M for the M(x)M2 presentations.  ``e`` / ``v0`` override
    the default projection or partial isometry.  ``p_list`` fixes the even
    exponents for which projection bounds are certified at build time.
    """

    kind: str
    blocks: tuple = (2,)
    weights: tuple | None = None
    e: np.ndarray | None = None
    v0: np.ndarray | None = None
    p_list: tuple = (2, 4)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}")
        self.blocks = tuple(int(b) for b in self.blocks)
        self.p_list = tuple(core._check_even_p(p) for p in self.p_list)
        if self.e is not None:
            self.e = np.asarray(self.e, dtype=complex)
            if core.operator_norm(self.e @ self.e - self.e) > 1e-10 or not core.is_hermitian(self.e):
                raise ValueError("e must be an orthogonal projection (e = e* = e^2)")
        if self.v0 is not None:
            self.v0 = np.asarray(self.v0, dtype=complex)
            p0 = self.v0.conj().T @ self.v0
            if core.operator_norm(p0 @ p0 - p0) > 1e-10:
                raise ValueError("v0 must be a partial isometry (v0* v0 a projection)")


def _corner_skew_basis(alg: TracialAlgebra, frame: np.ndarray) -> list:
    """Skew basis of the corner algebra spanned by the given orthonormal columns."""
    r = frame.shape[1]
    out = []
    for j in range(r):
        out.append(1j * np.outer(frame[:, j], frame[:, j].conj()))
    for j in range(r):
        for k in range(j + 1, r):
            ejk = np.outer(frame[:, j], frame[:, k].conj())
            out.append(ejk - ejk.conj().T)
            out.append(1j * (ejk + ejk.conj().T))
    return out


def _estimate_c(space_iso: SkewSubspace, alg: TracialAlgebra, samples: int = 2000) -> float:
    """Empirical lower bound of ||1 - P_G|| on unit vectors, inflated x1.5."""
    rng = np.random.default_rng(_CONSTANTS_SEED)
    worst = 0.0
    for _ in range(samples):
        z = core.random_skew(alg, rng)
        nz = core.operator_norm(z)
        if nz < 1e-12:
            continue
        z = z / nz
        worst = max(worst, core.operator_norm(z - space_iso.project(z)))
    return 1.5 * worst


def _estimate_k(space_iso: SkewSubspace, alg: TracialAlgebra, p: int, samples: int = 400) -> float:
    """Empirical lower bound of sup ||Q_p(z)|| / ||z||, inflated x1.5."""
    rng = np.random.default_rng(_CONSTANTS_SEED + p)
    worst = 0.0
    for _ in range(samples):
        z = core.random_skew(alg, rng)
        nz = core.operator_norm(z)
        if nz < 1e-12:
            continue
        q = best_approximant(z / nz, space_iso, p, tol=1e-9).projection
        worst = max(worst, core.operator_norm(q))
    return 1.5 * max(worst, 1e-6)


def build_model_space(spec: ModelSpec) -> HomSpace:
    """Wire a HomSpace for the requested model kind.

    Isotropy bases are exact per kind; the supplement is the trace
    orthogonal complement; every shipped isotropy group is exponential
    (a unitary group of a subalgebra or of a corner).
    """
    if spec.kind == "center-quotient":
        alg = TracialAlgebra.direct_sum(spec.blocks, spec.weights)
        basis = []
        n = alg.dim
        for sl, d in zip(alg.block_slices(), alg.block_dims):
            b = np.zeros((n, n), dtype=complex)
            b[sl, sl] = 1j * np.eye(d)
            basis.append(b)
        iso = SkewSubspace(alg, basis, kind="center-blocks")
        return _assemble(alg, "coset", alg.identity(), iso, spec, c_exact=2.0, k_exact=3.0,
                         model_kind=spec.kind)

    if spec.kind == "diag-m2":
        m = spec.blocks[0]
        alg = TracialAlgebra.tensor_square(m)
        inner = TracialAlgebra.full(m)
        basis = []
        for b in standard_skew_basis(inner):
            for corner in (0, 1):
                big = np.zeros((2 * m, 2 * m), dtype=complex)
                big[corner * m : (corner + 1) * m, corner * m : (corner + 1) * m] = b
                basis.append(big)
        iso = SkewSubspace(alg, basis, kind="diag-m2")
        return _assemble(alg, "coset", alg.identity(), iso, spec, c_exact=2.0, k_exact=1.0,
                         model_kind=spec.kind)

    if spec.kind == "special-diag-m2":
        m = spec.blocks[0]
        alg = TracialAlgebra.tensor_square(m)
        inner = TracialAlgebra.full(m)
        basis = []
        for b in standard_skew_basis(inner):
            big = np.zeros((2 * m, 2 * m), dtype=complex)
            big[:m, :m] = b
            big[m:, m:] = b
            basis.append(big)
        iso = SkewSubspace(alg, basis, kind="special-diag-m2")
        return _assemble(alg, "coset", alg.identity(), iso, spec, c_exact=2.0, k_exact=None,
                         model_kind=spec.kind)

    if spec.kind == "projection-orbit":
        if spec.e is not None:
            n = spec.e.shape[0]
            alg = TracialAlgebra.full(n) if not (n % 2 == 0) else TracialAlgebra.tensor_square(n // 2)
            e = spec.e
        else:
            m = spec.blocks[0]
            alg = TracialAlgebra.tensor_square(m)
            e = np.zeros((2 * m, 2 * m), dtype=complex)
            e[:m, :m] = np.eye(m)
        lam, vecs = np.linalg.eigh(e)
        ones = vecs[:, lam > 0.5]
        zeros = vecs[:, lam <= 0.5]
        basis = _corner_skew_basis(alg, ones) + _corner_skew_basis(alg, zeros)
        iso = SkewSubspace(alg, basis, kind="commutant-of-projection", aux=e)
        return _assemble(alg, "conjugation", e, iso, spec, c_exact=2.0, k_exact=1.0,
                         model_kind=spec.kind)

    if spec.kind == "partial-isometry-orbit":
        if spec.v0 is not None:
            v0 = spec.v0
            n = v0.shape[0]
        else:
            n = spec.blocks[0]
            if n < 2:
                raise ValueError("partial-isometry-orbit needs ambient dimension >= 2")
            v0 = np.zeros((n, n), dtype=complex)
            for j in range(n - 1):
                v0[j + 1, j] = 1.0
        alg = TracialAlgebra.full(n)
        q = v0 @ v0.conj().T
        lam, vecs = np.linalg.eigh(q)
        kernel = vecs[:, lam <= 0.5]
        if kernel.shape[1] == 0:
            raise ValueError("v0 must have co-rank >= 1 so the isotropy is nontrivial")
        basis = _corner_skew_basis(alg, kernel)
        iso = SkewSubspace(alg, basis, kind="annihilator-of-partial-isometry", aux=v0)
        return _assemble(alg, "partial-isometry", v0, iso, spec, c_exact=None, k_exact=None,
                         model_kind=spec.kind)

    raise ValueError(f"unknown model kind {spec.kind!r}")


def _assemble(alg, action_kind, basepoint, iso, spec, c_exact, k_exact, model_kind) -> HomSpace:
    from .projection import orthonormal_basis

    iso = orthonormal_basis(iso)
    supplement = iso.complement()
    c = c_exact if c_exact is not None else _estimate_c(iso, alg)
    k = {}
    for p in spec.p_list:
        k[p] = k_exact if k_exact is not None else _estimate_k(iso, alg, p)
    space = HomSpace(alg, action_kind, basepoint, iso, supplement, c, k, True, model_kind)
    _structural_checks(space)
    return space


def _structural_checks(space: HomSpace, tol: float = 1e-9):
    alg = space.ambient
    n_skew = sum(d * d for d in alg.block_dims)
    if space.isotropy.dim + space.supplement.dim != n_skew:
        raise ValueError("isotropy and supplement do not decompose the skew part")
    if not space.isotropy.lie_closed(tol=1e-8):
        raise ValueError("isotropy subspace is not a Lie algebra")
    rng = np.random.default_rng(_CONSTANTS_SEED + 1)
    for _ in range(8):
        c = rng.standard_normal(space.isotropy.dim)
        y = space.isotropy.combine(0.5 * c / max(np.linalg.norm(c), 1e-12))
        g = core.unitary_exp(y)
        if space.isotropy_defect(g) > tol:
            raise ValueError("isotropy algebra does not fix the basepoint")


def validate_space(space: HomSpace, trials: int = 50, seed: int = 0) -> dict:
    """Sampled invariants of a built space.

    Checks that c_O dominates both the sampled operator-norm ratio of the
    horizontal projection and the sampled quotient ratio
    ||P_F(z)|| / inf_y ||z - y|| (the infimum replaced by its pattern-search
    upper bound, the conservative side), and returns the norm-equivalence
    constants c_p ||z|| <= ||z||_p <= ||z|| on the isotropy algebra.
    """
    from .projection import quotient_norm

    _structural_checks(space)
    alg = space.ambient
    rng = np.random.default_rng(seed)
    worst_c_ratio = 0.0
    c_p = {p: 1.0 for p in space.k_O_p}
    for k in range(trials):
        z = core.random_skew(alg, rng)
        nz = core.operator_norm(z)
        if nz < 1e-12:
            continue
        horiz = core.operator_norm(space.horizontal_project(z))
        worst_c_ratio = max(worst_c_ratio, horiz / nz)
        if k < 10:
            qn = quotient_norm(z, space.isotropy, np.inf)
            if qn > 1e-12:
                worst_c_ratio = max(worst_c_ratio, horiz / qn)
        y = space.isotropy.project(z)
        ny = core.operator_norm(y)
        if ny > 1e-12:
            for p in c_p:
                c_p[p] = min(c_p[p], core.p_norm(y, p, alg) / ny)
    if worst_c_ratio > space.c_O + 1e-9:
        raise ValueError("sampled horizontal projection exceeds the recorded c_O")
    if any(v <= 0 for v in c_p.values()):
        raise ValueError("norm equivalence constant on the isotropy algebra degenerated")
    return {"c_ratio": worst_c_ratio, "c_p": c_p}


# ---------------------------------------------------------------------------
# kind-specific reports
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    trials: int
    violations: int
    worst_margin: float


@dataclass
class ModelReport:
    kind: str
    p: int
    checks: list = field(default_factory=list)
    ratios: dict = field(default_factory=dict)

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks)

    def add(self, name, trials, violations, worst):
        self.checks.append(CheckResult(name, trials, violations, worst))


def _random_positive(alg, rng, scale=1.0):
    h = core.random_hermitian(alg, rng, scale)
    lo = float(np.min(core._block_eigvalsh(h, alg)))
    return h - min(lo - 0.05, 0.0) * alg.identity()


def center_q_checks(space: HomSpace, p: int, trials: int = 200, seed: int = 0, tol: float = 1e-8) -> ModelReport:
    """Central-subalgebra facts: Q preserves positivity, 0 <= Q(x) <= ||x||
    for x >= 0, ||Q(z)|| <= 3 ||z||, and the commuting Jordan inequality
    ||x - y+||_p <= ||x - y||_p."""
    if space.model_kind != "center-quotient":
        raise ValueError("center_q_checks applies to center-quotient spaces")
    p = core._check_even_p(p)
    alg = space.ambient
    rng = np.random.default_rng(seed)
    rep = ModelReport(space.model_kind, p)
    pos_bad = bound_bad = three_bad = jordan_bad = 0
    w_pos, w_bound, w_three, w_jordan = math.inf, math.inf, math.inf, math.inf
    for _ in range(trials):
        x = _random_positive(alg, rng)
        qx = hermitian_best_approximant(x, space.isotropy, p, tol=1e-11).projection
        eigs = core._block_eigvalsh((qx + qx.conj().T) / 2, alg)
        m = float(np.min(eigs))
        w_pos = min(w_pos, m + tol)
        if m < -tol:
            pos_bad += 1
        gap = core.operator_norm(x) + tol - float(np.max(eigs))
        w_bound = min(w_bound, gap)
        if gap < 0:
            bound_bad += 1

        z = core.random_skew(alg, rng)
        qz = best_approximant(z, space.isotropy, p, tol=1e-11).projection
        margin3 = 3.0 * core.operator_norm(z) + tol - core.operator_norm(qz)
        w_three = min(w_three, margin3)
        if margin3 < 0:
            three_bad += 1

        u = core.random_unitary(alg, rng)
        a = np.abs(rng.standard_normal(alg.dim))
        b = rng.standard_normal(alg.dim)
        x_c = u @ np.diag(a.astype(complex)) @ u.conj().T
        y_c = u @ np.diag(b.astype(complex)) @ u.conj().T
        y_plus = u @ np.diag(np.maximum(b, 0.0).astype(complex)) @ u.conj().T
        margin_j = core.p_norm(x_c - y_c, p, alg) + 1e-10 - core.p_norm(x_c - y_plus, p, alg)
        w_jordan = min(w_jordan, margin_j)
        if margin_j < 0:
            jordan_bad += 1
    one = alg.identity()
    q_one = hermitian_best_approximant(one, space.isotropy, p).projection
    unit_ok = core.operator_norm(q_one - one) <= 1e-8
    rep.add("positivity-preserved", trials, pos_bad, w_pos)
    rep.add("squeeze-0-to-norm", trials, bound_bad, w_bound)
    rep.add("uniform-bound-3", trials, three_bad, w_three)
    rep.add("jordan-inequality", trials, jordan_bad, w_jordan)
    rep.add("unit-fixed", 1, 0 if unit_ok else 1, 0.0)
    return rep


def diag_m2_checks(space: HomSpace, p: int, trials: int = 200, seed: int = 0, tol: float = 1e-8) -> ModelReport:
    """Diagonal-algebra facts: the best approximant is the diagonal block
    truncation, and removing the off-diagonal corner never increases the
    p-norm."""
    if space.model_kind not in ("diag-m2", "projection-orbit"):
        raise ValueError("diag_m2_checks applies to diag-m2 or projection-orbit spaces")
    p = core._check_even_p(p)
    alg = space.ambient
    rng = np.random.default_rng(seed)
    rep = ModelReport(space.model_kind, p)
    trunc_bad = off_bad = 0
    w_trunc, w_off = math.inf, math.inf
    for _ in range(trials):
        z = core.random_skew(alg, rng)
        q = best_approximant(z, space.isotropy, p, tol=1e-11).projection
        ez = conditional_expectation(z, space.isotropy)
        m_t = tol - core.p_norm(q - ez, p, alg)
        w_trunc = min(w_trunc, m_t)
        if m_t < 0:
            trunc_bad += 1

        h = core.random_hermitian(alg, rng)
        off = h - conditional_expectation(h, space.isotropy)
        m_o = core.p_norm(h, p, alg) + 1e-10 - core.p_norm(off, p, alg)
        w_off = min(w_off, m_o)
        if m_o < 0:
            off_bad += 1
    z_diag = conditional_expectation(core.random_skew(alg, rng), space.isotropy)
    r1 = best_approximant(z_diag, space.isotropy, p)
    fixed_ok = core.p_norm(r1.residual, p, alg) <= 1e-8
    z_off = core.random_skew(alg, rng)
    z_off = z_off - conditional_expectation(z_off, space.isotropy)
    r2 = best_approximant(z_off, space.isotropy, p)
    killed_ok = core.p_norm(r2.projection, p, alg) <= 1e-8
    rep.add("projection-is-truncation", trials, trunc_bad, w_trunc)
    rep.add("offdiagonal-contraction", trials, off_bad, w_off)
    rep.add("diagonal-fixed", 1, 0 if fixed_ok else 1, 0.0)
    rep.add("offdiagonal-annihilated", 1, 0 if killed_ok else 1, 0.0)
    return rep


def _embed_blocks(a, b, c, m):
    out = np.zeros((2 * m, 2 * m), dtype=complex)
    out[:m, :m] = a
    out[:m, m:] = b
    out[m:, :m] = b
    out[m:, m:] = c
    return out


def special_diag_checks(space: HomSpace, p: int, trials: int = 200, seed: int = 0, tol: float = 1e-10) -> ModelReport:
    """Constant-diagonal algebra facts: the centered-difference inequality
    under constant-diagonal shifts, contractivity of E on the symmetric and
    off-diagonal patterns, agreement of Q with E there, and recorded
    (not asserted) uniform ratios outside those patterns."""
    if space.model_kind != "special-diag-m2":
        raise ValueError("special_diag_checks applies to special-diag-m2 spaces")
    p = core._check_even_p(p)
    alg = space.ambient
    m = alg.inner_dim
    inner = TracialAlgebra.full(m)
    rng = np.random.default_rng(seed)
    rep = ModelReport(space.model_kind, p)
    ineq_bad = contract_bad = agree_bad = 0
    w_ineq, w_contract, w_agree = math.inf, math.inf, math.inf
    ratios = []
    for k in range(trials):
        a = core.random_hermitian(inner, rng)
        b = core.random_hermitian(inner, rng)
        c = core.random_hermitian(inner, rng)
        if k % 2:
            d = core.random_hermitian(inner, rng)
        else:
            d = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        lhs = core.p_norm(_embed_blocks((a - c) / 2, b, (c - a) / 2, m), p, alg)
        shifted = _embed_blocks(a, b, c, m)
        shifted[:m, :m] += d
        shifted[m:, m:] += d
        margin = core.p_norm(shifted, p, alg) + tol - lhs
        w_ineq = min(w_ineq, margin)
        if margin < 0:
            ineq_bad += 1

        sym = _embed_blocks(a, b, c, m)
        e_sym = conditional_expectation(sym, space.isotropy)
        m_c = core.p_norm(sym, p, alg) + tol - core.p_norm(e_sym, p, alg)
        w_contract = min(w_contract, m_c)
        if m_c < 0:
            contract_bad += 1

        q_sym = hermitian_best_approximant(sym, space.isotropy, p, tol=1e-11).projection
        g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        offd = np.zeros((2 * m, 2 * m), dtype=complex)
        offd[:m, m:] = g
        offd[m:, :m] = g.conj().T
        q_off = hermitian_best_approximant(offd, space.isotropy, p, tol=1e-11).projection
        m_a = 1e-8 - max(core.p_norm(q_sym - e_sym, p, alg), core.p_norm(q_off, p, alg))
        w_agree = min(w_agree, m_a)
        if m_a < 0:
            agree_bad += 1

        z = core.random_skew(alg, rng)
        nz = core.operator_norm(z)
        if nz > 1e-12:
            qz = best_approximant(z, space.isotropy, p, tol=1e-10).projection
            ratios.append(core.operator_norm(qz) / nz)
    rep.add("shifted-difference-inequality", trials, ineq_bad, w_ineq)
    rep.add("expectation-contractive-on-patterns", trials, contract_bad, w_contract)
    rep.add("projection-matches-expectation-on-patterns", trials, agree_bad, w_agree)
    rep.ratios = {
        "uniform_ratio_max": float(np.max(ratios)) if ratios else 0.0,
        "uniform_ratio_mean": float(np.mean(ratios)) if ratios else 0.0,
    }
    return rep
