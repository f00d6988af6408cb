"""Finite tracial matrix algebras and their spectral functional calculus.

A tracial algebra here is a block-diagonal complex matrix algebra

    M = M_{n_1} (+) ... (+) M_{n_k}

equipped with a normalized faithful trace

    tau(x) = sum_b w_b * tr(x_b) / n_b,    sum_b w_b = 1,  w_b > 0.

The induced p-norms ||x||_p = tau(|x|^p)^(1/p) make M a finite dimensional
noncommutative L^p space; p = inf denotes the operator norm.  On top of the
trace and the norms this module provides:

  * the unitary exponential and the principal logarithm of unitaries
    (eigen-angles in (-pi, pi], the angle pi assigned to eigenvalue -1),
  * analytic functions of the adjoint operator ad a = R_a - L_a evaluated
    through the eigenframe of a (symbols F(w) = (e^w - 1)/w and
    G(w) = (1 - e^{-w})/w together with their inverses),
  * the differential of the exponential map e^a F(ad a) b,
  * the spectral scale lambda_t and the generalized s-numbers mu_t as
    right-continuous step functions on (0, 1],
  * the 2pi-periodic sawtooth folding of Hermitian symbols, and
  * the degree-p bilinear form H_a(b, c) with its quadratic form.

Matrices are plain complex numpy arrays; every function is pure.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "TracialAlgebra",
    "SpectralDecomposition",
    "StepFunction",
    "is_hermitian",
    "is_skew_hermitian",
    "is_unitary",
    "in_algebra",
    "operator_norm",
    "trace_tau",
    "inner_tau",
    "p_norm",
    "random_hermitian",
    "random_skew",
    "random_unitary",
    "hermitian_eig",
    "unitary_eig",
    "unitary_exp",
    "principal_log",
    "AdAnalytic",
    "apply_analytic_ad",
    "exp_differential",
    "spectral_scale",
    "s_numbers",
    "fold_symbol",
    "h_form",
    "quadratic_form",
]

#: per-dimension tolerance used by the structural predicates
ENTRY_TOL = 1e-12

#: |angle + pi| below this snaps to the +pi side of the branch cut
_BRANCH_SNAP = 1e-10


# ---------------------------------------------------------------------------
# tracial algebras
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TracialAlgebra:
    """Block structure of M with a normalized trace.

    ``block_dims`` are the sizes of the diagonal blocks, ``trace_weights``
    the per-block weights w_b (positive, summing to one).  ``tensor_m2``
    marks a presentation of M(+)M as 2x2 block matrices over an inner
    algebra of dimension ``dim // 2``; the trace of that presentation is
    tau_hat(x) = (tau(x_11) + tau(x_22)) / 2, which coincides with the
    normalized trace of the full matrix algebra, so no extra data is needed.
    """

    block_dims: tuple[int, ...]
    trace_weights: tuple[float, ...]
    tensor_m2: bool = False

    def __post_init__(self):
        if len(self.block_dims) != len(self.trace_weights):
            raise ValueError("block_dims and trace_weights must have equal length")
        if any(d <= 0 for d in self.block_dims):
            raise ValueError("block dimensions must be positive")
        if any(w <= 0 for w in self.trace_weights):
            raise ValueError("trace weights must be positive")
        if abs(sum(self.trace_weights) - 1.0) > 1e-12:
            raise ValueError("trace weights must sum to one (tau(1) = 1)")
        if self.tensor_m2:
            if len(self.block_dims) != 1 or self.block_dims[0] % 2:
                raise ValueError("tensor_m2 requires a single even-dimensional block")

    @classmethod
    def full(cls, n: int) -> "TracialAlgebra":
        """The full matrix algebra M_n with trace tr/n."""
        return cls((n,), (1.0,))

    @classmethod
    def direct_sum(cls, dims, weights=None) -> "TracialAlgebra":
        """M_{n_1} (+) ... (+) M_{n_k}; equal block weights by default."""
        dims = tuple(int(d) for d in dims)
        if weights is None:
            weights = tuple(1.0 / len(dims) for _ in dims)
        return cls(dims, tuple(float(w) for w in weights))

    @classmethod
    def tensor_square(cls, inner_n: int) -> "TracialAlgebra":
        """M_{inner_n} (x) M_2 presented as 2x2 blocks over the inner algebra."""
        return cls((2 * inner_n,), (1.0,), tensor_m2=True)

    @property
    def dim(self) -> int:
        return sum(self.block_dims)

    @property
    def inner_dim(self) -> int:
        if not self.tensor_m2:
            raise ValueError("inner_dim is only defined for tensor_m2 algebras")
        return self.dim // 2

    def block_slices(self):
        out, start = [], 0
        for d in self.block_dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)


@functools.lru_cache(maxsize=None)
def _diag_weights(alg: TracialAlgebra) -> np.ndarray:
    """Per-diagonal-entry trace weights w_b / n_b (summing to 1)."""
    w = np.empty(alg.dim)
    for d, wb, sl in zip(alg.block_dims, alg.trace_weights, alg.block_slices()):
        w[sl] = wb / d
    return w


def _check_dim(x: np.ndarray, alg: TracialAlgebra) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (alg.dim, alg.dim):
        raise ValueError(f"matrix shape {x.shape} does not match algebra dim {alg.dim}")
    return x


# ---------------------------------------------------------------------------
# predicates and elementary quantities
# ---------------------------------------------------------------------------


def _max_entry(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def is_hermitian(x: np.ndarray, tol: float | None = None) -> bool:
    x = np.asarray(x)
    n = x.shape[0]
    tol = ENTRY_TOL * n if tol is None else tol
    return _max_entry(x - x.conj().T) <= tol * max(1.0, _max_entry(x))


def is_skew_hermitian(x: np.ndarray, tol: float | None = None) -> bool:
    x = np.asarray(x)
    n = x.shape[0]
    tol = ENTRY_TOL * n if tol is None else tol
    return _max_entry(x + x.conj().T) <= tol * max(1.0, _max_entry(x))


def is_unitary(u: np.ndarray, tol: float | None = None) -> bool:
    u = np.asarray(u)
    n = u.shape[0]
    tol = ENTRY_TOL * n if tol is None else tol
    return _max_entry(u.conj().T @ u - np.eye(n)) <= tol


def in_algebra(x: np.ndarray, alg: TracialAlgebra, tol: float = 1e-12) -> bool:
    """True when x is supported on the diagonal blocks of the algebra."""
    x = _check_dim(x, alg)
    mask = np.ones((alg.dim, alg.dim), dtype=bool)
    for sl in alg.block_slices():
        mask[sl, sl] = False
    off = _max_entry(x[mask]) if mask.any() else 0.0
    return off <= tol * max(1.0, _max_entry(x))


def operator_norm(x: np.ndarray) -> float:
    """Largest singular value (the uniform norm of M)."""
    return float(np.linalg.norm(np.asarray(x, dtype=complex), 2))


def trace_tau(x: np.ndarray, alg: TracialAlgebra) -> complex:
    """The normalized trace tau(x) = sum_b w_b tr(x_b)/n_b."""
    x = _check_dim(x, alg)
    return complex(np.dot(_diag_weights(alg), np.diagonal(x)))


def _tau_product(x: np.ndarray, y: np.ndarray, alg: TracialAlgebra) -> complex:
    """tau(x y) without forming the product matrix."""
    return complex(np.einsum("i,ij,ji->", _diag_weights(alg), x, y))


def inner_tau(a: np.ndarray, b: np.ndarray, alg: TracialAlgebra) -> float:
    """Real trace inner product Re tau(b* a)."""
    return float(np.real(_tau_product(b.conj().T, a, alg)))


def _block_eigvalsh(x, alg):
    vals = np.empty(alg.dim)
    for sl in alg.block_slices():
        vals[sl] = np.linalg.eigvalsh(x[sl, sl])
    return vals


def _block_svdvals(x, alg):
    vals = np.empty(alg.dim)
    for sl in alg.block_slices():
        vals[sl] = np.linalg.svd(x[sl, sl], compute_uv=False)
    return vals


def p_norm(x: np.ndarray, p: float, alg: TracialAlgebra) -> float:
    """The noncommutative L^p norm tau(|x|^p)^(1/p); p = inf is the operator norm.

    Singular values are computed blockwise so that they pair with the trace
    weights of the block carrying them.
    """
    x = _check_dim(x, alg)
    if np.isinf(p):
        return operator_norm(x)
    if p < 1:
        raise ValueError("p_norm requires p >= 1")
    s = _block_svdvals(x, alg)
    return float(np.dot(_diag_weights(alg), s**p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# random elements (block-respecting)
# ---------------------------------------------------------------------------


def random_hermitian(alg: TracialAlgebra, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    out = np.zeros((alg.dim, alg.dim), dtype=complex)
    for sl, d in zip(alg.block_slices(), alg.block_dims):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        out[sl, sl] = scale * (a + a.conj().T) / (2.0 * np.sqrt(d))
    return out


def random_skew(alg: TracialAlgebra, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return 1j * random_hermitian(alg, rng, scale)


def random_unitary(alg: TracialAlgebra, rng: np.random.Generator) -> np.ndarray:
    """Blockwise Haar-distributed unitary (QR of a Ginibre matrix, phases fixed)."""
    out = np.zeros((alg.dim, alg.dim), dtype=complex)
    for sl, d in zip(alg.block_slices(), alg.block_dims):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, r = np.linalg.qr(a)
        ph = np.diagonal(r).copy()
        ph = ph / np.abs(ph)
        out[sl, sl] = q * ph[None, :]
    return out


# ---------------------------------------------------------------------------
# spectral decompositions
# ---------------------------------------------------------------------------


@dataclass
class SpectralDecomposition:
    """x = frame @ diag(eigenvalues) @ frame*, with per-eigenvalue trace weights."""

    eigenvalues: np.ndarray
    frame: np.ndarray
    weights: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.frame * self.eigenvalues[None, :]) @ self.frame.conj().T

    def apply(self, fn) -> np.ndarray:
        """Functional calculus: frame @ diag(fn(eigenvalues)) @ frame*."""
        return (self.frame * fn(self.eigenvalues)[None, :]) @ self.frame.conj().T


def hermitian_eig(x: np.ndarray, alg: TracialAlgebra) -> SpectralDecomposition:
    """Blockwise eigendecomposition of a Hermitian element."""
    x = _check_dim(x, alg)
    if not is_hermitian(x):
        raise ValueError("hermitian_eig requires a Hermitian matrix")
    vals = np.empty(alg.dim)
    frame = np.zeros((alg.dim, alg.dim), dtype=complex)
    for sl in alg.block_slices():
        w, v = np.linalg.eigh(x[sl, sl])
        vals[sl] = w
        frame[sl, sl] = v
    dec = SpectralDecomposition(vals, frame, _diag_weights(alg).copy())
    _check_reconstruction(dec, x)
    return dec


def unitary_eig(u: np.ndarray, alg: TracialAlgebra) -> SpectralDecomposition:
    """Blockwise eigendecomposition of a unitary (Schur form; T is diagonal
    for normal input)."""
    u = _check_dim(u, alg)
    if not is_unitary(u, tol=1e-9):
        raise ValueError("unitary_eig requires a unitary matrix")
    vals = np.empty(alg.dim, dtype=complex)
    frame = np.zeros((alg.dim, alg.dim), dtype=complex)
    for sl in alg.block_slices():
        t, q = scipy.linalg.schur(u[sl, sl], output="complex")
        lam = np.diagonal(t).copy()
        lam = lam / np.abs(lam)
        vals[sl] = lam
        frame[sl, sl] = q
    dec = SpectralDecomposition(vals, frame, _diag_weights(alg).copy())
    _check_reconstruction(dec, u)
    return dec


def _check_reconstruction(dec: SpectralDecomposition, x: np.ndarray, tol: float = 1e-10):
    scale = max(1.0, operator_norm(x))
    err = operator_norm(dec.reconstruct() - x)
    if err > tol * scale:
        raise np.linalg.LinAlgError(
            f"spectral reconstruction error {err:.3e} exceeds {tol:.1e} * ||x||"
        )


# ---------------------------------------------------------------------------
# exponential and principal logarithm
# ---------------------------------------------------------------------------


def unitary_exp(z: np.ndarray) -> np.ndarray:
    """e^z for skew-Hermitian z, through the eigenframe of -iz."""
    z = np.asarray(z, dtype=complex)
    if not is_skew_hermitian(z, tol=1e-10 * z.shape[0]):
        raise ValueError("unitary_exp requires a skew-Hermitian argument")
    theta, frame = np.linalg.eigh(-1j * z)
    return (frame * np.exp(1j * theta)[None, :]) @ frame.conj().T


def principal_log(u: np.ndarray) -> np.ndarray:
    """Skew-Hermitian z with e^z = u and eigen-angles in (-pi, pi].

    The angle pi is assigned deterministically to eigenvalue -1, so the map
    is total on the unitary group and ||z|| <= pi always; ||z|| < pi exactly
    when ||1 - u|| < 2.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if not is_unitary(u, tol=1e-9 * n):
        raise ValueError("principal_log requires a unitary argument")
    t, q = scipy.linalg.schur(u, output="complex")
    lam = np.diagonal(t).copy()
    lam = lam / np.abs(lam)
    theta = np.angle(lam)
    theta[theta <= -np.pi + _BRANCH_SNAP] += 2 * np.pi
    np.clip(theta, -np.pi, np.pi, out=theta)
    z = (q * (1j * theta)[None, :]) @ q.conj().T
    return (z - z.conj().T) / 2.0


# ---------------------------------------------------------------------------
# analytic functions of ad a
# ---------------------------------------------------------------------------

_SERIES_CUT = 1e-2


def _sym_F(w: np.ndarray) -> np.ndarray:
    """F(w) = (e^w - 1)/w with the removable singularity F(0) = 1."""
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < _SERIES_CUT
    ws = np.where(small, 0.0, w)
    direct = np.divide(np.exp(ws) - 1.0, ws, out=np.ones_like(w), where=~small)
    series = 1 + w / 2 + w**2 / 6 + w**3 / 24 + w**4 / 120 + w**5 / 720 + w**6 / 5040
    return np.where(small, series, direct)


def _sym_G(w: np.ndarray) -> np.ndarray:
    """G(w) = (1 - e^{-w})/w = F(-w)."""
    return _sym_F(-np.asarray(w, dtype=complex))


class AdAnalytic:
    """Analytic functions of ad a = R_a - L_a for a fixed skew-Hermitian a.

    With a = U diag(i theta) U*, conjugation by U turns ad a into entrywise
    multiplication by i(theta_l - theta_k) at position (k, l); an analytic
    symbol phi acts by the multiplier phi(i(theta_l - theta_k)).  Eigen-angle
    differences below 1e-10 * ||a|| are snapped to zero so degenerate pairs
    always take the removable-singularity branch.

    The instance caches the eigenframe, so several symbols can be applied
    to the same a at the cost of one eigendecomposition.
    """

    def __init__(self, a: np.ndarray):
        a = np.asarray(a, dtype=complex)
        if not is_skew_hermitian(a, tol=1e-10 * a.shape[0]):
            raise ValueError("ad-calculus requires a skew-Hermitian generator")
        self.theta, self.frame = np.linalg.eigh(-1j * a)
        self.norm = float(np.max(np.abs(self.theta))) if a.shape[0] else 0.0
        diff = self.theta[None, :] - self.theta[:, None]
        diff[np.abs(diff) <= 1e-10 * max(self.norm, 1e-300)] = 0.0
        self._arg = 1j * diff

    def _multiplier(self, fn_tag: str) -> np.ndarray:
        if fn_tag == "F":
            return _sym_F(self._arg)
        if fn_tag == "G":
            return _sym_G(self._arg)
        if fn_tag in ("F_inv", "G_inv"):
            if self.norm >= np.pi / 2:
                raise ValueError(
                    "inverse symbols need ||a|| < pi/2 (got "
                    f"{self.norm:.6f}); invertibility is not guaranteed beyond"
                )
            base = _sym_F(self._arg) if fn_tag == "F_inv" else _sym_G(self._arg)
            return 1.0 / base
        raise ValueError(f"unknown symbol tag {fn_tag!r}")

    def apply(self, fn_tag: str, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=complex)
        mult = self._multiplier(fn_tag)
        bt = self.frame.conj().T @ b @ self.frame
        return self.frame @ (mult * bt) @ self.frame.conj().T

    def exp(self, t: float = 1.0) -> np.ndarray:
        """e^{t a} from the cached eigenframe."""
        return (self.frame * np.exp(1j * t * self.theta)[None, :]) @ self.frame.conj().T


def apply_analytic_ad(a: np.ndarray, fn_tag: str, b: np.ndarray) -> np.ndarray:
    """phi(ad a) b for phi in {F, G, F_inv, G_inv}; see AdAnalytic."""
    return AdAnalytic(a).apply(fn_tag, b)


def exp_differential(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Differential of the exponential map at a: e^a F(ad a) b.

    Equals int_0^1 e^{(1-t)a} b e^{ta} dt and is a p-norm contraction in b
    for every p when a is skew-Hermitian.
    """
    calc = AdAnalytic(a)
    return calc.exp() @ calc.apply("F", b)


# ---------------------------------------------------------------------------
# spectral scale, s-numbers, folding
# ---------------------------------------------------------------------------


@dataclass
class StepFunction:
    """Right-continuous step function on (0, 1].

    ``values[i]`` is taken on [breakpoints[i-1], breakpoints[i]) with an
    implicit leading breakpoint 0; the final breakpoint is 1 and the last
    interval is closed on the right.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.breakpoints = np.asarray(self.breakpoints, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.breakpoints.shape != self.values.shape:
            raise ValueError("breakpoints and values must align")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if abs(self.breakpoints[-1] - 1.0) > 1e-12:
            raise ValueError("the last breakpoint must be 1")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        idx = np.minimum(idx, len(self.values) - 1)
        return self.values[idx]

    @property
    def interval_lengths(self) -> np.ndarray:
        return np.diff(np.concatenate(([0.0], self.breakpoints)))

    def integrate(self, fn=lambda v: v) -> float:
        """int_0^1 fn(step(t)) dt, evaluated exactly."""
        return float(np.dot(self.interval_lengths, fn(self.values)))

    def is_nonincreasing(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.diff(self.values) <= tol))


def _scale_from_values(vals: np.ndarray, weights: np.ndarray) -> StepFunction:
    order = np.argsort(-vals, kind="stable")
    v = vals[order]
    w = weights[order]
    cuts = np.cumsum(w)
    cuts[-1] = 1.0
    # merge equal consecutive values so breakpoints stay strictly increasing
    keep = np.ones(len(v), dtype=bool)
    for i in range(len(v) - 1):
        if v[i + 1] == v[i]:
            keep[i] = False
    return StepFunction(cuts[keep], v[keep])


def spectral_scale(x: np.ndarray, alg: TracialAlgebra) -> StepFunction:
    """Non-increasing rearrangement lambda_t(x) of a Hermitian element.

    Interval lengths equal the trace weights of the eigenvalues sorted in
    descending order; tau(f(x)) = int_0^1 f(lambda_t(x)) dt for Borel f.
    """
    x = _check_dim(x, alg)
    if not is_hermitian(x):
        raise ValueError("spectral_scale requires a Hermitian argument")
    return _scale_from_values(_block_eigvalsh(x, alg), _diag_weights(alg))


def s_numbers(z: np.ndarray, alg: TracialAlgebra) -> StepFunction:
    """Generalized s-numbers mu_t(z) = lambda_t(|z|), for any matrix z."""
    z = _check_dim(z, alg)
    return _scale_from_values(_block_svdvals(z, alg), _diag_weights(alg))


def _sawtooth(t: np.ndarray) -> np.ndarray:
    """Reduce mod 2pi into (-pi, pi] above pi and [-pi, pi) below -pi;
    the identity on [-pi, pi]."""
    t = np.asarray(t, dtype=float)
    out = t.copy()
    hi = t > np.pi
    lo = t < -np.pi
    out[hi] = t[hi] - 2 * np.pi * np.ceil((t[hi] - np.pi) / (2 * np.pi))
    out[lo] = t[lo] - 2 * np.pi * np.floor((t[lo] + np.pi) / (2 * np.pi))
    return out


def fold_symbol(z: np.ndarray) -> np.ndarray:
    """Fold a Hermitian symbol through the 2pi-periodic sawtooth.

    Each eigenvalue is reduced mod 2pi into [-pi, pi], so e^{i fold(z)} =
    e^{iz}, ||fold(z)|| <= pi, and ||fold(z)||_p <= ||z||_p with strict
    inequality for finite p whenever ||z|| > pi.
    """
    z = np.asarray(z, dtype=complex)
    if not is_hermitian(z, tol=1e-10 * z.shape[0]):
        raise ValueError("fold_symbol requires a Hermitian argument")
    lam, frame = np.linalg.eigh(z)
    folded = (frame * _sawtooth(lam)[None, :]) @ frame.conj().T
    return (folded + folded.conj().T) / 2.0


# ---------------------------------------------------------------------------
# the degree-p bilinear form
# ---------------------------------------------------------------------------


def _check_even_p(p) -> int:
    p = int(p)
    if p < 2 or p % 2:
        raise ValueError("an even integer p >= 2 is required")
    return p


def h_form(a: np.ndarray, b: np.ndarray, c: np.ndarray, p: int, alg: TracialAlgebra) -> float:
    """H_a(b, c) = (-1)^(p/2) p sum_{k=0}^{p-2} tau(a^{p-2-k} b a^k c).

    Symmetric and positive semidefinite in (b, c) for skew-Hermitian inputs;
    it is the Hessian, in direction coefficients, of c |-> ||z - c.b||_p^p.
    """
    p = _check_even_p(p)
    sign = (-1) ** (p // 2)
    powers = [np.eye(alg.dim, dtype=complex)]
    for _ in range(p - 2):
        powers.append(powers[-1] @ a)
    total = 0.0 + 0.0j
    for k in range(p - 1):
        total += _tau_product(powers[p - 2 - k] @ b @ powers[k], c, alg)
    return float(np.real(sign * p * total))


def quadratic_form(a: np.ndarray, b: np.ndarray, p: int, alg: TracialAlgebra) -> float:
    """Q_a(b) = H_a(b, b) >= 0."""
    return h_form(a, b, b, p, alg)
