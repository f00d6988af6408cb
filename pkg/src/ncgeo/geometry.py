"""Curves, distances, lifts, and minimal geodesics on homogeneous spaces of
the unitary group of a finite tracial algebra.

The unitary group carries the bi-invariant rectifiable p-distance

    d_p(u, v) = || log(u* v) ||_p,

realized by one-parameter curves t |-> u e^{tz}.  A homogeneous space is a
transitive action of the unitary group together with the isotropy Lie
algebra at a basepoint; tangent vectors are measured by the quotient norm
inf_y ||z - y||_p over the isotropy algebra, lengths of orbit curves by
integrating quotient speeds of lifts, and the coset distance by

    qd_p(u.x, v.x) = min_{g in G_x} d_p(u, v g),

computed here by a seeded multistart quasi-Newton optimizer over the
isotropy algebra with an exact first-variation gradient and a stationarity
certificate (stationarity is equivalent to the minimal-lifting criterion
tau(w^{p-1} y) = 0 for all isotropy directions y).

The module also contains: the lifting ODE dz/dt = G(ad z)^{-1} w(t) solved
by a classical 4th-order one-step method with step halving against a
finite-difference defect bound; almost-isometric lifts of orbit curves
built from the polygonal approximation of -Q(Gamma* dGamma); initial-value
minimal geodesics with certified minimal symbols; the rectifiable length
of orbit curves as a supremum of partition sums; and the convexity and
minimality probes for the local geometry experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.optimize

from . import core
from .core import AdAnalytic, TracialAlgebra, principal_log, unitary_exp
from .projection import (
    ConvergenceError,
    SkewSubspace,
    best_approximant,
    conditional_expectation,
    lifting_certificate,
)

__all__ = [
    "SampledCurve",
    "HomSpace",
    "GeodesicResult",
    "QuotientDistanceResult",
    "LiftResult",
    "IsometricLiftResult",
    "ConvexityReport",
    "ProbeReport",
    "apply_action",
    "curve_length_p",
    "quotient_length",
    "unitary_distance",
    "quotient_distance",
    "lift_ode_solve",
    "epsilon_isometric_lift",
    "minimal_geodesic",
    "rectifiable_path_length",
    "convexity_probe",
    "minimality_probe",
    "exp_curve",
    "loop_deformed_exp_curve",
    "reparametrized_exp_curve",
    "orbit_gap",
]


# ---------------------------------------------------------------------------
# sampled curves
# ---------------------------------------------------------------------------


@dataclass
class SampledCurve:
    """A curve stored as node values on a uniform grid over [0, 1].

    ``target`` is "unitary" for curves in the unitary group, "orbit" for
    orbit curves (stored through unitary fiber representatives), or
    "algebra" for fields of skew-Hermitian values (ODE right-hand sides,
    interpolated linearly).  ``velocities`` holds the left-translated
    derivatives Gamma* dGamma/dt at the nodes when they are known in closed
    form ("exact-exponential" rule); otherwise derivatives fall back to
    4th-order finite differences on the grid.
    """

    grid: np.ndarray
    nodes: np.ndarray
    target: str = "unitary"
    velocities: np.ndarray | None = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.nodes = np.asarray(self.nodes, dtype=complex)
        if self.target not in ("unitary", "orbit", "algebra"):
            raise ValueError(f"unknown curve target {self.target!r}")
        if len(self.grid) != len(self.nodes):
            raise ValueError("grid and nodes must have equal length")
        if len(self.grid) < 2:
            raise ValueError("a curve needs at least two nodes")
        h = np.diff(self.grid)
        if np.max(np.abs(h - h[0])) > 1e-12:
            raise ValueError("the parameter grid must be uniform")
        if self.velocities is not None:
            self.velocities = np.asarray(self.velocities, dtype=complex)

    @property
    def derivative_rule(self) -> str:
        return "exact-exponential" if self.velocities is not None else "central-difference"

    @property
    def n_intervals(self) -> int:
        return len(self.grid) - 1

    def validate_unitary(self, tol: float = 1e-9):
        n = self.nodes.shape[-1]
        for k, u in enumerate(self.nodes):
            if not core.is_unitary(u, tol=tol * n):
                raise ValueError(f"curve node {k} is not unitary within tolerance")
        chords = [core.operator_norm(self.nodes[k + 1] - self.nodes[k]) for k in range(self.n_intervals)]
        if max(chords) >= 2.0:
            raise ValueError("grid too coarse: adjacent nodes at uniform distance >= 2")

    def left_velocities(self) -> np.ndarray:
        """Gamma* dGamma at every node (stored exactly or by finite differences)."""
        if self.velocities is not None:
            return self.velocities
        du = _differentiate_nodes(self.nodes, self.grid)
        out = np.empty_like(self.nodes)
        for k in range(len(self.grid)):
            v = self.nodes[k].conj().T @ du[k]
            out[k] = (v - v.conj().T) / 2.0
        return out

    def value(self, t: float) -> np.ndarray:
        """Linear interpolation of an algebra-valued curve."""
        if self.target != "algebra":
            raise ValueError("value() interpolates algebra-valued curves only")
        t = float(np.clip(t, 0.0, 1.0))
        h = self.grid[1] - self.grid[0]
        k = min(int(t / h), self.n_intervals - 1)
        s = (t - self.grid[k]) / h
        return (1.0 - s) * self.nodes[k] + s * self.nodes[k + 1]


_FD_INTERIOR = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_FD_LEFT = np.array(
    [
        [-25.0, 48.0, -36.0, 16.0, -3.0],
        [-3.0, -10.0, 18.0, -6.0, 1.0],
    ]
) / 12.0


def _differentiate_nodes(nodes: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """4th-order finite differences of matrix-valued nodes on a uniform grid."""
    m = len(grid)
    if m < 5:
        raise ValueError("finite differences need at least 5 nodes")
    h = grid[1] - grid[0]
    du = np.empty_like(nodes)
    for k in range(2, m - 2):
        du[k] = np.tensordot(_FD_INTERIOR, nodes[k - 2 : k + 3], axes=1) / h
    du[0] = np.tensordot(_FD_LEFT[0], nodes[:5], axes=1) / h
    du[1] = np.tensordot(_FD_LEFT[1], nodes[:5], axes=1) / h
    du[m - 1] = -np.tensordot(_FD_LEFT[0], nodes[m - 5 :][::-1], axes=1) / h
    du[m - 2] = -np.tensordot(_FD_LEFT[1], nodes[m - 5 :][::-1], axes=1) / h
    return du


def exp_curve(z: np.ndarray, n_nodes: int = 65, u0: np.ndarray | None = None, target: str = "unitary") -> SampledCurve:
    """The one-parameter curve t |-> u0 e^{tz} with exact velocities."""
    z = np.asarray(z, dtype=complex)
    calc = AdAnalytic(z)
    grid = np.linspace(0.0, 1.0, n_nodes)
    nodes = np.array([calc.exp(t) for t in grid])
    if u0 is not None:
        nodes = np.einsum("ij,kjl->kil", np.asarray(u0, dtype=complex), nodes)
    vel = np.repeat(z[None, :, :], n_nodes, axis=0)
    return SampledCurve(grid, nodes, target=target, velocities=vel)


def loop_deformed_exp_curve(
    z: np.ndarray, xi: np.ndarray, amplitude: float, n_nodes: int = 65, target: str = "unitary"
) -> SampledCurve:
    """Gamma(t) = e^{tz} e^{phi(t) xi} with the bump phi(t) = amplitude*t*(1-t).

    Joins the same endpoints as e^{tz}; the left-translated velocity is
    exact: e^{-phi xi} z e^{phi xi} + phi'(t) xi.
    """
    z = np.asarray(z, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    cz, cxi = AdAnalytic(z), AdAnalytic(xi)
    grid = np.linspace(0.0, 1.0, n_nodes)
    nodes = np.empty((n_nodes,) + z.shape, dtype=complex)
    vel = np.empty_like(nodes)
    for k, t in enumerate(grid):
        phi = amplitude * t * (1.0 - t)
        dphi = amplitude * (1.0 - 2.0 * t)
        loop = cxi.exp(phi)
        nodes[k] = cz.exp(t) @ loop
        vel[k] = loop.conj().T @ z @ loop + dphi * xi
    return SampledCurve(grid, nodes, target=target, velocities=vel)


def reparametrized_exp_curve(z: np.ndarray, warp: float, n_nodes: int = 65, target: str = "unitary") -> SampledCurve:
    """e^{phi(t) z} with the monotone warp phi(t) = t - warp*sin(2 pi t)/(2 pi)."""
    if not 0.0 <= warp < 1.0:
        raise ValueError("warp must lie in [0, 1) to keep phi monotone")
    z = np.asarray(z, dtype=complex)
    calc = AdAnalytic(z)
    grid = np.linspace(0.0, 1.0, n_nodes)
    nodes = np.empty((n_nodes,) + z.shape, dtype=complex)
    vel = np.empty_like(nodes)
    for k, t in enumerate(grid):
        phi = t - warp * math.sin(2 * math.pi * t) / (2 * math.pi)
        nodes[k] = calc.exp(phi)
        vel[k] = (1.0 - warp * math.cos(2 * math.pi * t)) * z
    return SampledCurve(grid, nodes, target=target, velocities=vel)


def _geodesic_resample(curve: SampledCurve, new_params: np.ndarray) -> np.ndarray:
    """Node values at arbitrary parameters by chord-log interpolation."""
    h = curve.grid[1] - curve.grid[0]
    out = np.empty((len(new_params),) + curve.nodes.shape[1:], dtype=complex)
    for i, t in enumerate(np.clip(new_params, 0.0, 1.0)):
        k = min(int(t / h), curve.n_intervals - 1)
        s = (t - curve.grid[k]) / h
        chord = principal_log(curve.nodes[k].conj().T @ curve.nodes[k + 1])
        out[i] = curve.nodes[k] @ AdAnalytic(chord).exp(s)
    return out


# ---------------------------------------------------------------------------
# homogeneous spaces
# ---------------------------------------------------------------------------


@dataclass
class HomSpace:
    """A homogeneous-space model: action kind, basepoint, isotropy data.

    ``kind`` selects the action: "coset" (points are left cosets stored by
    unitary representatives), "conjugation" (points u pt u*), or
    "partial-isometry" (points u pt).  ``isotropy`` must be a Lie algebra
    (lie_closed); ``supplement`` is the trace-orthogonal complement.
    ``c_O`` bounds the uniform norm of the horizontal projection against
    the quotient norm; ``k_O_p`` maps each even p to a uniform bound on the
    best-approximant projection, exact where the model provides one and an
    inflated empirical estimate otherwise.
    """

    ambient: TracialAlgebra
    kind: str
    basepoint: np.ndarray
    isotropy: SkewSubspace
    supplement: SkewSubspace
    c_O: float
    k_O_p: dict
    exponential_isotropy: bool = True
    model_kind: str = ""

    def __post_init__(self):
        if self.kind not in ("coset", "conjugation", "partial-isometry"):
            raise ValueError(f"unknown action kind {self.kind!r}")
        self.basepoint = np.asarray(self.basepoint, dtype=complex)

    def act(self, u: np.ndarray, pt: np.ndarray) -> np.ndarray:
        if self.kind == "conjugation":
            return u @ pt @ u.conj().T
        return u @ pt

    def orbit_point(self, u: np.ndarray) -> np.ndarray:
        return self.act(u, self.basepoint)

    def k_O(self, p) -> float:
        p = int(p)
        if p not in self.k_O_p:
            raise ValueError(f"no projection bound recorded for p = {p}")
        return self.k_O_p[p]

    def epsilon_band(self, p) -> float:
        """(sqrt(2) - 1) / (C (1 + K_p)): the uniform-length band inside
        which minimal symbols beat every competitor."""
        return (math.sqrt(2.0) - 1.0) / (self.c_O * (1.0 + self.k_O(p)))

    def radius(self, p) -> float:
        """Initial-value minimality radius min(pi/3, eps/(2(1+K_p)))."""
        return min(math.pi / 3.0, self.epsilon_band(p) / (2.0 * (1.0 + self.k_O(p))))

    def vertical_project(self, z: np.ndarray) -> np.ndarray:
        return self.isotropy.project(z)

    def horizontal_project(self, z: np.ndarray) -> np.ndarray:
        return z - self.isotropy.project(z)

    def isotropy_defect(self, g: np.ndarray) -> float:
        """Uniform-norm defect of membership of a unitary in the isotropy group."""
        if self.kind == "coset":
            try:
                return core.operator_norm(g - conditional_expectation(g, self.isotropy))
            except ValueError:
                # generic-basis isotropy: compare against the exponential of
                # the vertical part of the principal logarithm
                lg = principal_log(g)
                return core.operator_norm(g - unitary_exp(self.isotropy.project(lg)))
        return core.operator_norm(self.act(g, self.basepoint) - self.basepoint)

    def point_equal(self, u: np.ndarray, v: np.ndarray, tol: float = 1e-8) -> bool:
        if self.kind == "coset":
            return self.isotropy_defect(u.conj().T @ v) <= tol
        return core.operator_norm(self.orbit_point(u) - self.orbit_point(v)) <= tol


def apply_action(space: HomSpace, u: np.ndarray, pt: np.ndarray) -> np.ndarray:
    """Act on an orbit point; coset points are carried by their unitary
    representative (no canonical section is chosen)."""
    u = np.asarray(u, dtype=complex)
    if not core.is_unitary(u, tol=1e-9 * space.ambient.dim):
        raise ValueError("apply_action requires a unitary group element")
    pt = np.asarray(pt, dtype=complex)
    if space.kind == "conjugation":
        herm = core.is_hermitian(pt, tol=1e-8 * space.ambient.dim)
        idem = core.operator_norm(pt @ pt - pt) <= 1e-8
        if not (herm and idem):
            raise ValueError("conjugation-orbit points must be projections")
    elif space.kind == "partial-isometry":
        ref = space.basepoint.conj().T @ space.basepoint
        if core.operator_norm(pt.conj().T @ pt - ref) > 1e-8:
            raise ValueError("point is not a partial isometry with the model initial space")
    return space.act(u, pt)


def orbit_gap(space: HomSpace, u: np.ndarray, v: np.ndarray) -> float:
    """Cheap upper-bound distance between the orbit points of u and v.

    Coset kind: the 2-norm of the horizontal part of log(u* v), which is an
    upper bound for the quotient distance and vanishes exactly on equal
    cosets.  Matrix kinds: the 2-norm distance of the point matrices.
    """
    if space.kind == "coset":
        lg = principal_log(u.conj().T @ v)
        return core.p_norm(space.horizontal_project(lg), 2, space.ambient)
    return core.p_norm(space.orbit_point(u) - space.orbit_point(v), 2, space.ambient)


# ---------------------------------------------------------------------------
# lengths
# ---------------------------------------------------------------------------


def _simpson(values, grid) -> float:
    return float(scipy.integrate.simpson(values, x=grid))


def curve_length_p(curve: SampledCurve, p, alg: TracialAlgebra) -> float:
    """Length of a unitary-group curve: int ||Gamma* dGamma||_p dt (Simpson)."""
    if curve.target == "algebra":
        raise ValueError("curve_length_p measures unitary-group curves")
    curve.validate_unitary()
    vel = curve.left_velocities()
    speeds = [core.p_norm(v, p, alg) for v in vel]
    return _simpson(speeds, curve.grid)


def quotient_length(curve: SampledCurve, space: HomSpace, p, tol: float = 1e-10) -> float:
    """Quotient length of the orbit curve below a unitary lift.

    Integrates ||v - Q(v)||_p over the nodewise left velocities v, where Q
    is the certified best-approximant onto the isotropy algebra (Newton
    iterations warm-started along the curve).  Independent of the chosen
    lift up to solver plus quadrature error.
    """
    curve.validate_unitary()
    vel = curve.left_velocities()
    speeds = np.empty(len(vel))
    warm = None
    for k, v in enumerate(vel):
        res = best_approximant(v, space.isotropy, int(p), tol=tol, x0=warm)
        warm = res.coefficients
        speeds[k] = core.p_norm(res.residual, p, space.ambient)
    return _simpson(speeds, curve.grid)


def quotient_uniform_length(curve: SampledCurve, space: HomSpace) -> float:
    """Upper bound for the quotient uniform length of the orbit curve.

    Uses the linear vertical projection as the competitor at every node,
    so each nodewise value bounds the quotient uniform speed from above.
    """
    vel = curve.left_velocities()
    speeds = [core.operator_norm(space.horizontal_project(v)) for v in vel]
    return _simpson(speeds, curve.grid)


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def unitary_distance(u: np.ndarray, v: np.ndarray, p, alg: TracialAlgebra) -> float:
    """Rectifiable p-distance d_p(u, v) = ||log(u* v)||_p on the unitary group."""
    return core.p_norm(principal_log(np.asarray(u).conj().T @ v), p, alg)


@dataclass
class QuotientDistanceResult:
    """Coset distance value with its stationarity certificate."""

    value: float
    g_opt: np.ndarray
    stationarity_residual: float
    starts: int
    p: int

    def __float__(self):
        return self.value


def _coset_value_and_grad(base, c, G, p, alg):
    Bc = G.combine(c)
    calc = AdAnalytic(Bc)
    w = principal_log(base @ calc.exp())
    sign = (-1) ** (p // 2)
    f = float(np.real(sign * core.trace_tau(np.linalg.matrix_power(w, p), alg)))
    wp1 = np.linalg.matrix_power(w, p - 1)
    onb = G.onb()
    grad = np.empty(len(onb))
    for k, bk in enumerate(onb):
        fb = calc.apply("F", bk)
        grad[k] = sign * p * float(np.real(core._tau_product(wp1, fb, alg)))
    return f, grad


def _coset_polish(base, g, G, p, alg, tol, max_steps=60):
    """Multiplicative damped Newton to drive the stationarity residual down.

    Right-translations g -> g e^{d} have first variation
    (-1)^(p/2) p tau(w^{p-1} b_k) and, at the optimum, Hessian
    H_w(F(ad w)^{-1} b_j, b_k); the residual max_k |tau(w^{p-1} b_k)| is the
    minimal-lifting certificate for w.
    """
    onb = G.onb()
    sign = (-1) ** (p // 2)
    m = len(onb)
    w = principal_log(base @ g)
    f = float(np.real(sign * core.trace_tau(np.linalg.matrix_power(w, p), alg)))
    resid = np.inf
    for _ in range(max_steps):
        wp1 = np.linalg.matrix_power(w, p - 1)
        t = np.array([float(np.real(core._tau_product(wp1, bk, alg))) for bk in onb])
        resid = float(np.max(np.abs(t))) if m else 0.0
        if resid <= tol:
            break
        grad = sign * p * t
        step = None
        if core.operator_norm(w) < 0.45 * math.pi:
            calc = AdAnalytic(w)
            hess = np.empty((m, m))
            for j in range(m):
                wj = calc.apply("F_inv", onb[j])
                for k in range(m):
                    hess[j, k] = core.h_form(w, wj, onb[k], p, alg)
            hess = (hess + hess.T) / 2.0
            damp = 1e-10 * max(1.0, float(np.trace(hess)) / max(m, 1))
            try:
                step = np.linalg.solve(hess + damp * np.eye(m), -grad)
                if not np.isfinite(step).all() or float(step @ grad) >= 0.0:
                    step = None
            except np.linalg.LinAlgError:
                step = None
        if step is None:
            step = -grad / max(float(np.linalg.norm(grad)), 1e-300)
        scale = 1.0
        slope = float(step @ grad)
        roundoff = 64.0 * np.finfo(float).eps * (abs(f) + 1.0)
        accepted = False
        while scale > 1e-12:
            g_try = g @ unitary_exp(G.combine(scale * step))
            # steps landing on the cut locus lose smoothness of the log: halve
            if core.operator_norm(np.eye(alg.dim) - base @ g_try) >= 2.0 - 1e-6:
                scale *= 0.5
                continue
            w_try = principal_log(base @ g_try)
            f_try = float(np.real(sign * core.trace_tau(np.linalg.matrix_power(w_try, p), alg)))
            if f_try <= f + 1e-4 * scale * slope + roundoff:
                g, w, f = g_try, w_try, f_try
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            break
    return g, w, f, resid


def quotient_distance(
    space: HomSpace,
    u: np.ndarray,
    v: np.ndarray,
    p,
    multistarts: int = 6,
    seed: int = 0,
    tol: float = 1e-9,
) -> QuotientDistanceResult:
    """Coset distance min_{g in G_x} d_p(u, v g) with a stationarity certificate.

    By bi-invariance of d_p the two-sided infimum over the isotropy group
    collapses to a right translation of v.  The coefficient optimization
    uses the exact gradient of ||log(u* v e^{B(c)})||_p^p (removable through
    the F-symbol of the ad operator), multistarted from seeded points of
    the isotropy algebra, then polished by a multiplicative Newton step to
    certify max_k |tau(w^{p-1} b_k)| <= tol at the reported minimizer.
    """
    p = core._check_even_p(p)
    alg = space.ambient
    G = space.isotropy
    base = np.asarray(u, dtype=complex).conj().T @ np.asarray(v, dtype=complex)
    m = G.dim
    if m == 0:
        w = principal_log(base)
        return QuotientDistanceResult(core.p_norm(w, p, alg), np.eye(alg.dim, dtype=complex), 0.0, 1, p)

    rng = np.random.default_rng(seed)
    starts = [np.zeros(m)]
    direct = principal_log(base)
    starts.append(-G.coords(direct))
    for j in range(max(0, multistarts - len(starts))):
        if j % 2 == 0:
            # wide coverage of the fundamental domain (the wrapped angles
            # create several basins at large distances)
            starts.append(rng.uniform(-math.pi, math.pi, size=m))
        else:
            y = G.project(core.random_skew(alg, rng))
            nrm = core.operator_norm(y)
            if nrm > 1e-12:
                y = y * (rng.uniform(0.2, 0.8) * math.pi / nrm)
            starts.append(G.coords(y))

    bounds = [(-math.pi - 0.5, math.pi + 0.5)] * m

    def sweep(start_points):
        best = None
        for c0 in start_points:
            res = scipy.optimize.minimize(
                lambda c: _coset_value_and_grad(base, c, G, p, alg),
                np.clip(c0, -math.pi, math.pi),
                jac=True,
                method="L-BFGS-B",
                bounds=bounds,
                options={"maxiter": 300, "ftol": 1e-16, "gtol": 1e-12},
            )
            if best is None or res.fun < best.fun:
                best = res
        return best

    best = sweep(starts)
    g = unitary_exp(G.combine(best.x))
    n_starts = len(starts)
    if core.operator_norm(np.eye(alg.dim) - base @ g) >= 2.0 - 1e-6:
        # every start drifted to the cut locus where the log loses
        # smoothness: retry once from jittered points
        jittered = [c + rng.uniform(-0.3, 0.3, size=m) for c in starts]
        retry = sweep(jittered)
        n_starts += len(jittered)
        if retry.fun < best.fun:
            g = unitary_exp(G.combine(retry.x))
    g, w, f, resid = _coset_polish(base, g, G, p, alg, tol)
    return QuotientDistanceResult(max(f, 0.0) ** (1.0 / p), g, resid, n_starts, p)


# ---------------------------------------------------------------------------
# the lifting ODE
# ---------------------------------------------------------------------------


@dataclass
class LiftResult:
    """Solution of du/dt u* = w inside the isotropy group.

    ``z`` is the algebra-valued curve with u = e^z (piecewise, after any
    restarts), ``u`` the unitary curve with exact velocities attached,
    ``defect`` the uniform finite-difference defect max_t ||du u* - w||,
    and ``projection_drift`` the largest per-step displacement of the
    tangent projection back onto the isotropy algebra.
    """

    z: SampledCurve
    u: SampledCurve
    defect: float
    projection_drift: float
    refinements: int
    restarts: int

    def __iter__(self):
        return iter((self.z, self.u))


def lift_ode_solve(
    w_curve: SampledCurve,
    space: HomSpace,
    defect_tol: float = 1e-6,
    drift_tol: float = 1e-9,
    max_refinements: int = 6,
    min_nodes: int = 65,
) -> LiftResult:
    """Integrate dz/dt = G(ad z)^{-1} w(t), z(0) = 0, u = e^z.

    Classical 4th-order one-step method; the step count doubles until the
    defect ||du u* - w|| measured by 4th-order differences on the returned
    grid is below ``defect_tol`` uniformly.  Iterates are projected back
    onto the isotropy algebra each step (the field is tangent, so the
    recorded displacement must stay below ``drift_tol``); if an iterate
    approaches uniform norm pi/2 the integration restarts from a fresh
    exponential segment, and the returned z is the principal logarithm of
    the concatenated solution.
    """
    if w_curve.target != "algebra":
        raise ValueError("the ODE right-hand side must be an algebra-valued curve")
    G = space.isotropy
    for k, wk in enumerate(w_curve.nodes):
        if not G.contains(wk, tol=1e-8):
            raise ValueError(f"field node {k} is not in the isotropy algebra")

    n_base = w_curve.n_intervals
    # steps subdivide the polygon segments so neither the integrator nor the
    # defect stencils cross a kink of w (>= 5 nodes per segment for the
    # one-sided 4th-order differences)
    mult = max(4, math.ceil((min_nodes - 1) / n_base))
    n_steps = n_base * mult
    alg_dim = space.ambient.dim

    last = None
    for refinement in range(max_refinements + 1):
        h = 1.0 / n_steps
        grid = np.linspace(0.0, 1.0, n_steps + 1)
        z = np.zeros((alg_dim, alg_dim), dtype=complex)
        u_base = np.eye(alg_dim, dtype=complex)
        restarts = 0
        drift = 0.0
        z_nodes = np.empty((n_steps + 1, alg_dim, alg_dim), dtype=complex)
        u_nodes = np.empty_like(z_nodes)
        z_nodes[0] = z
        u_nodes[0] = u_base

        def field(t, zz):
            return AdAnalytic(zz).apply("G_inv", w_curve.value(t))

        for i in range(n_steps):
            t0 = grid[i]
            k1 = field(t0, z)
            k2 = field(t0 + h / 2, z + (h / 2) * k1)
            k3 = field(t0 + h / 2, z + (h / 2) * k2)
            k4 = field(t0 + h, z + h * k3)
            z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            zp = G.project(z)
            drift = max(drift, core.operator_norm(z - zp))
            z = zp
            if core.operator_norm(z) >= 0.45 * math.pi:
                u_base = unitary_exp(z) @ u_base
                z = np.zeros_like(z)
                restarts += 1
            u_nodes[i + 1] = unitary_exp(z) @ u_base
            z_nodes[i + 1] = z if restarts == 0 else principal_log(u_nodes[i + 1])

        # differentiate u segment by segment: u is smooth between the kinks
        # of the polygonal field, so stencils must not straddle them
        seg = n_steps // n_base
        du = np.empty_like(u_nodes)
        for s in range(n_base):
            lo, hi = s * seg, (s + 1) * seg
            du[lo : hi + 1] = _differentiate_nodes(u_nodes[lo : hi + 1], grid[lo : hi + 1])
        defect = 0.0
        for i in range(n_steps + 1):
            defect = max(
                defect,
                core.operator_norm(du[i] @ u_nodes[i].conj().T - w_curve.value(grid[i])),
            )
        vel = np.array([u_nodes[i].conj().T @ w_curve.value(grid[i]) @ u_nodes[i] for i in range(n_steps + 1)])
        vel = (vel - np.conj(np.swapaxes(vel, 1, 2))) / 2.0
        last = LiftResult(
            SampledCurve(grid, z_nodes, target="algebra"),
            SampledCurve(grid, u_nodes, target="unitary", velocities=vel),
            defect,
            drift,
            refinement,
            restarts,
        )
        if defect <= defect_tol and drift <= drift_tol:
            return last
        n_steps *= 2
    raise ConvergenceError(
        f"lifting ODE defect {last.defect:.3e} above {defect_tol:.1e} "
        f"after {max_refinements} refinements"
    )


# ---------------------------------------------------------------------------
# almost isometric lifts
# ---------------------------------------------------------------------------


@dataclass
class IsometricLiftResult:
    beta: SampledCurve
    length_p: float
    quotient_length_p: float
    epsilon: float
    band_sup: float
    lift: LiftResult

    @property
    def excess(self) -> float:
        return self.length_p - self.quotient_length_p


def epsilon_isometric_lift(
    curve: SampledCurve, space: HomSpace, p, epsilon: float, tol: float = 1e-10
) -> IsometricLiftResult:
    """Build a lift whose p-length exceeds the quotient length by less than
    epsilon (plus numerical slack).

    The vertical field alpha = -Q(Gamma* dGamma) lives in the isotropy
    algebra (closed at finite dimension), is interpolated as a polygonal
    w_eps through the curve nodes (which must resolve the modulus
    ||alpha(t_{k+1}) - alpha(t_k)||_p < epsilon/3), and the correction
    u solving du u* = w_eps turns Gamma into beta = Gamma u with
    ||beta* dbeta||_p <= quotient speed + epsilon pointwise.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    p = core._check_even_p(p)
    curve.validate_unitary()
    alg = space.ambient
    vel = curve.left_velocities()
    alpha = np.empty_like(vel)
    qspeeds = np.empty(len(vel))
    warm = None
    for k, v in enumerate(vel):
        res = best_approximant(v, space.isotropy, p, tol=tol, x0=warm)
        warm = res.coefficients
        alpha[k] = -res.projection
        qspeeds[k] = core.p_norm(res.residual, p, alg)
    w_curve = SampledCurve(curve.grid, alpha, target="algebra")

    # certify sup_t ||w_eps(t) + Q(Gamma* dGamma)(t)||_p < epsilon: the
    # polygonal matches -Q exactly at the nodes, so the band is measured at
    # the midpoints (chord-log velocity, second-order accurate); the
    # adjacent-jump modulus < epsilon/3 is kept as the continuity fallback
    band = 0.0
    h = curve.grid[1] - curve.grid[0]
    for k in range(curve.n_intervals):
        chord = principal_log(curve.nodes[k].conj().T @ curve.nodes[k + 1])
        v_half = (chord - chord.conj().T) / (2.0 * h)
        res = best_approximant(v_half, space.isotropy, p, tol=tol)
        t_mid = (curve.grid[k] + curve.grid[k + 1]) / 2.0
        band = max(band, core.p_norm(w_curve.value(t_mid) + res.projection, p, alg))
    jumps = max(core.p_norm(alpha[k + 1] - alpha[k], p, alg) for k in range(len(alpha) - 1))
    if band > 0.8 * epsilon and jumps >= epsilon / 3.0:
        raise ValueError(
            "curve grid too coarse for the requested epsilon: the vertical "
            f"field band is {band:.3e} against epsilon {epsilon:.1e}"
        )

    lift = lift_ode_solve(w_curve, space, defect_tol=1e-6)
    stride = lift.u.n_intervals // curve.n_intervals
    u_at_nodes = lift.u.nodes[::stride]

    beta_nodes = np.einsum("kij,kjl->kil", curve.nodes, u_at_nodes)
    beta_vel = np.array(
        [u_at_nodes[k].conj().T @ (vel[k] + alpha[k]) @ u_at_nodes[k] for k in range(len(vel))]
    )
    beta = SampledCurve(curve.grid, beta_nodes, target="unitary", velocities=beta_vel)

    length = _simpson([core.p_norm(v, p, alg) for v in beta_vel], curve.grid)
    qlength = _simpson(qspeeds, curve.grid)
    return IsometricLiftResult(beta, length, qlength, epsilon, band, lift)


# ---------------------------------------------------------------------------
# minimal geodesics
# ---------------------------------------------------------------------------


@dataclass
class GeodesicResult:
    """A certified minimal symbol and its one-parameter orbit curve."""

    symbol: np.ndarray
    length_p: float
    endpoint_error: float
    minimality_certificate: float
    within_radius: bool
    p: int
    curve: SampledCurve

    def as_dict(self):
        return {
            "length_p": self.length_p,
            "endpoint_error": self.endpoint_error,
            "minimality_certificate": self.minimality_certificate,
            "within_radius": self.within_radius,
            "p": self.p,
        }


def minimal_geodesic(
    space: HomSpace,
    target: np.ndarray,
    p,
    multistarts: int = 6,
    seed: int = 0,
    tol: float = 1e-9,
    n_nodes: int = 65,
) -> GeodesicResult:
    """Initial-value minimal curve from the basepoint to target . x.

    Minimizes ||log(v e^y)||_p over the isotropy algebra (the coset
    distance optimizer); at the optimum the symbol z = log(v e^{y}) has
    vanishing best-approximant projection, certified independently through
    the minimal-lifting residual.  The returned curve is t |-> e^{tz}
    acting on the basepoint.
    """
    p = core._check_even_p(p)
    v = np.asarray(target, dtype=complex)
    alg = space.ambient
    qd = quotient_distance(space, np.eye(alg.dim, dtype=complex), v, p, multistarts, seed, tol)
    z = principal_log(v @ qd.g_opt)
    cert = lifting_certificate(z, space.isotropy, p)
    endpoint = orbit_gap(space, unitary_exp(z), v)
    within = core.operator_norm(z) < space.radius(p)
    curve = exp_curve(z, n_nodes=n_nodes, target="orbit")
    return GeodesicResult(z, core.p_norm(z, p, alg), endpoint, cert, within, p, curve)


def rectifiable_path_length(
    curve: SampledCurve,
    space: HomSpace,
    p,
    tol: float = 1e-6,
    multistarts: int = 3,
    seed: int = 0,
):
    """Length of an orbit curve as the supremum of partition sums of the
    coset distance.

    Evaluates the sums on dyadic coarsenings of the curve grid, refining
    until the increase drops below ``tol``; the sums must be nondecreasing
    under refinement up to certificate error.  Returns (length, sums).
    """
    n = curve.n_intervals
    strides = []
    s = n
    while s >= 1:
        strides.append(s)
        s //= 2
    sums = []
    for stride in strides:
        idx = list(range(0, n + 1, stride))
        if idx[-1] != n:
            idx.append(n)
        total = 0.0
        for a, b in zip(idx[:-1], idx[1:]):
            total += quotient_distance(
                space, curve.nodes[a], curve.nodes[b], p, multistarts=multistarts, seed=seed
            ).value
        sums.append(total)
        if len(sums) >= 2 and abs(sums[-1] - sums[-2]) < tol:
            break
    for a, b in zip(sums[:-1], sums[1:]):
        if b < a - 1e-7:
            raise ConvergenceError("partition sums decreased under refinement beyond tolerance")
    return sums[-1], sums


# ---------------------------------------------------------------------------
# convexity probe
# ---------------------------------------------------------------------------


@dataclass
class ConvexityReport:
    s_grid: np.ndarray
    values: np.ndarray
    second_differences: np.ndarray
    collinear: bool
    min_second_difference: float
    mean_second_difference: float


def convexity_probe(u, v, w, p, alg: TracialAlgebra, n_nodes: int = 65) -> ConvexityReport:
    """Profile of f(s) = d_p(u, v e^{s log(v* w)})^p on [0, 1].

    Preconditions ||u - v|| < sqrt(2) and ||w - v|| < sqrt(2) - ||u - v||
    keep every d_p evaluation inside the smooth branch of the logarithm.
    When u lies on a prolongation of the v -> w geodesic (the logs at v are
    collinear) the profile is reported with ``collinear`` set and convexity
    is not asserted; otherwise all second central differences should be
    nonnegative up to roundoff with strictly positive mean.
    """
    u, v, w = (np.asarray(m, dtype=complex) for m in (u, v, w))
    duv = core.operator_norm(u - v)
    dwv = core.operator_norm(w - v)
    if duv >= math.sqrt(2.0):
        raise ValueError("precondition ||u - v|| < sqrt(2) violated")
    if dwv >= math.sqrt(2.0) - duv:
        raise ValueError("precondition ||w - v|| < sqrt(2) - ||u - v|| violated")
    z = principal_log(v.conj().T @ w)
    zu = principal_log(v.conj().T @ u)
    z2 = core.inner_tau(z, z, alg)
    zu2 = core.inner_tau(zu, zu, alg)
    if z2 <= 1e-24 or zu2 <= 1e-24:
        collinear = True
    else:
        proj = (core.inner_tau(zu, z, alg) / z2) * z
        collinear = core.p_norm(zu - proj, 2, alg) <= 1e-8 * math.sqrt(zu2)
    calc = AdAnalytic(z)
    grid = np.linspace(0.0, 1.0, n_nodes)
    vals = np.empty(n_nodes)
    for k, s in enumerate(grid):
        vals[k] = unitary_distance(u, v @ calc.exp(s), p, alg) ** p
    d2 = vals[2:] - 2 * vals[1:-1] + vals[:-2]
    return ConvexityReport(grid, vals, d2, collinear, float(np.min(d2)), float(np.mean(d2)))


# ---------------------------------------------------------------------------
# minimality probe
# ---------------------------------------------------------------------------


@dataclass
class ProbeReport:
    trials: int
    violations: int
    worst_margin: float
    vacuous: int
    epsilon: float
    uniform_band: float
    uniqueness_checked: int
    uniqueness_violations: int
    details: list = field(default_factory=list)


def _constant_speed_params(curve: SampledCurve, space: HomSpace, p) -> np.ndarray:
    """Parameters at which the curve reaches uniform fractions of its
    quotient arc length (trapezoid cumulative speeds)."""
    vel = curve.left_velocities()
    speeds = np.empty(len(vel))
    warm = None
    for k, v in enumerate(vel):
        res = best_approximant(v, space.isotropy, p, tol=1e-10, x0=warm)
        warm = res.coefficients
        speeds[k] = core.p_norm(res.residual, p, space.ambient)
    h = curve.grid[1] - curve.grid[0]
    cum = np.concatenate(([0.0], np.cumsum((speeds[:-1] + speeds[1:]) / 2.0 * h)))
    if cum[-1] <= 1e-14:
        return curve.grid.copy()
    return np.interp(np.linspace(0.0, 1.0, len(curve.grid)) * cum[-1], cum, curve.grid)


def minimality_probe(
    space: HomSpace,
    z: np.ndarray,
    p,
    trials: int = 50,
    seed: int = 0,
    n_nodes: int = 65,
    band_safety: float = 0.95,
    length_slack: float = 1e-6,
    uniqueness_length_tol: float = 1e-7,
    uniqueness_node_tol: float = 1e-4,
) -> ProbeReport:
    """Compare the curve e^{tz} . x against random competitors in the band.

    ``z`` must be a certified minimal symbol with uniform norm below pi/3.
    Competitors join the same orbit endpoints, are rejection-scaled until
    their quotient uniform length (certified upper bound) sits inside the
    band epsilon = (sqrt(2)-1)/(C(1+K_p)), and must then be no shorter than
    ||z||_p - slack.  Competitors whose length ties ||z||_p within
    ``uniqueness_length_tol`` are reparametrized to constant quotient speed
    and compared node-by-node against the minimal curve.
    """
    p = core._check_even_p(p)
    alg = space.ambient
    z = np.asarray(z, dtype=complex)
    scale = max(core.p_norm(z, p, alg), 1e-12)
    if lifting_certificate(z, space.isotropy, p) > 1e-8 * max(1.0, scale ** (p - 1)):
        raise ValueError("probe requires a minimal symbol: Q(z) is not zero within tolerance")
    if core.operator_norm(z) >= math.pi / 3.0:
        raise ValueError("probe requires ||z|| < pi/3")

    eps = space.epsilon_band(p)
    len_delta = core.p_norm(z, p, alg)
    delta_curve = exp_curve(z, n_nodes=n_nodes)
    rng = np.random.default_rng(seed)

    violations = 0
    vacuous = 0
    worst = math.inf
    uniq_checked = 0
    uniq_violations = 0
    details = []

    for trial in range(trials):
        kind = "loop"
        if trial == 0:
            comp = exp_curve(z, n_nodes=n_nodes)
            kind = "delta"
        elif trial == 1:
            comp = reparametrized_exp_curve(z, warp=0.35, n_nodes=n_nodes)
            kind = "reparam"
        else:
            xi = core.random_skew(alg, rng)
            nxi = core.operator_norm(xi)
            if nxi <= 1e-14:
                vacuous += 1
                continue
            xi = xi / nxi
            amp = 0.5 * eps
            comp = None
            for _ in range(40):
                cand = loop_deformed_exp_curve(z, xi, amp, n_nodes=n_nodes)
                if quotient_uniform_length(cand, space) <= band_safety * eps:
                    comp = cand
                    break
                amp *= 0.6
            if comp is None:
                vacuous += 1
                continue
        band = quotient_uniform_length(comp, space)
        if band > eps:
            vacuous += 1
            continue
        length = quotient_length(comp, space, p)
        margin = length - (len_delta - length_slack)
        worst = min(worst, margin)
        if margin < 0:
            violations += 1
        if abs(length - len_delta) <= uniqueness_length_tol:
            uniq_checked += 1
            params = _constant_speed_params(comp, space, p)
            renodes = _geodesic_resample(comp, params)
            gap = max(
                orbit_gap(space, renodes[k], delta_curve.nodes[k]) for k in range(len(renodes))
            )
            if gap > uniqueness_node_tol:
                uniq_violations += 1
        details.append((kind, band, length, margin))

    return ProbeReport(
        trials,
        violations,
        worst if details else math.inf,
        vacuous,
        eps,
        max(d[1] for d in details) if details else 0.0,
        uniq_checked,
        uniq_violations,
        details,
    )
