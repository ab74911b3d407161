"""Brascamp-Lieb divergences, their concave-envelope variant, typical
sets and the tail bounds used to restrict to them.

For a nonnegative weight ``mu`` on ``X``, a channel ``W`` and a reference
``nu`` on ``Y`` the divergence is

    d(mu, W, nu, c) = sup_P  c D(P W || nu) - D(P || mu),

where ``D(P || mu) = sum_x P(x) ln(P(x) / mu(x))`` also for unnormalized
``mu``. The envelope variant ``d*`` replaces the objective by its upper
concave envelope evaluated at a pinned input law.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.optimize import linprog, minimize_scalar
from scipy.stats import chi2

from .errors import AlphabetTooLarge, Degenerate, OutOfRange, PreconditionViolated
from .measures import FiniteChannel, FiniteDistribution, enumerate_types, validate_and_build
from .rng import make_generator

__all__ = [
    "BlResult",
    "EnvelopeResult",
    "DStar",
    "ThetaOfR",
    "CondEntropyOfR",
    "GaussianDstar",
    "TypicalSetReport",
    "bl_objective",
    "bl_divergence_dual",
    "bl_dual_value",
    "bl_divergence_primal_oracle",
    "upper_hull",
    "upper_concave_envelope",
    "dstar_envelope",
    "gaussian_dstar_sideinfo",
    "gaussian_vartheta",
    "gaussian_vartheta_conjugate",
    "gaussian_sideinfo_rate_dual",
    "typical_set_discrete",
    "typical_set_gaussian",
    "chernoff_bernoulli",
    "chi_square_deviation",
    "sbl_typical_bound",
    "sbl_typical_bound_gaussian",
]


def _weights(mu) -> np.ndarray:
    if isinstance(mu, FiniteDistribution):
        w = mu.probs
    else:
        w = np.asarray(mu, dtype=float)
    if w.ndim != 1 or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise OutOfRange("reference weight must be a finite nonnegative vector")
    if w.sum() <= 0:
        raise Degenerate("reference weight has empty support")
    return w


def _xlogx_ratio(p: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """``sum_j p_j ln(p_j / ref_j)`` over the last axis, 0 ln 0 = 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * (np.log(p) - np.log(ref)), 0.0)
    return terms.sum(axis=-1)


def bl_objective(p_x: np.ndarray, mu, rows: np.ndarray, nu: np.ndarray, c: float) -> np.ndarray:
    """``c D(P W || nu) - D(P || mu)`` for one input law or a stack of them."""
    p_x = np.asarray(p_x, dtype=float)
    return c * _xlogx_ratio(p_x @ rows, nu) - _xlogx_ratio(p_x, _weights(mu))


@dataclass(frozen=True)
class BlResult:
    """Value and optimizer of a Brascamp-Lieb divergence computation."""

    value: float
    optimizer: Optional[FiniteDistribution]
    iterations: int
    converged: bool
    gap_vs_oracle: Optional[float] = None
    dual_value: Optional[float] = None
    dual_function: Optional[np.ndarray] = field(default=None, repr=False)


def bl_dual_value(f: np.ndarray, mu, rows: np.ndarray, nu: np.ndarray, c: float) -> float:
    """Dual objective ``ln mu(exp(c W ln f)) - c ln nu(f)`` at a positive ``f``."""
    w = _weights(mu)
    with np.errstate(divide="ignore"):
        log_f = np.log(f)
        inner = np.where(rows > 0, rows * log_f[None, :], 0.0).sum(axis=1)
        log_terms = np.where(w > 0, np.log(w) + c * inner, -np.inf)
    peak = log_terms.max()
    return float(peak + np.log(np.exp(log_terms - peak).sum()) - c * np.log(nu @ f))


def _mm_step(p_x, log_mu, rows, nu, c):
    q_y = p_x @ rows
    with np.errstate(divide="ignore", invalid="ignore"):
        log_f = np.log(q_y) - np.log(nu)
        inner = np.where(rows > 0, rows * log_f[None, :], 0.0).sum(axis=1)
    logits = log_mu + c * inner
    logits = np.where(np.isnan(logits), -np.inf, logits)
    logits -= logits.max()
    new = np.exp(logits)
    return new / new.sum()


def bl_divergence_dual(
    mu,
    channel: FiniteChannel,
    nu,
    c: float,
    restarts: int = 16,
    seed: int = 0,
    tol: float = 1e-11,
    max_iter: int = 10_000,
) -> BlResult:
    """Brascamp-Lieb divergence by the dual fixed-point iteration.

    Each step sets ``f = d(P W)/d nu`` and ``P ∝ mu exp(c W ln f)``. This
    is a minorize-maximize scheme, so the objective increases
    monotonically. Starts: ``mu`` normalized, every vertex of the simplex
    and ``restarts`` Dirichlet draws; the best end point wins with ties
    broken by start order.

    Examples
    --------
    Identity channel with ``mu = nu = Q``: the divergence is
    ``(c - 1) ln(1 / min Q)`` for ``c > 1``.

    >>> q = np.array([0.2, 0.8])
    >>> res = bl_divergence_dual(q, FiniteChannel.identity(2), q, 2.0)
    >>> round(res.value, 10) == round(np.log(5.0), 10)
    True
    """
    w = _weights(mu)
    nu = validate_and_build(nu).probs
    rows = channel.rows
    if w.size != channel.input_size or nu.size != channel.output_size:
        raise OutOfRange("alphabet sizes do not match the channel")
    if c < 0:
        raise OutOfRange("c must be nonnegative")
    live = w > 0
    if c > 0 and np.any(rows[live][:, nu == 0] > 0):
        return BlResult(np.inf, None, 0, True, dual_value=np.inf)

    with np.errstate(divide="ignore"):
        log_mu = np.log(w)
    k = w.size
    rng = make_generator(seed)
    starts = [w / w.sum()]
    starts += [np.eye(k)[i] for i in range(k) if live[i]]
    starts += list(rng.dirichlet(np.full(k, 0.5), size=restarts) * live)
    starts = [s / s.sum() for s in starts]

    best = None
    for start in starts:
        p = start
        value = float(bl_objective(p, w, rows, nu, c))
        converged = False
        it = 0
        for it in range(1, max_iter + 1):
            p_new = _mm_step(p, log_mu, rows, nu, c)
            new_value = float(bl_objective(p_new, w, rows, nu, c))
            step = abs(new_value - value)
            if new_value >= value:
                p, value = p_new, new_value
            if step < tol:
                converged = True
                break
        if best is None or value > best[0] + 1e-15:
            best = (value, p, it, converged)

    value, p, it, converged = best
    q_y = p @ rows
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(nu > 0, q_y / nu, 0.0)
    dual = bl_dual_value(np.maximum(f, 1e-300), w, rows, nu, c) if c > 0 else float(np.log(w.sum()))
    return BlResult(value, FiniteDistribution(p), it, converged, dual_value=dual, dual_function=f)


def _simplex_grid(k: int, resolution: int) -> np.ndarray:
    if k == 1:
        return np.ones((1, 1))
    if k == 2:
        s = np.linspace(0.0, 1.0, resolution + 1)
        return np.column_stack([s, 1.0 - s])
    if k == 3:
        i, j = np.triu_indices(resolution + 1)
        # a = i, b = j - i, rest = resolution - j
        a, b = i, j - i
        pts = np.column_stack([a, b, resolution - a - b]).astype(float) / resolution
        return pts
    raise AlphabetTooLarge("grid oracle supports input alphabets of size at most 3")


def _grid_max(points, w, rows, nu, c):
    vals = np.empty(points.shape[0])
    for lo in range(0, points.shape[0], 200_000):
        vals[lo : lo + 200_000] = bl_objective(points[lo : lo + 200_000], w, rows, nu, c)
    i = int(np.argmax(vals))
    return float(vals[i]), points[i]


def bl_divergence_primal_oracle(
    mu,
    channel: FiniteChannel,
    nu,
    c: float,
    grid_resolution: int = 2000,
    zoom_rounds: int = 4,
) -> BlResult:
    """Brute-force maximum of the primal objective over a simplex grid.

    After the global grid, ``zoom_rounds`` finer grids are laid over the
    two-cell neighbourhood of the incumbent, which resolves optima that
    sit close to a face of the simplex. Independent of the dual
    iteration; intended as a test oracle for input alphabets of size at
    most 3.
    """
    w = _weights(mu)
    nu = validate_and_build(nu).probs
    rows = channel.rows
    grid = _simplex_grid(w.size, grid_resolution)
    best, arg = _grid_max(grid, w, rows, nu, c)
    if w.size == 1:
        return BlResult(best, FiniteDistribution(arg), 1, True)
    half = 2.0 / grid_resolution
    side = 201 if w.size == 2 else 101
    evaluated = grid.shape[0]
    for _ in range(zoom_rounds):
        axes = [np.linspace(max(0.0, a - half), min(1.0, a + half), side) for a in arg[:-1]]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, w.size - 1)
        last = 1.0 - mesh.sum(axis=1)
        ok = last >= 0
        local = np.column_stack([mesh[ok], np.clip(last[ok], 0.0, None)])
        value, cand = _grid_max(local, w, rows, nu, c)
        evaluated += local.shape[0]
        if value > best:
            best, arg = value, cand
        half *= 2.0 / (side - 1)
    return BlResult(best, FiniteDistribution(arg), evaluated, True)


def upper_hull(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Indices of the upper convex hull of points with increasing ``xs`` (monotone chain)."""
    hull: list[int] = []
    for i in np.flatnonzero(np.isfinite(ys)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]) >= 0:
                hull.pop()
            else:
                break
        hull.append(int(i))
    return np.array(hull, dtype=int)


def upper_concave_envelope(xs: np.ndarray, ys: np.ndarray, x0: float, tol: float = 1e-13):
    """Upper concave envelope of the points ``(xs, ys)`` evaluated at ``x0``.

    Uses ``env(x0) = min_s max_i y_i - s (x_i - x0)`` and bisects on the
    slope ``s`` until the two maximizers straddle ``x0`` and their chord
    matches the dual value to ``tol``. Each step is one vectorized pass,
    so this scales to dense grids where almost every point is a hull
    vertex. :func:`upper_hull` gives the full hull for cross-checks.

    Returns
    -------
    value : float
    indices : tuple of int
        Supporting points bracketing ``x0`` (one index if ``x0`` is one).
    weights : tuple of float
        Convex weights on those points reproducing ``x0``.
    """
    finite = np.flatnonzero(np.isfinite(ys))
    x, y = xs[finite], ys[finite]
    if x0 < x.min() or x0 > x.max():
        raise OutOfRange("evaluation point outside the hull")
    on = np.flatnonzero(x == x0)
    if x.size == 1 or (on.size and (x0 == x.min() or x0 == x.max())):
        j = on[np.argmax(y[on])]
        return float(y[j]), (int(finite[j]),), (1.0,)

    def arg(slope):
        return int(np.argmax(y - slope * (x - x0)))

    spread = max(float(np.ptp(y)), 1.0)
    gaps = np.diff(np.sort(x))
    bound = 2.0 * spread / max(float(gaps[gaps > 0].min()), 1e-300)
    lo, hi = -bound, bound  # maximizer right of x0 at lo, left of x0 at hi
    value = None
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        j = arg(mid)
        if x[j] == x0:
            return float(y[j]), (int(finite[j]),), (1.0,)
        if x[j] > x0:
            lo = mid
        else:
            hi = mid
        left, right = arg(hi), arg(lo)
        lam = (x[right] - x0) / (x[right] - x[left])
        chord = lam * y[left] + (1.0 - lam) * y[right]
        dual = min(np.max(y - lo * (x - x0)), np.max(y - hi * (x - x0)))
        value = (chord, left, right, lam)
        if dual - chord <= tol * max(1.0, abs(chord)) or hi - lo <= 1e-15 * max(1.0, abs(hi)):
            break
    chord, left, right, lam = value
    return float(chord), (int(finite[left]), int(finite[right])), (float(lam), float(1.0 - lam))


@dataclass(frozen=True)
class DStar:
    """Envelope of ``c D(P W || nu) - D(P || Q_X)`` at ``Q_X``."""


@dataclass(frozen=True)
class ThetaOfR:
    """``sup {I(U;Y) : I(U;X) <= rate}`` over ``U - X - Y`` with ``P_X = Q_X``."""

    rate: float


@dataclass(frozen=True)
class CondEntropyOfR:
    """``inf {H(Y|U) : I(U;X) <= rate}``."""

    rate: float


EnvelopeMode = Union[DStar, ThetaOfR, CondEntropyOfR]


@dataclass(frozen=True)
class EnvelopeResult:
    """Envelope value with a witnessing decomposition ``sum_u w_u P_{X|U=u} = Q_X``."""

    value: float
    weights: np.ndarray
    components: np.ndarray
    lower_bound_only: bool
    multiplier: Optional[float] = None

    @property
    def cardinality(self) -> int:
        return int(self.weights.size)


BINARY_GRID = 100_000
SEARCH_CANDIDATES = 4000


class _EnvelopeSolver:
    """Concave envelope of a pointwise objective over the input simplex at ``Q_X``."""

    def __init__(self, q_x: np.ndarray, seed: int = 0):
        self.q_x = q_x
        k = q_x.size
        self.binary = k == 2
        if self.binary:
            s = np.linspace(0.0, 1.0, BINARY_GRID + 1)
            self.points = np.column_stack([s, 1.0 - s])
        else:
            rng = make_generator(seed)
            cands = [np.eye(k), q_x[None, :]]
            for conc in (0.1, 0.3, 1.0, 3.0):
                cands.append(rng.dirichlet(np.full(k, conc), size=SEARCH_CANDIDATES // 4))
            # perturbations of Q_X along random lines, which the hull needs near Q_X
            dirs = rng.dirichlet(np.ones(k), size=SEARCH_CANDIDATES // 4)
            mix = rng.uniform(0.0, 1.0, size=(SEARCH_CANDIDATES // 4, 1))
            cands.append(mix * dirs + (1 - mix) * q_x[None, :])
            self.points = np.vstack(cands)

    def solve(self, values: np.ndarray) -> EnvelopeResult:
        if self.binary:
            value, idx, wts = upper_concave_envelope(self.points[:, 0], values, self.q_x[0])
            return EnvelopeResult(value, np.array(wts), self.points[list(idx)], False)
        finite = np.isfinite(values)
        pts, vals = self.points[finite], values[finite]
        res = linprog(-vals, A_eq=pts.T, b_eq=self.q_x, bounds=(0, None), method="highs")
        if res.status != 0:
            raise PreconditionViolated(f"envelope search failed: {res.message}")
        keep = res.x > 1e-12
        wts = res.x[keep] / res.x[keep].sum()
        comps = pts[keep]
        return EnvelopeResult(float(wts @ vals[keep]), wts, comps, True)


def dstar_envelope(q_x, channel: FiniteChannel, nu, c: float, mode: EnvelopeMode = DStar(), seed: int = 0) -> EnvelopeResult:
    """Envelope quantities with the input marginal pinned to ``q_x``.

    Parameters
    ----------
    mode : DStar, ThetaOfR or CondEntropyOfR
        ``DStar()`` returns ``d*(Q_X, W, nu, c)``. ``ThetaOfR(R)`` and
        ``CondEntropyOfR(R)`` ignore ``nu`` and ``c`` and return the
        rate functions at ``R``; they are evaluated by Lagrangian duality
        over ``lambda`` in ``[0, 1]``, which is exact because both are
        concave (convex) in ``R``.

    Notes
    -----
    Binary inputs use a 1e5-point grid and an exact upper hull. Larger
    input alphabets use a seeded random candidate set and a linear
    program, so the result is a lower bound on the envelope and is
    flagged ``lower_bound_only``.
    """
    q = validate_and_build(q_x).probs
    rows = channel.rows
    if q.size != channel.input_size:
        raise OutOfRange("input law has the wrong alphabet size")
    solver = _EnvelopeSolver(q, seed)
    pts = solver.points
    div_x = _xlogx_ratio(pts, q)
    if np.any(q == 0):
        div_x = np.where(np.any((pts > 0) & (q == 0), axis=1), np.inf, div_x)

    if isinstance(mode, DStar):
        nu = validate_and_build(nu).probs
        out = bl_objective_envelope_values(pts, rows, nu, c, div_x)
        return solver.solve(out)

    if not isinstance(mode, (ThetaOfR, CondEntropyOfR)):
        raise OutOfRange(f"unknown envelope mode {mode!r}")
    rate = float(mode.rate)
    if rate < 0:
        raise OutOfRange("rate must be nonnegative")
    q_y = q @ rows
    div_y = _xlogx_ratio(pts @ rows, q_y)

    def lagrangian(lam: float) -> tuple[float, EnvelopeResult]:
        env = solver.solve(div_y - lam * div_x)
        return env.value + lam * rate, env

    cands = [(lam, *lagrangian(lam)) for lam in (0.0, 1.0)]
    if rate > 0:
        opt = minimize_scalar(lambda l: lagrangian(l)[0], bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
        cands.append((float(opt.x), *lagrangian(float(opt.x))))
    lam, theta, env = min(cands, key=lambda z: z[1])
    if isinstance(mode, CondEntropyOfR):
        h_y = float(-(q_y[q_y > 0] * np.log(q_y[q_y > 0])).sum())
        theta = h_y - theta
    return EnvelopeResult(float(theta), env.weights, env.components, env.lower_bound_only, lam)


def bl_objective_envelope_values(pts, rows, nu, c, div_x):
    return c * _xlogx_ratio(pts @ rows, nu) - div_x


class GaussianDstar(NamedTuple):
    value: float
    sigma_sq: float


def gaussian_dstar_sideinfo(rho: float, distortion: float, c: float) -> GaussianDstar:
    """Closed-form envelope for Gaussian source coding with side information.

    ``sup_{0 <= s <= 1} 1/2 ln s - c/2 ln((1 - rho^2 + rho^2 s) / D)``,
    attained at ``s = (1 - rho^2) / (rho^2 (c - 1))`` clipped to ``[0, 1]``
    (``s = 1`` when ``c <= 1`` or ``rho = 0``).
    """
    if not -1.0 < rho < 1.0:
        raise OutOfRange("rho must lie in (-1, 1)")
    if distortion <= 0 or c <= 0:
        raise OutOfRange("distortion and c must be positive")
    r2 = rho * rho
    if c <= 1.0 or r2 == 0.0:
        s = 1.0
    else:
        s = min(1.0, (1.0 - r2) / (r2 * (c - 1.0)))
    value = 0.5 * np.log(s) - 0.5 * c * np.log((1.0 - r2 + r2 * s) / distortion)
    return GaussianDstar(float(value), float(s))


def gaussian_vartheta(x, rho: float, distortion: float):
    """``ln((1 - rho^2 + rho^2 e^{-x}) / D)`` for ``x >= 0``."""
    r2 = rho * rho
    return np.log((1.0 - r2 + r2 * np.exp(-np.asarray(x, dtype=float))) / distortion)


def gaussian_vartheta_conjugate(y: float, rho: float, distortion: float) -> float:
    """Convex conjugate ``sup_{x >= 0} x y - vartheta(x)``."""
    r2 = rho * rho
    a = 1.0 - r2
    if y > 0:
        return np.inf
    if y == 0.0:
        return float(-np.log(a / distortion))
    # in s = e^{-x}: stationary point of -y ln s - ln(a + r2 s)
    s = 1.0 if (y <= -1.0 or r2 == 0.0) else min(1.0, -y * a / (r2 * (1.0 + y)))
    return float(-y * np.log(s) - np.log((a + r2 * s) / distortion))


def gaussian_sideinfo_rate_dual(rho: float, distortion: float, rate: float) -> float:
    """``-inf_{c >= 1} (1/c) (d*_G(c) + rate)`` evaluated numerically.

    This optimizes over ``lambda = 1/c`` in ``[0, 1]``, using the
    ``lambda -> 0`` limit of ``lambda d*_G(1/lambda)`` at the endpoint, and
    gives the per-letter first-order term of the side-information
    converse by the dual route.
    """
    r2 = rho * rho
    a = 1.0 - r2
    if rate == np.inf:
        return float(0.5 * np.log(a / distortion))

    def scaled(lam: float) -> float:
        if lam <= 0.0:
            return -0.5 * np.log(a / distortion)
        return lam * gaussian_dstar_sideinfo(rho, distortion, 1.0 / lam).value + lam * rate

    opt = minimize_scalar(scaled, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    best = min(scaled(0.0), scaled(1.0), scaled(float(opt.x)))
    return float(-best)


@dataclass(frozen=True, eq=False)
class TypicalSetReport:
    """Typical set description: slack parameter, exact mass and membership test."""

    slack: float
    mass: float
    n: int
    delta: float
    kind: str
    reference: Optional[np.ndarray] = None

    def contains(self, x: np.ndarray) -> np.ndarray:
        """Membership of sequences given as rows of an integer (or real) array."""
        x = np.atleast_2d(x)
        if self.kind == "discrete":
            k = self.reference.size
            counts = np.stack([(x == a).sum(axis=1) for a in range(k)], axis=1)
            return np.all(counts <= (1.0 + self.slack) * self.n * self.reference[None, :], axis=1)
        stat = (x**2).sum(axis=1) / self.reference[0] ** 2
        return np.abs(stat - self.n) <= self.slack * np.sqrt(self.n)


def typical_set_discrete(q_x, delta: float, n: int) -> TypicalSetReport:
    """Upper-typical set ``{x^n : type(x^n) <= (1 + eps_n) Q_X}``.

    ``eps_n = sqrt(3 beta ln(|X|/delta) / n)`` with ``beta = 1/min Q_X``;
    requires ``n > 3 beta ln(|X|/delta)`` so that ``eps_n < 1``. The mass
    is computed exactly by summing over types.
    """
    q = validate_and_build(q_x).probs
    if not 0.0 < delta < 1.0:
        raise OutOfRange("delta must lie in (0, 1)")
    beta = 1.0 / q.min() if q.min() > 0 else np.inf
    need = 3.0 * beta * np.log(q.size / delta)
    if not n > need:
        raise PreconditionViolated(f"n = {n} must exceed 3 beta ln(|X|/delta) = {need:.4g}")
    eps = float(np.sqrt(need / n))
    counts, log_mult = enumerate_types(n, q.size)
    ok = np.all(counts <= (1.0 + eps) * n * q[None, :] * (1 + 1e-12), axis=1)
    log_mass = log_mult[ok] + counts[ok] @ np.log(q)
    mass = float(np.exp(log_mass).sum())
    return TypicalSetReport(eps, mass, n, delta, "discrete", q)


def typical_set_gaussian(sigma: float, delta: float, n: int) -> TypicalSetReport:
    """Shell ``| ||x||^2/sigma^2 - n | <= A sqrt(n)`` with ``A = sqrt(6 ln(2/delta))``.

    Requires ``n >= 20 ln(2/delta)``; the mass comes from the chi-square
    distribution function.
    """
    if not 0.0 < delta < 1.0:
        raise OutOfRange("delta must lie in (0, 1)")
    need = 20.0 * np.log(2.0 / delta)
    if n < need:
        raise PreconditionViolated(f"n = {n} must be at least 20 ln(2/delta) = {need:.4g}")
    a = float(np.sqrt(6.0 * np.log(2.0 / delta)))
    half = a * np.sqrt(n)
    mass = float(chi2.cdf(n + half, n) - chi2.cdf(max(n - half, 0.0), n))
    return TypicalSetReport(a, mass, n, delta, "gaussian", np.array([float(sigma)]))


def chernoff_bernoulli(p: float, eps: float, n: int) -> float:
    """Bound ``exp(-min(eps^2, eps) n p / 3)`` on ``P[Bin(n, p) >= (1 + eps) n p]``."""
    if not 0.0 <= p <= 1.0 or eps < 0 or n < 0:
        raise OutOfRange("need p in [0, 1], eps >= 0, n >= 0")
    return float(np.exp(-min(eps * eps, eps) * n * p / 3.0))


def chi_square_deviation(n: int, t: float) -> tuple[float, float]:
    """Threshold ``2 sqrt(n t) + 2 t`` and bound ``2 e^{-t}`` on ``P[|chi2_n - n| >= threshold]``."""
    if n < 1 or t < 0:
        raise OutOfRange("need n >= 1 and t >= 0")
    return float(2.0 * np.sqrt(n * t) + 2.0 * t), float(2.0 * np.exp(-t))


def sbl_typical_bound(q_x, channel: FiniteChannel, nu, c: float, n: int, delta: float, dstar: Optional[float] = None) -> float:
    """Divergence bound after restricting ``Q_X^n`` to its typical set.

    ``n d* + ln(alpha_Y^c beta^{c+1}) sqrt(3 n beta ln(|X|/delta))`` with
    ``alpha_Y = ||Q_Y / nu||_inf`` and ``beta = 1/min Q_X``.
    """
    q = validate_and_build(q_x).probs
    nu_p = validate_and_build(nu).probs
    beta = 1.0 / q.min()
    if not n > 3.0 * beta * np.log(q.size / delta):
        raise PreconditionViolated("n too small for the typical-set restriction")
    if dstar is None:
        dstar = dstar_envelope(q, channel, nu_p, c).value
    q_y = q @ channel.rows
    with np.errstate(divide="ignore"):
        alpha_y = float(np.max(np.where(q_y > 0, q_y / nu_p, 0.0)))
    slack = np.log(alpha_y**c * beta ** (c + 1.0)) * np.sqrt(3.0 * n * beta * np.log(q.size / delta))
    return float(n * dstar + slack)


def sbl_typical_bound_gaussian(n: int, delta: float, dstar: float) -> float:
    """Gaussian analogue: ``n d* + sqrt(6 n ln(2/delta))``."""
    if n < 20.0 * np.log(2.0 / delta):
        raise PreconditionViolated("n too small for the Gaussian shell restriction")
    return float(n * dstar + np.sqrt(6.0 * n * np.log(2.0 / delta)))
