"""Converse bounds for binary hypothesis testing, Fano-type bounds and
image-size bounds, each returned with its first/second-order split.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .bldiv import bl_divergence_dual, typical_set_discrete
from .errors import AlphaInfinite, OutOfRange, PreconditionViolated
from .infocalc import divergence_stats, gaussian_q_inverse, llr_distribution
from .measures import FiniteChannel, apply_along_axes, density_ratio_bound, validate_and_build
from .rng import make_generator

__all__ = [
    "BOUNDARY_TOL",
    "BoundReport",
    "AchievabilityReport",
    "BlowupNumbers",
    "FanoVariant",
    "ImageSizeVariant",
    "SoundnessReport",
    "error_log_term",
    "weak_bht",
    "blowup_bht",
    "blowup_bht_at",
    "smoothing_bht",
    "smoothing_bht_at",
    "strassen_reference",
    "bht_converse_suite",
    "bht_achievability",
    "blowup_lemma_numbers",
    "fano_bound",
    "image_size_bound",
    "soundness_check_image_size",
]

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class BoundReport:
    """A bound split as ``total = first_order + second_order + constant``.

    ``first_order`` is the term linear in ``n`` (already multiplied),
    ``second_order`` the ``sqrt(n)``-type term. ``is_bound`` is False for
    reference curves that are not finite-``n`` guarantees.
    """

    name: str
    total: float
    first_order: float
    second_order: float
    constant: float
    params: dict = field(default_factory=dict)
    preconditions_ok: bool = True
    reasons: tuple = ()
    is_bound: bool = True

    @classmethod
    def build(cls, name, first, second, const, **kw) -> "BoundReport":
        return cls(name, float(first + second + const), float(first), float(second), float(const), **kw)

    @classmethod
    def unavailable(cls, name: str, reason: str, **params) -> "BoundReport":
        return cls(name, np.inf, np.inf, 0.0, 0.0, params, False, (reason,))


def error_log_term(eps: float) -> float:
    """``ln(1/(1 - eps))`` with the boundary guard applied."""
    if not BOUNDARY_TOL < eps < 1.0 - BOUNDARY_TOL:
        raise OutOfRange(f"eps = {eps!r} must lie strictly inside (0, 1)")
    return float(-np.log1p(-eps))


def _eta_log_term(eta: float) -> float:
    if not BOUNDARY_TOL < eta <= 1.0:
        raise OutOfRange(f"eta = {eta!r} must lie in (0, 1]")
    return float(-np.log(eta))


def weak_bht(n: int, divergence: float, eps: float) -> BoundReport:
    """``(n D + ln 2) / (1 - eps)`` from data processing."""
    error_log_term(eps)
    return BoundReport.build("weak", n * divergence / (1 - eps), 0.0, np.log(2) / (1 - eps))


def blowup_bht_at(n: int, divergence: float, eps: float, k_ratio: float, radius) -> np.ndarray:
    """Blow-up bound evaluated at given integer radii (vectorized)."""
    r = np.asarray(radius, dtype=float)
    boost = -np.expm1(-(r * r) / n)
    return (n * divergence + np.log(2)) / boost + r * np.log(k_ratio * np.e * n / r)


def blowup_bht(n: int, divergence: float, eps: float, k_ratio: float) -> BoundReport:
    """Blow-up converse minimized over integer radii.

    The radius ranges over ``ceil(3 sqrt(n ln(1/(1-eps)))) <= r <= n``; if
    the lower end exceeds ``n`` only ``r = n`` is used.
    """
    big_l = error_log_term(eps)
    r_min = int(np.ceil(3.0 * np.sqrt(n * big_l)))
    radii = np.arange(min(r_min, n), n + 1)
    values = blowup_bht_at(n, divergence, eps, k_ratio, radii)
    i = int(np.argmin(values))  # argmin keeps the smallest radius on ties
    total = float(values[i])
    first = n * divergence
    return BoundReport.build(
        "blowup", first, total - first, 0.0,
        params={"r_star": int(radii[i]), "r_min": r_min, "k_ratio": k_ratio},
    )


def smoothing_bht_at(n: int, divergence: float, alpha: float, eps: float, t: float) -> float:
    """``n D + (1/t + 1) ln(1/(1-eps)) + (alpha - 1) n t`` at a given time."""
    big_l = error_log_term(eps)
    return float(n * divergence + (1.0 / t + 1.0) * big_l + (alpha - 1.0) * n * t)


def smoothing_bht(n: int, divergence: float, alpha: float, eps: float) -> BoundReport:
    """Semigroup converse at the optimal time ``t* = sqrt(L / ((alpha - 1) n))``."""
    if not np.isfinite(alpha):
        raise AlphaInfinite("dP/dQ is unbounded")
    big_l = error_log_term(eps)
    if alpha <= 1.0:
        # P = Q: the time can be sent to infinity
        return BoundReport.build("smoothing", n * divergence, 0.0, big_l, params={"t_star": np.inf, "alpha": alpha})
    t_star = float(np.sqrt(big_l / ((alpha - 1.0) * n)))
    second = 2.0 * np.sqrt(big_l) * np.sqrt(n * (alpha - 1.0))
    return BoundReport.build("smoothing", n * divergence, second, big_l, params={"t_star": t_star, "alpha": alpha})


def strassen_reference(n: int, divergence: float, variance: float, eps: float) -> BoundReport:
    """Second-order normal approximation ``n D + Q^{-1}(1-eps) sqrt(n V)``; not a bound."""
    error_log_term(eps)
    second = gaussian_q_inverse(1.0 - eps) * np.sqrt(n * variance)
    return BoundReport.build("strassen_ref", n * divergence, second, 0.0, is_bound=False, reasons=("asymptotic expansion",))


def bht_converse_suite(p, q, n: int, eps: float) -> dict[str, BoundReport]:
    """All converse bounds on ``ln(1/pi_{P|Q})`` subject to ``pi_{Q|P} <= eps``.

    Returns a map with keys ``weak``, ``blowup``, ``smoothing`` and
    ``strassen_ref``. A bound whose hypothesis fails is returned through
    :meth:`BoundReport.unavailable` with the reason recorded.
    """
    p = validate_and_build(p)
    q = validate_and_build(q)
    if n < 1:
        raise OutOfRange("block length must be positive")
    d, v, alpha = divergence_stats(p, q)
    out = {"weak": weak_bht(n, d, eps)}
    if q.min_mass > 0:
        out["blowup"] = blowup_bht(n, d, eps, q.size / q.min_mass)
    else:
        out["blowup"] = BoundReport.unavailable("blowup", "Q has a zero atom")
    if np.isfinite(alpha):
        out["smoothing"] = smoothing_bht(n, d, alpha, eps)
    else:
        out["smoothing"] = BoundReport.unavailable("smoothing", "AlphaInfinite")
    if np.isfinite(v):
        out["strassen_ref"] = strassen_reference(n, d, v, eps)
    else:
        out["strassen_ref"] = BoundReport.unavailable("strassen_ref", "infinite divergence")
    return out


@dataclass(frozen=True)
class AchievabilityReport:
    threshold: float
    type1: float
    type2: float
    log_type2: float
    chernoff_type2: float


def bht_achievability(p, q, n: int, eps: float) -> AchievabilityReport:
    """Deterministic likelihood-ratio test ``{llr >= gamma}`` with type-I error at most ``eps``.

    ``gamma`` is the largest atom of the log-likelihood ratio for which
    ``P[llr >= gamma] >= 1 - eps``; both error probabilities are exact.
    ``chernoff_type2 = e^{-gamma}`` upper-bounds ``type2``.
    """
    error_log_term(eps)
    dist = llr_distribution(p, q, n)
    p_mass = np.exp(dist.log_p)
    upper_tail = np.cumsum(p_mass[::-1])[::-1]
    ok = np.flatnonzero(upper_tail >= 1.0 - eps - 1e-14)
    i = int(ok[-1])
    type1 = float(p_mass[:i].sum())
    log_type2 = float(logsumexp(dist.log_q[i:]))
    gamma = float(dist.llr[i])
    return AchievabilityReport(gamma, type1, float(np.exp(log_type2)), log_type2, float(np.exp(-gamma)))


@dataclass(frozen=True)
class BlowupNumbers:
    radius: float
    guarantee: float
    counting_lower: Optional[float]
    counting_upper: float = 0.0


def blowup_lemma_numbers(
    p_a: Optional[float] = None,
    c: float = 1.0,
    n: int = 1,
    k_ratio: Optional[float] = None,
    log_inv_p_a: Optional[float] = None,
) -> BlowupNumbers:
    """Radius and guarantees of the blowing-up lemma for a set of mass ``p_a``.

    ``r = sqrt(n/2) (sqrt(ln(1/P[A])) + c)`` makes ``P[A_r] >= 1 - e^{-c^2}``.
    With ``k_ratio = |Y| / min P`` the counting bound gives
    ``r ln(r / (n e K)) <= ln(P[A] / P[A_r]) <= 0``. Pass ``log_inv_p_a``
    directly to avoid rounding in ``ln(1/P[A])``.

    Examples
    --------
    >>> blowup_lemma_numbers(c=10.0, n=5e9, log_inv_p_a=100.0).radius
    1000000.0
    """
    if log_inv_p_a is None:
        if p_a is None or not 0.0 < p_a <= 1.0:
            raise OutOfRange("P[A] must lie in (0, 1]")
        log_inv_p_a = -np.log(p_a)
    if c <= 0 or n <= 0:
        raise OutOfRange("need c > 0 and n > 0")
    radius = float(np.sqrt(n / 2.0) * (np.sqrt(log_inv_p_a) + c))
    lower = None
    if k_ratio is not None:
        lower = float(radius * np.log(radius / (n * np.e * k_ratio)))
    return BlowupNumbers(radius, float(1.0 - np.exp(-c * c)), lower)


class FanoVariant(Enum):
    WEAK = "weak"
    DISCRETE_SMOOTHING = "discrete_smoothing"
    GAUSSIAN = "gaussian"


def fano_bound(mutual_info: float, n: int, eps: float, variant: FanoVariant, alpha: Optional[float] = None) -> BoundReport:
    """Upper bounds on ``ln M`` for ``M`` messages decoded with error ``eps``.

    ``mutual_info`` is the ``n``-letter mutual information. The discrete
    variant needs ``alpha = sup dQ_{Y|X=x}/d nu``.
    """
    big_l = error_log_term(eps)
    variant = FanoVariant(variant)
    if variant is FanoVariant.WEAK:
        return BoundReport.build("fano_weak", mutual_info / (1 - eps), 0.0, np.log(2) / (1 - eps))
    if variant is FanoVariant.DISCRETE_SMOOTHING:
        if alpha is None or not np.isfinite(alpha):
            raise AlphaInfinite("the discrete variant needs a finite alpha")
        second = 2.0 * np.sqrt(big_l) * np.sqrt(n * (alpha - 1.0))
        return BoundReport.build("fano_discrete", mutual_info, second, big_l, params={"alpha": alpha})
    second = np.sqrt(2.0 * big_l) * np.sqrt(n)
    return BoundReport.build("fano_gaussian", mutual_info, second, big_l)


class ImageSizeVariant(Enum):
    """Which image-size bound to evaluate.

    ``DISCRETE``: ``d + 2c sqrt(l) sqrt(n (alpha - 1)) + c l`` with
    ``l = ln(1/eta)`` and ``d`` the ``n``-letter divergence.
    ``DISCRETE_TYPICAL``: ``n d* + A sqrt(n) + c l`` after restricting to
    the typical set. ``DISCRETE_TYPICAL_TIME``: same restriction before
    optimizing the semigroup time ``t``. ``GAUSSIAN`` and
    ``GAUSSIAN_TYPICAL``: Ornstein-Uhlenbeck analogues.
    """

    DISCRETE = "discrete"
    DISCRETE_TYPICAL = "discrete_typical"
    DISCRETE_TYPICAL_TIME = "discrete_typical_time"
    GAUSSIAN = "gaussian"
    GAUSSIAN_TYPICAL = "gaussian_typical"


def image_size_bound(
    variant: ImageSizeVariant,
    *,
    n: int,
    c: float,
    eta: float = 1.0,
    d: Optional[float] = None,
    dstar: Optional[float] = None,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    x_size: Optional[int] = None,
    delta: Optional[float] = None,
    t: Optional[float] = None,
) -> BoundReport:
    """Bound on ``ln mu[Q(f) >= eta] - c ln nu(f)`` uniformly over ``f``.

    Required keywords per variant: ``DISCRETE`` needs ``d`` and
    ``alpha``; ``DISCRETE_TYPICAL`` needs ``dstar, alpha, beta, x_size,
    delta``; ``DISCRETE_TYPICAL_TIME`` swaps ``eta`` for ``t``;
    ``GAUSSIAN`` needs ``d``; ``GAUSSIAN_TYPICAL`` needs ``dstar`` and
    ``delta``.
    """
    variant = ImageSizeVariant(variant)
    if c <= 0 or n < 1:
        raise OutOfRange("need c > 0 and n >= 1")
    el = _eta_log_term(eta) if variant is not ImageSizeVariant.DISCRETE_TYPICAL_TIME else 0.0
    params = {"variant": variant.value, "c": c, "n": n}

    def require(**kw):
        missing = [k for k, v in kw.items() if v is None]
        if missing:
            raise OutOfRange(f"{variant.value} bound needs {', '.join(missing)}")

    if variant is ImageSizeVariant.DISCRETE:
        require(d=d, alpha=alpha)
        second = 2.0 * c * np.sqrt(el) * np.sqrt(n * (alpha - 1.0))
        return BoundReport.build("image_size", d, second, c * el, params=params)
    if variant is ImageSizeVariant.GAUSSIAN:
        require(d=d)
        return BoundReport.build("image_size", d, c * np.sqrt(2.0 * n * el), c * el, params=params)
    if variant is ImageSizeVariant.GAUSSIAN_TYPICAL:
        require(dstar=dstar, delta=delta)
        if n < 20.0 * np.log(2.0 / delta):
            raise PreconditionViolated("need n >= 20 ln(2/delta)")
        second = np.sqrt(6.0 * n * np.log(2.0 / delta)) + c * np.sqrt(2.0 * n * el)
        return BoundReport.build("image_size", n * dstar, second, c * el, params=params)

    require(dstar=dstar, alpha=alpha, beta=beta, x_size=x_size, delta=delta)
    typical_log = np.log(x_size / delta)
    if not n > 3.0 * beta * typical_log:
        raise PreconditionViolated("need n > 3 beta ln(|X|/delta)")
    restriction = np.log(alpha**c * beta ** (c + 1.0))
    if variant is ImageSizeVariant.DISCRETE_TYPICAL:
        coef = restriction * np.sqrt(3.0 * beta * typical_log) + 2.0 * c * np.sqrt((alpha - 1.0) * el)
        params["A"] = float(coef)
        return BoundReport.build("image_size", n * dstar, coef * np.sqrt(n), c * el, params=params)
    require(t=t)
    second = c * (alpha - 1.0) * n * t + restriction * np.sqrt(3.0 * n * beta * typical_log)
    return BoundReport.build("image_size", n * dstar, second, 0.0, params=params)


@dataclass(frozen=True)
class SoundnessReport:
    trials: int
    informative: int
    violations: int
    max_excess: float
    bound_name: str


def _random_test_function(rng, shape) -> np.ndarray:
    kind = rng.integers(4)
    if kind == 0:
        return rng.uniform(size=shape)
    if kind == 1:
        return (rng.uniform(size=shape) < rng.uniform(0.05, 0.95)).astype(float)
    if kind == 2:
        return rng.uniform(size=shape) ** rng.uniform(2.0, 12.0)
    f = np.full(shape, 1e-3)
    f.reshape(-1)[rng.integers(f.size)] = 1.0
    return f


def soundness_check_image_size(
    channel: FiniteChannel,
    nu,
    c: float,
    n: int,
    eta: Optional[float] = None,
    trials: int = 1000,
    seed: int = 0,
    variant: ImageSizeVariant = ImageSizeVariant.DISCRETE,
    q_x=None,
    delta: float = 0.1,
    slack: float = 1e-9,
) -> SoundnessReport:
    """Randomized certification of an image-size bound on ``X^n``.

    Each trial draws ``f: Y^n -> [0, 1]`` and, for ``DISCRETE``, a random
    sub-probability ``mu`` on ``X^n`` whose ``n``-letter divergence is
    computed by :func:`bl_divergence_dual`. For ``DISCRETE_TYPICAL`` the
    measure is ``Q_X^n`` restricted to its typical set. ``eta=None``
    draws a fresh threshold per trial. A violation is
    ``LHS > bound + slack``; trials with an empty event are counted as
    uninformative.
    """
    variant = ImageSizeVariant(variant)
    nu_p = validate_and_build(nu).probs
    ratio = density_ratio_bound(channel, nu_p)
    if not ratio.finite:
        raise AlphaInfinite("channel is not dominated by nu")
    kx, ky = channel.input_size, channel.output_size
    nu_n = nu_p
    for _ in range(n - 1):
        nu_n = np.kron(nu_n, nu_p)
    big = channel.power(n)

    fixed_mu = None
    if variant is ImageSizeVariant.DISCRETE_TYPICAL:
        from .bldiv import dstar_envelope

        q = validate_and_build(q_x).probs
        typ = typical_set_discrete(q, delta, n)
        seqs = np.array(np.unravel_index(np.arange(kx**n), (kx,) * n)).T
        inside = typ.contains(seqs)
        q_n = q
        for _ in range(n - 1):
            q_n = np.kron(q_n, q)
        fixed_mu = np.where(inside, q_n, 0.0)
        dstar = dstar_envelope(q, channel, nu_p, c).value
        beta = 1.0 / q.min()
    elif variant is not ImageSizeVariant.DISCRETE:
        raise OutOfRange("only discrete variants can be certified exhaustively")

    rng = make_generator(seed)
    violations = informative = 0
    worst = -np.inf
    for _ in range(trials):
        f = _random_test_function(rng, (ky,) * n)
        level = float(rng.uniform(0.05, 1.0)) if eta is None else eta
        image = apply_along_axes(f, [channel.rows] * n).reshape(-1)
        if fixed_mu is None:
            mu = rng.dirichlet(np.full(kx**n, rng.choice([0.2, 1.0, 5.0]))) * rng.uniform(0.05, 1.0)
            d = bl_divergence_dual(mu, big, nu_n, c, restarts=8).value
            rep = image_size_bound(variant, n=n, c=c, eta=level, d=d, alpha=ratio.alpha)
        else:
            mu = fixed_mu
            rep = image_size_bound(
                variant, n=n, c=c, eta=level, dstar=dstar, alpha=ratio.alpha, beta=beta, x_size=kx, delta=delta
            )
        mass = mu[image >= level].sum()
        if mass <= 0:
            continue
        informative += 1
        lhs = np.log(mass) - c * np.log(nu_n @ f.reshape(-1))
        excess = lhs - rep.total
        worst = max(worst, float(excess))
        if excess > slack:
            violations += 1
    return SoundnessReport(trials, informative, violations, worst, variant.value)
