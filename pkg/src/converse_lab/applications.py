"""Second-order converses for channel coding, broadcast channels,
hypothesis testing under communication constraints and source coding
with side information.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .bldiv import CondEntropyOfR, ThetaOfR, dstar_envelope, gaussian_sideinfo_rate_dual
from .bounds import BoundReport, error_log_term
from .errors import GridTooCoarse, OutOfRange, PreconditionViolated
from .infocalc import mutual_information, mutual_information_and_capacity
from .measures import FiniteChannel, GaussianPair, validate_and_build
from .rng import make_generator

__all__ = [
    "RegionPoint",
    "channel_coding_converse",
    "output_distribution_gap",
    "gaussian_broadcast_region",
    "discrete_broadcast_region",
    "region_upper_hull",
    "is_degraded",
    "ht_communication_converse",
    "side_info_converse_discrete",
    "side_info_converse_gaussian",
    "gaussian_sideinfo_first_order",
]


def channel_coding_converse(channel: FiniteChannel, n: int, eps: float) -> BoundReport:
    """Upper bound on ``ln M`` under maximal error ``eps``.

    ``n C + 2 sqrt(|Y| L) sqrt(n) + L`` with ``L = ln(1/(1-eps))``, using
    the uniform output law as reference. ``params["tight_total"]`` uses
    the exact density ratio against the uniform law instead of ``|Y|``.
    """
    big_l = error_log_term(eps)
    cap = mutual_information_and_capacity(channel)
    ky = channel.output_size
    alpha_uniform = float(channel.rows.max() * ky)
    second = 2.0 * np.sqrt(ky * big_l) * np.sqrt(n)
    tight = n * cap.capacity + 2.0 * np.sqrt((alpha_uniform - 1.0) * big_l * n) + big_l
    return BoundReport.build(
        "channel_coding",
        n * cap.capacity,
        second,
        big_l,
        params={"capacity": cap.capacity, "alpha_uniform": alpha_uniform, "tight_total": float(tight)},
    )


def output_distribution_gap(channel: FiniteChannel, ln_m: float, n: int, eps: float) -> BoundReport:
    """Bound on ``D(P_{Y^n} || Q*_{Y^n})`` for a code with ``ln M`` nats.

    ``n C - ln M + 2 sqrt(|Y| L) sqrt(n) + L``, clamped at zero; clamping
    marks the code size as infeasible for this bound.
    """
    base = channel_coding_converse(channel, n, eps)
    raw = base.total - ln_m
    reasons = () if raw >= 0 else ("code size exceeds the converse: infeasible",)
    total = max(raw, 0.0)
    return BoundReport(
        "output_gap",
        float(total),
        float(base.first_order - ln_m),
        base.second_order,
        base.constant,
        {**base.params, "raw_total": float(raw), "clamped": raw < 0},
        raw >= 0,
        reasons,
    )


@dataclass(frozen=True)
class RegionPoint:
    """One outer-bound corner ``(rate1, rate2)`` in nats per block."""

    rate1: float
    rate2: float
    parameter: object = None


def _awgn_capacity(snr):
    return 0.5 * np.log1p(snr)


def gaussian_broadcast_region(s1: float, s2: float, n: int, eps: float, grid: int = 101) -> list[RegionPoint]:
    """Outer bound for the two-receiver Gaussian broadcast channel.

    Sweeps the power split ``a`` over ``grid`` points of ``[0, 1]``:
    ``rate1 = n C(a S1) + sqrt(2 n L) + L`` and
    ``rate2 = n C((1-a) S2 / (a S2 + 1)) + sqrt(2 n L) + L``.
    """
    if grid < 2:
        raise GridTooCoarse("need at least two grid points")
    big_l = error_log_term(eps)
    slack = np.sqrt(2.0 * n * big_l) + big_l
    out = []
    for a in np.linspace(0.0, 1.0, grid):
        r1 = n * _awgn_capacity(a * s1) + slack
        r2 = n * _awgn_capacity((1.0 - a) * s2 / (a * s2 + 1.0)) + slack
        out.append(RegionPoint(float(r1), float(r2), float(a)))
    return out


def _conditional_informations(p_ux: np.ndarray, w_y: np.ndarray, w_z: np.ndarray) -> tuple[float, float]:
    """``I(X;Y|U)`` and ``I(U;Z)`` for a joint law ``p_ux`` of shape ``(|U|, |X|)``."""
    p_u = p_ux.sum(axis=1)
    i_xy_u = 0.0
    for pu, row in zip(p_u, p_ux):
        if pu > 0:
            i_xy_u += pu * mutual_information(FiniteChannel(w_y), row / pu)
    cond_z = np.array([row / pu @ w_z if pu > 0 else np.full(w_z.shape[1], 1.0 / w_z.shape[1]) for pu, row in zip(p_u, p_ux)])
    i_uz = mutual_information(FiniteChannel(cond_z), p_u)
    return i_xy_u, i_uz


def is_degraded(strong: FiniteChannel, weak: FiniteChannel) -> bool:
    """Whether ``weak = strong K`` for some stochastic matrix ``K`` (LP feasibility)."""
    a, b = strong.rows, weak.rows
    ky, kz = a.shape[1], b.shape[1]
    # unknowns K[y, z] flattened row-major
    eq_rows = [np.kron(a[x], np.eye(kz)) for x in range(a.shape[0])]
    a_eq = np.vstack(eq_rows + [np.kron(np.eye(ky), np.ones(kz))])
    b_eq = np.concatenate([b.reshape(-1), np.ones(ky)])
    res = linprog(np.zeros(ky * kz), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return res.status == 0


def discrete_broadcast_region(
    channel_y: FiniteChannel,
    channel_z: FiniteChannel,
    n: int,
    eps: float,
    candidates: Sequence[np.ndarray] = (),
    search_restarts: int = 0,
    seed: int = 0,
) -> tuple[list[RegionPoint], dict]:
    """Outer bound for a discrete degraded broadcast channel.

    Every candidate joint law ``P_{UX}`` (a ``|U| x |X|`` matrix) gives
    ``rate1 = n I(X;Y|U) + 2 sqrt(|Y| n L) + L`` and
    ``rate2 = n I(U;Z) + 2 sqrt(|Z| n L) + L``. With ``search_restarts``
    random laws with ``|U| = |X| + 1`` are added; the searched region is
    only an inner approximation of the true outer bound, which the info
    map flags as ``lower_bound_only``. Points are not Pareto-filtered;
    see :func:`region_upper_hull`.
    """
    if channel_y.input_size != channel_z.input_size:
        raise PreconditionViolated("the two channels must share the input alphabet")
    big_l = error_log_term(eps)
    ky, kz, kx = channel_y.output_size, channel_z.output_size, channel_y.input_size
    slack_y = 2.0 * np.sqrt(ky * n * big_l) + big_l
    slack_z = 2.0 * np.sqrt(kz * n * big_l) + big_l
    laws = [np.asarray(c, dtype=float) for c in candidates]
    rng = make_generator(seed)
    for _ in range(search_restarts):
        laws.append(rng.dirichlet(np.full(kx * (kx + 1), 0.5)).reshape(kx + 1, kx))
    points = []
    for law in laws:
        law = law / law.sum()
        i1, i2 = _conditional_informations(law, channel_y.rows, channel_z.rows)
        points.append(RegionPoint(float(n * i1 + slack_y), float(n * i2 + slack_z), law))
    info = {"degraded": is_degraded(channel_y, channel_z), "lower_bound_only": search_restarts > 0}
    return points, info


def region_upper_hull(points: Sequence[RegionPoint]) -> list[RegionPoint]:
    """Points on the upper-right concave frontier, sorted by ``rate1``."""
    pts = sorted(points, key=lambda p: (p.rate1, -p.rate2))
    hull: list[RegionPoint] = []
    for p in pts:
        while hull and hull[-1].rate2 <= p.rate2:
            hull.pop()
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (b.rate1 - a.rate1) * (p.rate2 - a.rate2) - (b.rate2 - a.rate2) * (p.rate1 - a.rate1)
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def ht_communication_converse(q_x, channel: FiniteChannel, ln_m: float, n: int, eps: float) -> BoundReport:
    """Lower bound on ``ln pi_{0|1}`` for testing with a rate-limited link.

    ``-n theta(ln M / n) - (2 ln(alpha beta) sqrt(3 beta ln(4|X|/(1-eps)))
    + 2 sqrt(alpha ln(4/(1-eps)))) sqrt(n) - 2 ln(4/(1-eps))`` with
    ``alpha = max_x ||Q_{Y|X=x} / Q_Y||_inf`` and ``beta = 1/min Q_X``.
    ``params["alpha_minus_one_total"]`` swaps ``alpha`` for ``alpha - 1``
    inside the second square root.
    """
    q = validate_and_build(q_x).probs
    error_log_term(eps)
    kx = q.size
    beta = 1.0 / q.min()
    need = 3.0 * beta * np.log(4.0 * kx / (1.0 - eps))
    if not n > need:
        raise PreconditionViolated(f"n must exceed 3 beta ln(4|X|/(1-eps)) = {need:.4g}")
    q_y = q @ channel.rows
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = float(np.where(channel.rows > 0, channel.rows / q_y[None, :], 0.0).max())
    theta = dstar_envelope(q, channel, None, 1.0, ThetaOfR(ln_m / n))
    k4 = np.log(4.0 / (1.0 - eps))
    typical = 2.0 * np.log(alpha * beta) * np.sqrt(3.0 * beta * np.log(4.0 * kx / (1.0 - eps)))
    second = -(typical + 2.0 * np.sqrt(alpha * k4)) * np.sqrt(n)
    alt = -(typical + 2.0 * np.sqrt((alpha - 1.0) * k4)) * np.sqrt(n)
    first = -n * theta.value
    return BoundReport.build(
        "ht_communication",
        first,
        second,
        -2.0 * k4,
        params={
            "theta": theta.value,
            "alpha": alpha,
            "beta": beta,
            "alpha_minus_one_total": float(first + alt - 2.0 * k4),
            "lower_bound_only": theta.lower_bound_only,
        },
    )


def side_info_converse_discrete(q_x, channel: FiniteChannel, ln_m1: float, n: int, eps: float) -> BoundReport:
    """Lower bound on ``ln M2`` for lossless source coding with a helper.

    ``n inf{H(Y|U) : I(U;X) <= ln M1 / n} - (2 ln(|Y| beta) sqrt(3 beta
    ln(4|X|/(1-eps))) + 2 sqrt(|Y| ln(2/(1-eps)))) sqrt(n) - 2 ln(4/(1-eps))``.
    """
    q = validate_and_build(q_x).probs
    error_log_term(eps)
    kx, ky = q.size, channel.output_size
    beta = 1.0 / q.min()
    need = 3.0 * beta * np.log(4.0 * kx / (1.0 - eps))
    if n < need:
        raise PreconditionViolated(f"n must be at least 3 beta ln(4|X|/(1-eps)) = {need:.4g}")
    cond = dstar_envelope(q, channel, None, 1.0, CondEntropyOfR(ln_m1 / n))
    coef = 2.0 * np.log(ky * beta) * np.sqrt(3.0 * beta * np.log(4.0 * kx / (1.0 - eps)))
    coef += 2.0 * np.sqrt(ky * np.log(2.0 / (1.0 - eps)))
    return BoundReport.build(
        "side_info_discrete",
        n * cond.value,
        -coef * np.sqrt(n),
        -2.0 * np.log(4.0 / (1.0 - eps)),
        params={"cond_entropy": cond.value, "lower_bound_only": cond.lower_bound_only},
    )


def gaussian_sideinfo_first_order(rho: float, distortion: float, rate: float) -> float:
    """``1/2 ln((1 - rho^2 + rho^2 e^{-2 rate}) / D)``, the per-letter first-order term."""
    r2 = rho * rho
    decay = 0.0 if rate == np.inf else np.exp(-2.0 * rate)
    return float(0.5 * np.log((1.0 - r2 + r2 * decay) / distortion))


def side_info_converse_gaussian(pair: GaussianPair, distortion: float, ln_m1: float, n: int, eps: float) -> BoundReport:
    """Lower bound on ``ln M2`` for Gaussian lossy coding with a helper.

    ``(n/2) ln((1 - rho^2 + rho^2 e^{-2 ln M1/n}) / D) - 4 sqrt(ln(8/(1-eps)))
    sqrt(n) - 2 ln(4/(1-eps))``. ``params["dual_first_order"]`` evaluates
    the same first-order term through the envelope ``d*`` and the
    infimum over ``c``.
    """
    error_log_term(eps)
    if distortion <= 0:
        raise OutOfRange("distortion must be positive")
    need = 20.0 * np.log(8.0 / (1.0 - eps))
    if n < need:
        raise PreconditionViolated(f"n must be at least 20 ln(8/(1-eps)) = {need:.4g}")
    rate = ln_m1 / n
    first = n * gaussian_sideinfo_first_order(pair.rho, distortion, rate)
    dual = n * gaussian_sideinfo_rate_dual(pair.rho, distortion, rate)
    return BoundReport.build(
        "side_info_gaussian",
        first,
        -4.0 * np.sqrt(np.log(8.0 / (1.0 - eps))) * np.sqrt(n),
        -2.0 * np.log(4.0 / (1.0 - eps)),
        params={"dual_first_order": float(dual)},
    )
