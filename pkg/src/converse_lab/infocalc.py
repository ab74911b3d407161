"""Information measures, channel capacity and exact log-likelihood-ratio laws."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple, Optional

import numpy as np
from scipy.special import gammaln, ndtr, ndtri

from .errors import OutOfRange, SupportMismatch
from .measures import FiniteChannel, FiniteDistribution, enumerate_types, validate_and_build

__all__ = [
    "DivergenceStats",
    "CapacityReport",
    "LlrDistribution",
    "divergence_stats",
    "relative_entropy",
    "binary_entropy",
    "mutual_information",
    "mutual_information_and_capacity",
    "gaussian_q",
    "gaussian_q_inverse",
    "llr_distribution",
]

MERGE_TOL = 1e-12


class DivergenceStats(NamedTuple):
    divergence: float
    variance: float
    max_ratio: float


def divergence_stats(p, q) -> DivergenceStats:
    """Relative entropy ``D(P||Q)``, its variance ``V`` and ``||dP/dQ||_inf``.

    All three are infinite when ``P`` charges a symbol that ``Q`` misses.

    Examples
    --------
    >>> d, v, a = divergence_stats([0.6, 0.4], [0.3, 0.7])
    >>> round(d, 5), round(v, 5), a
    (0.19204, 0.37666, 2.0)
    """
    p = validate_and_build(p).probs
    q = validate_and_build(q).probs
    if p.size != q.size:
        raise OutOfRange("distributions live on different alphabets")
    on = p > 0
    if np.any(q[on] == 0):
        return DivergenceStats(np.inf, np.inf, np.inf)
    llr = np.log(p[on] / q[on])
    d = float(p[on] @ llr)
    v = float(p[on] @ (llr - d) ** 2)
    return DivergenceStats(d, v, float(np.exp(llr.max())))


def relative_entropy(p, q) -> float:
    return divergence_stats(p, q).divergence


def binary_entropy(x: float) -> float:
    """Binary entropy in nats."""
    if not 0.0 <= x <= 1.0:
        raise OutOfRange("argument must lie in [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return float(-x * np.log(x) - (1 - x) * np.log1p(-x))


def _row_divergences(rows: np.ndarray, q_y: np.ndarray) -> np.ndarray:
    """``D(W_x || q_y)`` for every row, infinite on support mismatch."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(rows > 0, rows * np.log(rows / q_y[None, :]), 0.0)
    return terms.sum(axis=1)


def mutual_information(channel: FiniteChannel, p_x) -> float:
    p = validate_and_build(p_x).probs
    q_y = p @ channel.rows
    d = _row_divergences(channel.rows, q_y)
    on = p > 0
    return float(p[on] @ d[on])


@dataclass(frozen=True)
class CapacityReport:
    """Output of :func:`mutual_information_and_capacity`.

    ``capacity`` is the Blahut-Arimoto lower estimate; the true capacity
    lies in ``[capacity, capacity + gap]``. ``dispersion_advisory`` is set
    when the optimal input is not unique, in which case ``dispersion`` is
    the variance at the particular optimizer found.
    """

    mutual_information: Optional[float]
    capacity: float
    caod: FiniteDistribution
    capacity_input: FiniteDistribution
    gap: float
    iterations: int
    converged: bool
    dispersion: float
    dispersion_advisory: bool

    def __iter__(self):
        # unpacks as (I(X;Y), C, Q*_Y)
        return iter((self.mutual_information, self.capacity, self.caod))


def mutual_information_and_capacity(
    channel: FiniteChannel,
    p_x=None,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> CapacityReport:
    """Mutual information at ``p_x`` and channel capacity via Blahut-Arimoto.

    Iterates until the duality gap ``max_x D(W_x||q) - I(r, W)`` drops
    below ``tol`` or ``max_iter`` updates have been made; in the latter
    case ``converged`` is False and the best iterate is returned.

    Examples
    --------
    >>> rep = mutual_information_and_capacity(FiniteChannel.binary_symmetric(0.11))
    >>> round(rep.capacity, 6)
    0.346632
    """
    rows = channel.rows
    info = None if p_x is None else mutual_information(channel, p_x)
    r = np.full(channel.input_size, 1.0 / channel.input_size)
    converged = False
    it = 0
    while True:
        q_y = r @ rows
        d = _row_divergences(rows, q_y)
        lower = float(r @ d)
        gap = float(d.max()) - lower
        if gap < tol:
            converged = True
            break
        if it >= max_iter:
            break
        r = r * np.exp(d - d.max())
        r /= r.sum()
        it += 1

    # information density under the optimizer
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = np.where(rows > 0, np.log(rows / q_y[None, :]), 0.0)
    joint = r[:, None] * rows
    dispersion = float((joint * (dens - lower) ** 2).sum())
    active = d >= d.max() - 1e-6
    advisory = bool(np.linalg.matrix_rank(rows[active]) < active.sum())
    return CapacityReport(
        mutual_information=info,
        capacity=lower,
        caod=FiniteDistribution(q_y),
        capacity_input=FiniteDistribution(r),
        gap=gap,
        iterations=it,
        converged=converged,
        dispersion=dispersion,
        dispersion_advisory=advisory,
    )


def gaussian_q(x):
    """Standard normal upper tail ``Q(x) = P[N(0,1) > x]``."""
    return ndtr(-np.asarray(x, dtype=float))


def gaussian_q_inverse(p: float) -> float:
    """Inverse of the standard normal upper tail, for ``p`` in ``(0, 1)``."""
    if not 0.0 < p < 1.0:
        raise OutOfRange("Q^{-1} needs an argument in (0, 1)")
    return float(-ndtri(p))


@dataclass(frozen=True, eq=False)
class LlrDistribution:
    """Exact law of ``sum_i ln(P(Y_i)/Q(Y_i))`` for i.i.d. ``Y_i``.

    Atoms are sorted by increasing ``llr``. Masses are kept in log form
    under both hypotheses because tail atoms underflow double precision
    already at moderate ``n``; ``weighting`` selects which one
    :attr:`probs` reports.
    """

    llr: np.ndarray
    log_p: np.ndarray
    log_q: np.ndarray
    n: int
    weighting: Literal["P", "Q"] = "P"

    @property
    def log_prob(self) -> np.ndarray:
        return self.log_p if self.weighting == "P" else self.log_q

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_prob)

    def __len__(self) -> int:
        return self.llr.size

    def mean(self) -> float:
        return float(self.probs @ self.llr)

    def variance(self) -> float:
        w = self.probs
        m = w @ self.llr
        return float(w @ (self.llr - m) ** 2)


def _merge_atoms(llr, log_p, log_q):
    order = np.argsort(llr, kind="stable")
    llr, log_p, log_q = llr[order], log_p[order], log_q[order]
    if llr.size > 1:
        new_group = np.diff(llr) > MERGE_TOL * np.maximum(1.0, np.abs(llr[1:]))
        starts = np.flatnonzero(np.concatenate([[True], new_group]))
    else:
        starts = np.array([0])
    if starts.size == llr.size:
        return llr, log_p, log_q

    def group_lse(vals):
        peak = np.maximum.reduceat(vals, starts)
        idx = np.repeat(np.arange(starts.size), np.diff(np.append(starts, vals.size)))
        safe = np.where(np.isfinite(peak), peak, 0.0)
        summed = np.add.reduceat(np.exp(vals - safe[idx]), starts)
        with np.errstate(divide="ignore"):
            return safe + np.log(summed)

    return llr[starts], group_lse(log_p), group_lse(log_q)


def llr_distribution(p, q, n: int, weighting: Literal["P", "Q"] = "P", type_cap: float = 1e7) -> LlrDistribution:
    """Law of the ``n``-letter log-likelihood ratio ``ln dP^n/dQ^n``.

    Parameters
    ----------
    p, q : array_like or FiniteDistribution
        Single-letter laws; symbols charged by neither are dropped.
    n : int
        Block length.
    weighting : {"P", "Q"}
        Measure under which :attr:`LlrDistribution.probs` is reported.
    type_cap : float
        Maximum number of types enumerated for alphabets of size > 2.

    Raises
    ------
    SupportMismatch
        If exactly one of ``p``, ``q`` vanishes on some symbol.
    """
    p = validate_and_build(p).probs
    q = validate_and_build(q).probs
    if p.size != q.size:
        raise OutOfRange("distributions live on different alphabets")
    if n < 1:
        raise OutOfRange("block length must be positive")
    if weighting not in ("P", "Q"):
        raise OutOfRange("weighting must be 'P' or 'Q'")
    if np.any((p > 0) != (q > 0)):
        raise SupportMismatch("P and Q must share their support")
    keep = p > 0
    p, q = p[keep], q[keep]
    lp, lq = np.log(p), np.log(q)
    if p.size == 1:
        return LlrDistribution(np.zeros(1), np.zeros(1), np.zeros(1), n, weighting)
    if p.size == 2:
        k = np.arange(n + 1, dtype=float)
        log_count = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
        log_p = log_count + k * lp[0] + (n - k) * lp[1]
        log_q = log_count + k * lq[0] + (n - k) * lq[1]
        llr = k * (lp[0] - lq[0]) + (n - k) * (lp[1] - lq[1])
    else:
        counts, log_count = enumerate_types(n, p.size, cap=type_cap)
        log_p = log_count + counts @ lp
        log_q = log_count + counts @ lq
        llr = counts @ (lp - lq)
    llr, log_p, log_q = _merge_atoms(llr, log_p, log_q)
    return LlrDistribution(llr, log_p, log_q, n, weighting)
