"""Simple Markov semigroups on product alphabets, Hamming blow-ups,
and the Ornstein-Uhlenbeck semigroup by Monte Carlo.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import OutOfRange, TimeTooSmall
from .measures import FiniteDistribution, TestFunction, validate_and_build
from .rng import make_generator

__all__ = [
    "SemigroupSpec",
    "RhcResult",
    "semigroup_apply",
    "semigroup_apply_array",
    "blowup_set",
    "rhc_time_threshold",
    "rhc_check",
    "rhc_check_batch",
    "lp_norm",
    "ou_apply_mc",
    "ou_log_average_mc",
]

LOG_FLOOR = 1e-300
RHC_REL_TOL = 1e-12
SMALL_EXPONENT = 1e-10


@dataclass(frozen=True, eq=False)
class SemigroupSpec:
    """Per-coordinate averaging semigroup at time ``t``.

    ``kind="simple"``: coordinate ``i`` averages against the law
    ``laws[i]``, giving ``T_t f = e^{-t} f + (1 - e^{-t}) P_i(f)``.

    ``kind="dominating"``: every coordinate uses the sub-Markov map
    ``e^{-t} f + alpha (1 - e^{-t}) nu(f)``; it dominates the simple
    semigroup whenever ``P_i <= alpha nu``.
    """

    kind: str
    t: float
    laws: tuple = ()
    alpha: float = 1.0
    nu: FiniteDistribution | None = None

    @classmethod
    def simple(cls, laws: Sequence, t: float) -> "SemigroupSpec":
        return cls("simple", float(t), tuple(validate_and_build(l) for l in laws))

    @classmethod
    def dominating(cls, alpha: float, nu, t: float) -> "SemigroupSpec":
        if not alpha >= 1.0:
            raise OutOfRange("a dominating constant must be at least 1")
        return cls("dominating", float(t), alpha=float(alpha), nu=validate_and_build(nu))

    def weights(self, n: int) -> list[np.ndarray]:
        if self.t < 0:
            raise OutOfRange("semigroup time must be nonnegative")
        if self.kind == "simple":
            laws = self.laws if len(self.laws) != 1 else self.laws * n
            if len(laws) != n:
                raise OutOfRange(f"need {n} coordinate laws, got {len(self.laws)}")
            return [l.probs for l in laws]
        if self.kind == "dominating":
            return [self.alpha * self.nu.probs] * n
        raise OutOfRange(f"unknown semigroup kind {self.kind!r}")


def semigroup_apply_array(tensor: np.ndarray, weights: Sequence[np.ndarray], t: float, batch: bool = False) -> np.ndarray:
    """Apply ``g -> e^{-t} g + (1 - e^{-t}) <w_i, g>_i`` along each axis.

    With ``batch=True`` axis 0 indexes independent functions.
    """
    keep = np.exp(-t)
    out = np.asarray(tensor, dtype=float)
    offset = 1 if batch else 0
    for i, w in enumerate(weights):
        axis = offset + i
        avg = np.expand_dims(np.tensordot(out, w, axes=([axis], [0])), axis)
        out = keep * out + (1.0 - keep) * avg
    return out


def semigroup_apply(spec: SemigroupSpec, f: TestFunction) -> TestFunction:
    """Apply the tensorized semigroup to a dense test function.

    The dominating kind is not Markov, so its output is returned
    unclamped (it may exceed ``max f``).
    """
    weights = spec.weights(f.n)
    for w in weights:
        if w.size != f.alphabet_size:
            raise OutOfRange("law and test function alphabets differ")
    return TestFunction.from_tensor(semigroup_apply_array(f.tensor, weights, spec.t))


def blowup_set(indicator, radius: int) -> np.ndarray:
    """Hamming ``radius``-enlargement of a set given as a boolean tensor.

    A point belongs to the output iff it differs from some point of the
    input in at most ``radius`` coordinates.
    """
    if isinstance(indicator, TestFunction):
        indicator = indicator.tensor > 0
    current = np.asarray(indicator, dtype=bool)
    if radius < 0:
        raise OutOfRange("radius must be nonnegative")
    for _ in range(int(radius)):
        grown = current.copy()
        for axis in range(current.ndim):
            grown |= current.any(axis=axis, keepdims=True)
        if grown.all() or np.array_equal(grown, current):
            current = grown
            break
        current = grown
    return current


def rhc_time_threshold(p: float, q: float) -> float:
    """Smallest time at which ``||T_t f||_q >= ||f||_p`` is guaranteed."""
    if not 0.0 < p < 1.0:
        raise OutOfRange("p must lie in (0, 1)")
    if not 0.0 <= q < p:
        raise OutOfRange("q must lie in [0, p)")
    return float(np.log((1.0 - q) / (1.0 - p)))


def _log_product_law(weights: Sequence[np.ndarray]) -> np.ndarray:
    with np.errstate(divide="ignore"):
        out = np.zeros(())
        for w in weights:
            out = np.add.outer(out, np.log(w))
    return out


def lp_norm(values: np.ndarray, log_law: np.ndarray, p: float, batch: bool = False) -> np.ndarray:
    """``(E g^p)^{1/p}`` for ``p > 0`` or ``exp E ln g`` for ``p = 0``, in log space.

    Entries of ``values`` are floored at ``1e-300`` before taking logs.
    """
    axes = tuple(range(1 if batch else 0, np.ndim(values)))
    log_g = np.log(np.maximum(values, LOG_FLOOR))
    law = np.exp(log_law)
    mean_log = np.sum(law * log_g, axis=axes)
    if p == 0.0:
        return np.exp(mean_log)
    if p < SMALL_EXPONENT:
        # second-order cumulant expansion; the direct route divides roundoff by p
        var_log = np.sum(law * (log_g - np.expand_dims(mean_log, axes)) ** 2, axis=axes)
        return np.exp(mean_log + 0.5 * p * var_log)
    direct = logsumexp(log_law + p * log_g, axis=axes)
    # log1p(E expm1(p ln g)) keeps relative accuracy when p ln g is small
    with np.errstate(over="ignore"):
        near = np.log1p(np.sum(law * np.expm1(p * log_g), axis=axes))
    small = np.max(np.abs(p * log_g), axis=axes) < 1.0
    return np.exp(np.where(small, near, direct) / p)


class RhcResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool
    margin: float


def rhc_check_batch(values: np.ndarray, laws: Sequence, p: float, q: float, t: float):
    """Vectorized :func:`rhc_check` over a batch of dense tensors.

    ``values`` has shape ``(batch, k, ..., k)``. Returns arrays
    ``(lhs, rhs, holds)``.
    """
    threshold = rhc_time_threshold(p, q)
    if t < threshold * (1.0 - 1e-12):
        raise TimeTooSmall(f"t = {t!r} is below ln((1-q)/(1-p)) = {threshold!r}")
    values = np.asarray(values, dtype=float)
    weights = [validate_and_build(l).probs for l in laws]
    log_law = _log_product_law(weights)
    smoothed = semigroup_apply_array(values, weights, t, batch=True)
    with np.errstate(divide="ignore"):
        log_f = np.where(values > 0, np.log(np.where(values > 0, values, 1.0)), -np.inf)
    axes = tuple(range(1, values.ndim))
    rhs = np.exp(logsumexp(log_law + p * log_f, axis=axes) / p)
    lhs = lp_norm(smoothed, log_law, q, batch=True)
    holds = lhs >= rhs - RHC_REL_TOL * rhs
    return lhs, rhs, holds


def rhc_check(f: TestFunction, laws: Sequence, p: float, q: float, t: float) -> RhcResult:
    """Check reverse hypercontractivity ``||T_t f||_q >= ||f||_p`` for one function.

    ``laws`` lists the stationary law of each coordinate. The check
    passes when ``lhs >= rhs`` up to a relative slack of ``1e-12``.

    Raises
    ------
    TimeTooSmall
        If ``t < ln((1-q)/(1-p))``.
    """
    lhs, rhs, holds = rhc_check_batch(f.tensor[None], laws, p, q, t)
    return RhcResult(float(lhs[0]), float(rhs[0]), bool(holds[0]), float(lhs[0] - rhs[0]))


def _ou_points(center, y, t, noise):
    keep = np.exp(-t)
    return keep * y + (1.0 - keep) * center + np.sqrt(1.0 - keep**2) * noise


def ou_apply_mc(
    center,
    f: Callable[[np.ndarray], np.ndarray],
    t: float,
    samples: int,
    seed: int,
    y,
) -> tuple[float, float]:
    """Monte Carlo value of the Ornstein-Uhlenbeck semigroup at ``y``.

    Estimates ``E f(e^{-t} y + (1 - e^{-t}) x + sqrt(1 - e^{-2t}) V)``
    with ``V ~ N(0, I_n)`` and ``x = center``.

    Parameters
    ----------
    f : callable
        Vectorized over rows: maps an ``(m, n)`` array to ``m`` values.

    Returns
    -------
    mean, stderr : float
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    center = np.broadcast_to(np.asarray(center, dtype=float), y.shape)
    noise = make_generator(seed).standard_normal((samples, y.size))
    vals = np.asarray(f(_ou_points(center, y, t, noise)), dtype=float)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


def ou_log_average_mc(center_channel, center_semigroup, f, t: float, outer: int, inner: int, seed: int) -> tuple[float, float]:
    """Estimate ``E_{Y ~ N(a, I)} ln T_{b,t} f(Y)`` by nested Monte Carlo.

    ``a = center_channel`` is the mean of the outer Gaussian and
    ``b = center_semigroup`` the center of the semigroup. Used to check
    the change of variables ``P_{Y|X=x} ln T_{0,t} f = P_{Y|X=e^{-t}x} ln T_{e^{-t}x,t} f``.
    """
    a = np.atleast_1d(np.asarray(center_channel, dtype=float))
    b = np.broadcast_to(np.asarray(center_semigroup, dtype=float), a.shape)
    rng = make_generator(seed)
    ys = a + rng.standard_normal((outer, a.size))
    noise = rng.standard_normal((inner, a.size))
    logs = np.empty(outer)
    for i, y in enumerate(ys):
        logs[i] = np.log(max(float(np.mean(f(_ou_points(b, y, t, noise)))), LOG_FLOOR))
    return float(logs.mean()), float(logs.std(ddof=1) / np.sqrt(outer))
