"""Exact and exhaustive reference computations used to certify the bounds.

None of these routines call the bound formulas they are compared with.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import logsumexp
from scipy.stats import chi2

from .errors import OutOfRange, TooLarge
from .infocalc import divergence_stats, gaussian_q, llr_distribution
from .rng import make_generator
from .smoothing import blowup_set

__all__ = [
    "Type1AtMost",
    "PMassAtLeast",
    "FrontierPoint",
    "BlowupCertification",
    "ImpossibilityRow",
    "AntipodalCode",
    "TrivialSideInfoCode",
    "McEstimate",
    "np_frontier",
    "blowup_certification",
    "dp_impossibility_experiment",
    "mc_error_estimate",
]


@dataclass(frozen=True)
class Type1AtMost:
    eps: float


@dataclass(frozen=True)
class PMassAtLeast:
    mass: float


@dataclass(frozen=True)
class FrontierPoint:
    """Optimal randomized test: ``type2 = Q-mass`` accepted, ``type1 = 1 - P-mass``."""

    log_type2: float
    type1: float
    threshold: float
    boundary_weight: float

    @property
    def type2(self) -> float:
        return float(np.exp(self.log_type2))


def np_frontier(p, q, n: int, constraint: Union[Type1AtMost, PMassAtLeast]) -> FrontierPoint:
    """Exact Neyman-Pearson optimum between ``P^n`` and ``Q^n``.

    Accepts atoms of the log-likelihood ratio in decreasing order until
    the required ``P``-mass is reached, randomizing on the last atom, and
    reports the smallest achievable ``Q``-mass in log form.
    """
    if isinstance(constraint, Type1AtMost):
        if not 0.0 <= constraint.eps <= 1.0:
            raise OutOfRange("type-I level must lie in [0, 1]")
        target = 1.0 - constraint.eps
    elif isinstance(constraint, PMassAtLeast):
        if not 0.0 <= constraint.mass <= 1.0:
            raise OutOfRange("P-mass target must lie in [0, 1]")
        target = constraint.mass
    else:
        raise OutOfRange(f"unknown constraint {constraint!r}")
    dist = llr_distribution(p, q, n)
    llr = dist.llr[::-1]
    log_p, log_q = dist.log_p[::-1], dist.log_q[::-1]
    if target <= 0.0:
        return FrontierPoint(-np.inf, 1.0, np.inf, 0.0)
    p_mass = np.exp(log_p)
    cum = np.cumsum(p_mass)
    j = min(int(np.searchsorted(cum, target, side="left")), llr.size - 1)
    before = cum[j - 1] if j > 0 else 0.0
    weight = float(np.clip((target - before) / p_mass[j], 0.0, 1.0))
    terms = list(log_q[:j])
    if weight > 0:
        terms.append(np.log(weight) + log_q[j])
    log_type2 = float(logsumexp(terms)) if terms else -np.inf
    return FrontierPoint(log_type2, float(1.0 - target), float(llr[j]), weight)


@dataclass(frozen=True)
class BlowupCertification:
    checks: int
    lemma_violations: int
    counting_checks: int
    counting_violations: int
    worst_lemma_margin: float
    worst_counting_margin: float


def blowup_certification(
    n: int,
    trials: int,
    c_values: Sequence[float],
    seed: int,
    bias_range: tuple[float, float] = (0.2, 0.8),
    tol: float = 1e-12,
) -> BlowupCertification:
    """Exhaustive check of the blowing-up and counting lemmas on ``{0,1}^n``.

    For random sets ``A`` and random product laws, checks
    ``P[A_r] >= 1 - e^{-c^2}`` at ``r = ceil(sqrt(n/2)(sqrt(ln 1/P[A]) + c))``
    and ``r ln(r/(n e K)) <= ln(P[A]/P[A_r]) <= 0`` at every radius
    ``1 <= r <= n`` with ``K = 2 / min_{i,a} P_i(a)``.
    """
    if n > 20:
        raise TooLarge("exhaustive certification is limited to n <= 20")
    rng = make_generator(seed)
    shape = (2,) * n
    lemma_bad = counting_bad = lemma_checks = counting_checks = 0
    worst_lemma = worst_count = np.inf
    for _ in range(trials):
        bias = rng.uniform(*bias_range, size=n)
        law = np.ones(())
        for b in bias:
            law = np.multiply.outer(law, np.array([b, 1.0 - b]))
        k_ratio = 2.0 / min(bias.min(), (1.0 - bias).min())
        density = 10.0 ** rng.uniform(-3.5, -0.3)
        a = rng.uniform(size=shape) < density
        if not a.any():
            a.reshape(-1)[rng.integers(a.size)] = True
        p_a = float(law[a].sum())

        # counting sandwich at every radius, growing the set one step at a time
        grown = a
        for r in range(1, n + 1):
            grown = blowup_set(grown, 1)
            ratio = np.log(p_a) - np.log(law[grown].sum())
            lower = r * np.log(r / (n * np.e * k_ratio))
            counting_checks += 1
            margin = min(ratio - lower, -ratio)
            worst_count = min(worst_count, margin)
            if margin < -tol:
                counting_bad += 1

        for c in c_values:
            r = int(np.ceil(np.sqrt(n / 2.0) * (np.sqrt(-np.log(p_a)) + c)))
            mass = float(law[blowup_set(a, min(r, n))].sum())
            margin = mass - (1.0 - np.exp(-c * c))
            lemma_checks += 1
            worst_lemma = min(worst_lemma, margin)
            if margin < -tol:
                lemma_bad += 1
    return BlowupCertification(lemma_checks, lemma_bad, counting_checks, counting_bad, float(worst_lemma), float(worst_count))


@dataclass(frozen=True)
class ImpossibilityRow:
    n: int
    min_ln_q_mass: float
    n_divergence: float
    normalized_gap: float


def dp_impossibility_experiment(p, q, delta: float, n_list: Sequence[int]) -> list[ImpossibilityRow]:
    """Exact minimal ``ln Q^n[A]`` over sets with ``P^n[A] >= 1 - n^{-delta}``.

    The normalized gap ``(min ln Q-mass + n D) / sqrt(n ln n)`` measures
    how far the optimum stays above ``-n D`` on the ``sqrt(n ln n)`` scale.
    """
    if delta <= 0:
        raise OutOfRange("delta must be positive")
    d = divergence_stats(p, q).divergence
    rows = []
    for n in n_list:
        if n < 2:
            raise OutOfRange("n must be at least 2 so that ln n > 0")
        point = np_frontier(p, q, n, PMassAtLeast(1.0 - float(n) ** (-delta)))
        gap = (point.log_type2 + n * d) / np.sqrt(n * np.log(n))
        rows.append(ImpossibilityRow(int(n), point.log_type2, float(n * d), float(gap)))
    return rows


@dataclass(frozen=True)
class AntipodalCode:
    """Code ``{+a 1^n, -a 1^n}`` (or only ``+a 1^n`` when ``messages = 1``) over unit-variance AWGN."""

    n: int
    amplitude: float
    messages: int = 2


@dataclass(frozen=True)
class TrivialSideInfoCode:
    """``M1 = M2 = 1`` with reconstruction zero; failure means ``||Y||^2 > n D``."""

    n: int
    distortion: float


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    exact: float


def mc_error_estimate(spec: Union[AntipodalCode, TrivialSideInfoCode], samples: int, seed: int, chunk: int = 65536) -> McEstimate:
    """Monte Carlo error probability of a small Gaussian code with its exact value."""
    rng = make_generator(seed)
    hits = 0
    done = 0
    if isinstance(spec, AntipodalCode):
        if spec.messages not in (1, 2):
            raise OutOfRange("antipodal code has one or two messages")
        exact = 0.0 if spec.messages == 1 else float(gaussian_q(spec.amplitude * np.sqrt(spec.n)))
        while done < samples:
            m = min(chunk, samples - done)
            if spec.messages == 2:
                sign = np.where(rng.uniform(size=m) < 0.5, 1.0, -1.0)
                y = sign[:, None] * spec.amplitude + rng.standard_normal((m, spec.n))
                decided = np.where(y.sum(axis=1) >= 0, 1.0, -1.0)
                hits += int((decided != sign).sum())
            done += m
    elif isinstance(spec, TrivialSideInfoCode):
        exact = float(chi2.sf(spec.n * spec.distortion, spec.n))
        while done < samples:
            m = min(chunk, samples - done)
            y = rng.standard_normal((m, spec.n))
            hits += int(((y**2).sum(axis=1) > spec.n * spec.distortion).sum())
            done += m
    else:
        raise OutOfRange(f"unknown code {spec!r}")
    est = hits / samples
    return McEstimate(est, float(np.sqrt(est * (1.0 - est) / samples)), exact)
