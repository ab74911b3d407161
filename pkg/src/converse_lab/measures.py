"""Finite measures, channels and functions on product alphabets.

All value types are immutable: arrays are copied on construction and
flagged read-only, so a distribution can be shared freely between
solvers without defensive copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import (
    NegativeMass,
    NotNormalizable,
    NotStochastic,
    OutOfRange,
    SymbolOutOfRange,
    TooLarge,
    TooManyTypes,
)

__all__ = [
    "NEGATIVE_TOL",
    "SUM_TOL",
    "MAX_DENSE_ENTRIES",
    "FiniteDistribution",
    "FiniteChannel",
    "BoundedDensityRatio",
    "TestFunction",
    "GaussianPair",
    "validate_and_build",
    "density_ratio_bound",
    "empirical_distribution",
    "enumerate_types",
    "product_pmf",
    "apply_along_axes",
]

NEGATIVE_TOL = 1e-12
SUM_TOL = 1e-9
MAX_DENSE_ENTRIES = 2**26


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.setflags(write=False)
    return out


def _check_probability_vector(values: np.ndarray, what: str) -> np.ndarray:
    if values.ndim != 1 or values.size == 0:
        raise NotNormalizable(f"{what} must be a non-empty vector")
    if not np.all(np.isfinite(values)):
        raise NotNormalizable(f"{what} has non-finite entries")
    if np.any(values < -NEGATIVE_TOL):
        raise NegativeMass(f"{what} has entry {values.min():.3e} below zero")
    values = np.clip(values, 0.0, None)
    total = values.sum()
    if total == 0.0:
        raise NotNormalizable(f"{what} is identically zero")
    if abs(total - 1.0) > SUM_TOL:
        raise NotNormalizable(f"{what} sums to {total!r}, not 1")
    return values / total


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability mass function on ``{0, ..., k-1}``.

    Use :func:`validate_and_build` (or ``FiniteDistribution.of``) rather
    than the raw constructor when the input is untrusted.
    """

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _frozen(self.probs))

    @classmethod
    def of(cls, values) -> "FiniteDistribution":
        return validate_and_build(values)

    @classmethod
    def uniform(cls, k: int) -> "FiniteDistribution":
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def point_mass(cls, k: int, symbol: int) -> "FiniteDistribution":
        probs = np.zeros(k)
        probs[symbol] = 1.0
        return cls(probs)

    @property
    def size(self) -> int:
        return self.probs.size

    @property
    def support(self) -> np.ndarray:
        return self.probs > 0

    @property
    def min_mass(self) -> float:
        """Smallest atom over the whole alphabet (zero if not full support)."""
        return float(self.probs.min())

    @property
    def inverse_min_mass(self) -> float:
        """``1 / min_x Q(x)``, infinite when some atom is zero."""
        m = self.min_mass
        return np.inf if m == 0.0 else 1.0 / m

    def entropy(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-(p * np.log(p)).sum())

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"FiniteDistribution({np.array2string(self.probs, precision=6)})"


def validate_and_build(values) -> FiniteDistribution:
    """Validate a probability vector and return it as a distribution.

    Entries below ``-1e-12`` raise :class:`NegativeMass`; an all-zero
    vector, or one whose sum differs from one by more than ``1e-9``,
    raises :class:`NotNormalizable`. Accepted vectors are clipped at zero
    and renormalized exactly.
    """
    if isinstance(values, FiniteDistribution):
        return values
    return FiniteDistribution(_check_probability_vector(np.asarray(values, dtype=float), "distribution"))


@dataclass(frozen=True, eq=False)
class FiniteChannel:
    """Row-stochastic transition matrix ``rows[x, y] = Q(y | x)``."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.size == 0:
            raise NotStochastic("channel must be a non-empty matrix")
        try:
            fixed = np.vstack([_check_probability_vector(r, f"row {i}") for i, r in enumerate(rows)])
        except (NegativeMass, NotNormalizable) as exc:
            raise NotStochastic(str(exc)) from exc
        object.__setattr__(self, "rows", _frozen(fixed))

    @classmethod
    def identity(cls, k: int) -> "FiniteChannel":
        return cls(np.eye(k))

    @classmethod
    def binary_symmetric(cls, crossover: float) -> "FiniteChannel":
        if not 0.0 <= crossover <= 1.0:
            raise OutOfRange("crossover must lie in [0, 1]")
        return cls(np.array([[1 - crossover, crossover], [crossover, 1 - crossover]]))

    @property
    def input_size(self) -> int:
        return self.rows.shape[0]

    @property
    def output_size(self) -> int:
        return self.rows.shape[1]

    def output(self, p_x) -> FiniteDistribution:
        p = validate_and_build(p_x).probs
        if p.size != self.input_size:
            raise OutOfRange("input distribution has the wrong alphabet size")
        return FiniteDistribution(p @ self.rows)

    def joint(self, p_x) -> np.ndarray:
        p = validate_and_build(p_x).probs
        return p[:, None] * self.rows

    def power(self, n: int) -> "FiniteChannel":
        """``n``-fold memoryless extension as an explicit matrix (small ``n`` only)."""
        size = self.rows.size ** n
        if size > MAX_DENSE_ENTRIES:
            raise TooLarge(f"{size} entries exceed the dense cap")
        out = np.ones((1, 1))
        for _ in range(n):
            out = np.kron(out, self.rows)
        return FiniteChannel(out)


@dataclass(frozen=True)
class BoundedDensityRatio:
    """``alpha = max_{x,y} Q(y|x) / nu(y)`` together with the reference ``nu``."""

    alpha: float
    reference: FiniteDistribution

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.alpha))


def density_ratio_bound(channel: FiniteChannel, nu) -> BoundedDensityRatio:
    """Uniform bound on ``dQ_{Y|X=x} / d nu`` over ``x`` and ``y``.

    The bound is infinite when some row charges a symbol that ``nu``
    misses.
    """
    nu = validate_and_build(nu)
    if nu.size != channel.output_size:
        raise OutOfRange("reference measure has the wrong alphabet size")
    rows = channel.rows
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rows > 0, rows / nu.probs[None, :], 0.0)
    return BoundedDensityRatio(float(ratio.max()), nu)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Nonnegative function on ``Y^n`` stored densely.

    ``values`` is flat in row-major order with coordinate 1 the most
    significant digit, so ``values.reshape((k,) * n)`` indexes
    ``f[y_1, ..., y_n]``.
    """

    __test__ = False  # not a pytest class despite the name

    values: np.ndarray
    n: int
    alphabet_size: int

    def __post_init__(self):
        expected = self.alphabet_size ** self.n
        if expected > MAX_DENSE_ENTRIES:
            raise TooLarge(f"{self.alphabet_size}^{self.n} entries exceed 2^26")
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size != expected:
            raise OutOfRange(f"expected {expected} values, got {values.size}")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise OutOfRange("test function must be finite and nonnegative")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def from_tensor(cls, tensor) -> "TestFunction":
        tensor = np.asarray(tensor, dtype=float)
        k = tensor.shape[0] if tensor.ndim else 1
        if any(s != k for s in tensor.shape):
            raise OutOfRange("all axes must share one alphabet size")
        return cls(tensor.reshape(-1), tensor.ndim, k)

    @property
    def tensor(self) -> np.ndarray:
        return self.values.reshape((self.alphabet_size,) * self.n)


@dataclass(frozen=True)
class GaussianPair:
    """Jointly Gaussian scalar pair with correlation ``rho``."""

    rho: float
    sigma_x: float = 1.0
    sigma_y: float = 1.0

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise OutOfRange("correlation must lie in (-1, 1)")
        if self.sigma_x <= 0 or self.sigma_y <= 0:
            raise OutOfRange("standard deviations must be positive")


def empirical_distribution(sequence: Sequence[int], alphabet_size: int) -> FiniteDistribution:
    """Type (empirical distribution) of a sequence over ``{0, ..., k-1}``."""
    seq = np.asarray(sequence, dtype=int).reshape(-1)
    if seq.size == 0:
        raise NotNormalizable("empty sequence has no type")
    if seq.min() < 0 or seq.max() >= alphabet_size:
        raise SymbolOutOfRange(f"symbols must lie in [0, {alphabet_size})")
    counts = np.bincount(seq, minlength=alphabet_size)
    return FiniteDistribution(counts / seq.size)


def _compositions(n: int, k: int) -> np.ndarray:
    if k == 1:
        return np.array([[n]], dtype=np.int64)
    blocks = []
    for first in range(n, -1, -1):
        rest = _compositions(n - first, k - 1)
        blocks.append(np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest]))
    return np.vstack(blocks)


def enumerate_types(n: int, k: int, cap: float = 1e7) -> tuple[np.ndarray, np.ndarray]:
    """All count vectors of length-``n`` sequences over ``k`` symbols.

    Returns
    -------
    counts : ndarray, shape (m, k)
        Count vectors in reverse lexicographic order.
    log_multinomial : ndarray, shape (m,)
        ``ln(n! / prod counts!)``, the log size of each type class.
    """
    if n < 0 or k < 1:
        raise OutOfRange("need n >= 0 and k >= 1")
    number = comb(n + k - 1, k - 1)
    if number > cap:
        raise TooManyTypes(f"{number} types exceed the cap {cap:g}")
    counts = _compositions(n, k)
    log_mult = gammaln(n + 1) - gammaln(counts + 1).sum(axis=1)
    return counts, log_mult


def product_pmf(factors: Sequence) -> np.ndarray:
    """Flat row-major pmf of a product of finite distributions."""
    out = np.ones(1)
    for f in factors:
        out = np.multiply.outer(out, validate_and_build(f).probs).reshape(-1)
    if out.size > MAX_DENSE_ENTRIES:
        raise TooLarge("product alphabet exceeds the dense cap")
    return out


def apply_along_axes(tensor: np.ndarray, matrices: Sequence[np.ndarray], start_axis: int = 0) -> np.ndarray:
    """Apply one matrix per axis: ``out[..., a_i, ...] = sum_b M_i[a_i, b] t[..., b, ...]``.

    ``matrices[i]`` acts on axis ``start_axis + i``; leading axes before
    ``start_axis`` are treated as a batch.
    """
    out = np.asarray(tensor, dtype=float)
    for i, m in enumerate(matrices):
        axis = start_axis + i
        out = np.moveaxis(np.tensordot(m, out, axes=([1], [axis])), 0, axis)
    return out
