"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

__all__ = [
    "ConverseLabError",
    "NegativeMass",
    "NotNormalizable",
    "NotStochastic",
    "SymbolOutOfRange",
    "TooManyTypes",
    "TooLarge",
    "OutOfRange",
    "SupportMismatch",
    "NoConvergence",
    "TimeTooSmall",
    "Degenerate",
    "AlphabetTooLarge",
    "AlphaInfinite",
    "PreconditionViolated",
    "GridTooCoarse",
    "UnknownExperiment",
    "SchemaViolation",
]


class ConverseLabError(Exception):
    """Base class for all package errors."""


class NegativeMass(ConverseLabError, ValueError):
    """A probability vector has an entry below the negativity tolerance."""


class NotNormalizable(ConverseLabError, ValueError):
    """A vector cannot be turned into a probability distribution."""


class NotStochastic(ConverseLabError, ValueError):
    """A channel matrix has a row that is not a probability vector."""


class SymbolOutOfRange(ConverseLabError, ValueError):
    """A sequence contains a symbol outside the declared alphabet."""


class TooManyTypes(ConverseLabError, ValueError):
    """Type enumeration would exceed the configured cap."""


class TooLarge(ConverseLabError, ValueError):
    """A dense array over a product alphabet would be too large."""


class OutOfRange(ConverseLabError, ValueError):
    """A scalar argument lies outside its admissible interval."""


class SupportMismatch(ConverseLabError, ValueError):
    """Two measures are not mutually absolutely continuous where required."""


class NoConvergence(ConverseLabError, RuntimeError):
    """An iterative solver hit its iteration cap."""


class TimeTooSmall(ConverseLabError, ValueError):
    """The semigroup time is below the reverse hypercontractivity threshold."""


class Degenerate(ConverseLabError, ValueError):
    """An input measure has empty support."""


class AlphabetTooLarge(ConverseLabError, ValueError):
    """A brute-force oracle was asked for an alphabet it cannot grid."""


class AlphaInfinite(ConverseLabError, ValueError):
    """A density ratio bound is infinite."""


class PreconditionViolated(ConverseLabError, ValueError):
    """A theorem's hypothesis does not hold for the given parameters."""


class GridTooCoarse(ConverseLabError, ValueError):
    """A parameter grid has fewer points than required."""


class UnknownExperiment(ConverseLabError, KeyError):
    """The requested experiment name is not registered."""


class SchemaViolation(ConverseLabError, ValueError):
    """A configuration file does not match the experiment schema."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
