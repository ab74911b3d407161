"""Converse bounds: exact testing frontiers, semigroup smoothing and Brascamp-Lieb divergences."""
__version__ = "0.1.0"
