"""Seeded, splittable random streams.

Every stochastic routine takes an integer seed and derives its own
counter-based Philox stream from it. Sub-tasks get independent streams
through ``spawn_key`` so results do not depend on evaluation order or
thread count.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_generator"]


def make_generator(seed: int | None, *stream: int) -> np.random.Generator:
    """Philox generator for ``seed`` and the sub-stream path ``stream``."""
    seq = np.random.SeedSequence(seed, spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(seq))
