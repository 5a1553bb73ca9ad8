"""Seeded random number streams.

All stochastic layers draw from counter-based Philox generators keyed with
``(seed, stream)``.  Because the key fully determines the stream, any layer
can be regenerated bit-identically without replaying the others, and adding
draws to one stream never perturbs the rest.
"""

from __future__ import annotations

import numpy as np

# module-level stream ids; keep stable, results depend on them
CITY_STREAM = 0
GBS_STREAM = 1
LOAD_STREAM = 2


def substream(seed: int, stream: int) -> np.random.Generator:
    """Return the generator for an independent, regenerable substream."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.Generator(np.random.Philox(key=[seed, stream]))
