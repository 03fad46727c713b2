"""Seedable, portable random number generation.

Every stochastic component in this package draws from numpy's Philox
(4x64) counter-based bit generator. Philox output is a pure function of
its key, so a given 64-bit seed yields the same stream on every platform.
Independent subsystems get independent streams by mixing a stream tag into
the SeedSequence entropy instead of sharing one generator. The generator
choice is part of the package contract and is never changed silently.
"""

from __future__ import annotations

import numpy as np

# Stream tags. Each subsystem that needs randomness owns one tag so that
# e.g. maze generation and target sampling never consume from each other.
STREAM_LAYOUT = 0
STREAM_TARGETS = 1
STREAM_POLICY = 2
STREAM_DATASET = 3
STREAM_PROBE = 4
STREAM_BATCH = 5


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for (seed, stream), independent across distinct streams."""
    ss = np.random.SeedSequence((int(seed) & 0xFFFFFFFFFFFFFFFF, stream))
    return np.random.Generator(np.random.Philox(ss))


def derive_seeds(seed: int, n: int, stream: int = STREAM_DATASET) -> np.ndarray:
    """n child seeds derived from (seed, stream), as uint64."""
    ss = np.random.SeedSequence((int(seed) & 0xFFFFFFFFFFFFFFFF, stream))
    return ss.generate_state(n, dtype=np.uint64)
