"""Seedable, partitionable random streams for the walk.

Every stream is a Philox counter-based generator keyed by
``SeedSequence(master_seed, spawn_key=(stream_id,))``. Streams are owned by
cell partitions, never by worker threads, so a run gives the same bits no
matter how many workers execute it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ALGORITHM = "numpy.random.Philox-4x64 keyed by SeedSequence(master_seed, spawn_key=(stream_id,))"

_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class StreamSpec:
    master_seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < _SEED_LIMIT:
            raise ValueError(f"master_seed must fit in 64 unsigned bits, got {self.master_seed!r}")
        if int(self.stream_id) < 0:
            raise ValueError(f"stream_id must be non-negative, got {self.stream_id!r}")

    def generator(self):
        seq = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.Philox(seq))


def make_streams(master_seed, count):
    """One generator per partition, stream ids 0..count-1."""
    return [StreamSpec(master_seed, k).generator() for k in range(count)]


def step_direction(gen):
    """A single +1/-1 step with equal probability."""
    return 1 if gen.integers(0, 2) else -1


def step_directions(gen, size):
    return 2 * gen.integers(0, 2, size=size, dtype=np.int8) - 1


def right_movers(gen, counts):
    """Number of walkers stepping right out of each cell.

    Drawing ``Binomial(|c|, 1/2)`` per cell has exactly the law of ``|c|``
    independent fair coin flips, which is what the per-walker loop does.
    """
    counts = np.abs(np.asarray(counts, dtype=np.int64))
    return gen.binomial(counts, 0.5)
