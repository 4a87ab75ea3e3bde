"""Seeded, splittable random streams for reproducible Monte Carlo.

Every ensemble member owns one stream, identified by ``(seed, stream_id)``.
The stream is the reproducibility anchor: the deviate sequence depends only
on that pair, never on worker count or scheduling order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RandomStream:
    """Description of one deviate stream.

    Identical ``(seed, stream_id)`` pairs always produce identical generator
    states; distinct ``stream_id`` values produce statistically independent
    sequences (distinct SeedSequence spawn keys).
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")
        if not 0 <= int(self.stream_id) < 2**64:
            raise ValueError(f"stream_id must fit in 64 bits, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, stream_id: int) -> "RandomStream":
        """Stream for one ensemble member; keeps the run seed."""
        return RandomStream(self.seed, stream_id)


def as_generator(rng) -> np.random.Generator:
    """Accept either a live Generator or a RandomStream description."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RandomStream):
        return rng.generator()
    raise TypeError(f"expected numpy Generator or RandomStream, got {type(rng).__name__}")
