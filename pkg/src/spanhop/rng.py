"""Reproducible randomness for construction runs.

Every randomized construction takes an RngStream.  A stream is identified by
a 64-bit seed plus a path of integers; the same (seed, path) always yields the
same numpy Generator, so sampling decisions are bit-stable across runs and
across processes.  Independent sub-streams (distance classes, scheduling
noise) are derived with child() so they never perturb each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RngStream:
    seed: int
    path: tuple[int, ...] = field(default_factory=tuple)

    def child(self, *steps: int) -> "RngStream":
        """Derive an independent sub-stream."""
        return RngStream(self.seed, self.path + tuple(int(s) for s in steps))

    def generator(self) -> np.random.Generator:
        """A fresh Generator positioned at the start of this stream."""
        ss = np.random.SeedSequence((self.seed,) + self.path)
        return np.random.Generator(np.random.PCG64(ss))


def as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    return RngStream(int(rng))
