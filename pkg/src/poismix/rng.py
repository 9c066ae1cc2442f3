"""Seedable, splittable random streams.

Every stream is a ``SeedSequence`` identified by ``(seed, key)``; children
extend the key, so stream ``(seed, (1, 7))`` is the same no matter which
worker asks for it or in what order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RandomSource:
    seed: int
    key: tuple[int, ...] = ()

    def spawn(self, *index: int) -> "RandomSource":
        """Child stream addressed by ``index`` below this one."""
        return RandomSource(self.seed, self.key + tuple(int(i) for i in index))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))

    def uniforms(self, n: int) -> np.ndarray:
        return self.generator().random(n)


def as_source(rng: "RandomSource | int | None") -> RandomSource:
    if isinstance(rng, RandomSource):
        return rng
    if rng is None:
        return RandomSource(int(np.random.SeedSequence().entropy % (2**63)))
    return RandomSource(int(rng))
