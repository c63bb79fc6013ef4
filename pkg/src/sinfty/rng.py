"""Seedable, splittable random streams (PCG64 via ``numpy.random.SeedSequence``)."""
from __future__ import annotations

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def substreams(seed: int | np.random.SeedSequence, count: int) -> list[np.random.Generator]:
    """``count`` independent generators derived from ``seed``.

    The i-th stream depends only on ``(seed, i)``, so work split across
    replicas is reproducible regardless of how many workers run it.
    """
    if isinstance(seed, np.random.SeedSequence):
        entropy, key = seed.entropy, tuple(seed.spawn_key)
    else:
        entropy, key = seed, ()
    return [
        np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy, spawn_key=key + (i,))))
        for i in range(count)
    ]
