"""Finite symmetric groups, the canonical projection and virtual permutations.

Ground sets are 1-based in the API; ``images[k]`` stores ``sigma(k + 1)``.
Composition is right-to-left: ``compose(s, t)(k) == s(t(k))``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, NumericalError

#: How far past the prefix level :func:`cocycle_c` may extend while waiting for stabilization.
COCYCLE_LEVEL_SLACK = 16


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(v) for v in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1] if k <= len(self.images) else k

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __str__(self) -> str:
        return to_cycle_string(self)

    def extended(self, n: int) -> "Permutation":
        if n < self.degree:
            raise DomainError(f"cannot restrict a permutation of degree {self.degree} to {n}")
        return Permutation(self.images + tuple(range(self.degree + 1, n + 1)))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, cycles: Sequence[Sequence[int]], n: int | None = None) -> "Permutation":
        size = max([n or 0] + [max(c) for c in cycles if c])
        images = list(range(1, size + 1))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                images[a - 1] = b
        return cls(tuple(images))


@dataclass(frozen=True)
class CycleStats:
    num_cycles: int
    counts: dict[int, int]

    def m(self, k: int) -> int:
        return self.counts.get(k, 0)

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((k for k, c in self.counts.items() for _ in range(c)), reverse=True))


@dataclass(frozen=True)
class VirtualPermutationPrefix:
    """Coordinates ``(i_1, ..., i_n)`` with ``0 <= i_m < m`` of a point of S(n)."""

    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(v) for v in self.coords)
        for m, i in enumerate(coords, start=1):
            if not 0 <= i < m:
                raise ValueError(f"coordinate i_{m} = {i} outside 0..{m - 1}")
        object.__setattr__(self, "coords", coords)

    @property
    def level(self) -> int:
        return len(self.coords)

    def perm(self) -> Permutation:
        return perm_from_coords(self)

    def truncate(self, m: int) -> "VirtualPermutationPrefix":
        return VirtualPermutationPrefix(self.coords[:m])

    def extended(self, n: int) -> "VirtualPermutationPrefix":
        """Pad with zeros, i.e. new elements are fixed points."""
        return VirtualPermutationPrefix(self.coords + (0,) * max(0, n - self.level))

    def __str__(self) -> str:
        return " ".join(str(i) for i in self.coords)


@dataclass(frozen=True)
class BisymmetricElement:
    """``g = (g1, g2)`` acting on the right by ``x . g = g2^{-1} x g1``."""

    g1: Permutation
    g2: Permutation

    @property
    def degree(self) -> int:
        return max(self.g1.degree, self.g2.degree)

    def __mul__(self, other: "BisymmetricElement") -> "BisymmetricElement":
        return BisymmetricElement(compose(self.g1, other.g1), compose(self.g2, other.g2))

    @classmethod
    def diagonal(cls, h: Permutation) -> "BisymmetricElement":
        return cls(h, h)


def _common(s: Permutation, t: Permutation) -> tuple[Permutation, Permutation]:
    n = max(s.degree, t.degree)
    return s.extended(n), t.extended(n)


def compose(s: Permutation, t: Permutation) -> Permutation:
    s, t = _common(s, t)
    return Permutation(tuple(s.images[v - 1] for v in t.images))


def inverse(s: Permutation) -> Permutation:
    inv = [0] * s.degree
    for k, v in enumerate(s.images, start=1):
        inv[v - 1] = k
    return Permutation(tuple(inv))


def cycles(s: Permutation) -> list[tuple[int, ...]]:
    seen = [False] * (s.degree + 1)
    out = []
    for start in range(1, s.degree + 1):
        if seen[start]:
            continue
        cyc = []
        k = start
        while not seen[k]:
            seen[k] = True
            cyc.append(k)
            k = s.images[k - 1]
        out.append(tuple(cyc))
    return out


def cycle_stats(s: Permutation) -> CycleStats:
    counts: dict[int, int] = {}
    cyc = cycles(s)
    for c in cyc:
        counts[len(c)] = counts.get(len(c), 0) + 1
    return CycleStats(len(cyc), counts)


def num_cycles(s: Permutation) -> int:
    return len(cycles(s))


def to_cycle_string(s: Permutation) -> str:
    return "".join("(" + " ".join(str(k) for k in c) + ")" for c in cycles(s)) or "()"


def from_cycle_string(text: str, n: int | None = None) -> Permutation:
    groups = re.findall(r"\(([^()]*)\)", text)
    cyc = [tuple(int(v) for v in g.split()) for g in groups if g.strip()]
    return Permutation.from_cycles(cyc, n)


def all_permutations(n: int) -> Iterator[Permutation]:
    for p in itertools.permutations(range(1, n + 1)):
        yield Permutation(p)


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return Permutation(tuple(int(v) + 1 for v in rng.permutation(n)))


def canonical_projection(s: Permutation) -> Permutation:
    """Remove ``n`` from its cycle: ``i -> n -> j`` becomes ``i -> j``."""
    n = s.degree
    if n < 2:
        raise DomainError("canonical projection needs degree >= 2")
    images = list(s.images)
    j = images[n - 1]
    if j != n:
        images[images.index(n)] = j
    return Permutation(tuple(images[: n - 1]))


def coords_from_perm(s: Permutation) -> VirtualPermutationPrefix:
    coords = []
    cur = s
    for m in range(s.degree, 0, -1):
        v = cur.images[m - 1]
        coords.append(0 if v == m else v)
        if m > 1:
            cur = canonical_projection(cur)
    return VirtualPermutationPrefix(tuple(reversed(coords)))


def perm_from_coords(x: VirtualPermutationPrefix | Sequence[int]) -> Permutation:
    coords = x.coords if isinstance(x, VirtualPermutationPrefix) else tuple(x)
    images: list[int] = []
    for m, j in enumerate(coords, start=1):
        if not 0 <= j < m:
            raise ValueError(f"coordinate i_{m} = {j} outside 0..{m - 1}")
        if j == 0:
            images.append(m)
        else:
            # splice m into the cycle of j, right before j
            images[images.index(j)] = m
            images.append(j)
    return Permutation(tuple(images))


def act_perm(s: Permutation, g: BisymmetricElement) -> Permutation:
    n = s.degree
    if n < g.degree:
        raise DomainError(f"level {n} is below the degree {g.degree} of g")
    return compose(inverse(g.g2.extended(n)), compose(s, g.g1.extended(n)))


def act(x: VirtualPermutationPrefix, g: BisymmetricElement) -> VirtualPermutationPrefix:
    if x.level < g.degree:
        raise DomainError(f"level {x.level} is below the degree {g.degree} of g")
    return coords_from_perm(act_perm(perm_from_coords(x), g))


def cycle_difference(x: VirtualPermutationPrefix, g: BisymmetricElement, level: int) -> int:
    """``[x_n . g]_n - [x_n]_n`` at ``n = level`` (``x`` padded with fixed points)."""
    xn = perm_from_coords(x.extended(level).truncate(level))
    return num_cycles(act_perm(xn, g)) - num_cycles(xn)


def cocycle_c(x: VirtualPermutationPrefix, g: BisymmetricElement) -> int:
    """Stable value of the cycle-count change under ``g``.

    Evaluated at two consecutive levels starting from ``max(level, deg g + 1)``
    and raised until they agree.
    """
    level = max(x.level, g.degree + 1)
    limit = max(x.level, g.degree) + COCYCLE_LEVEL_SLACK
    prev = cycle_difference(x, g, level)
    while level < limit:
        level += 1
        cur = cycle_difference(x, g, level)
        if cur == prev:
            return cur
        prev = cur
    raise NumericalError(f"cycle difference did not stabilize by level {limit}")


def random_bisymmetric(m: int, rng: np.random.Generator) -> BisymmetricElement:
    return BisymmetricElement(random_permutation(m, rng), random_permutation(m, rng))
