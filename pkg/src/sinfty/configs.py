"""Finite point configurations on the real line and on the half-integer lattice."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


@dataclass(frozen=True)
class PointConfiguration:
    """A finite, sorted multiset of real positions."""

    positions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(sorted(self.positions)))

    def __len__(self) -> int:
        return len(self.positions)

    def __iter__(self):
        return iter(self.positions)

    @property
    def multiplicity_free(self) -> bool:
        p = self.positions
        return all(p[i] != p[i + 1] for i in range(len(p) - 1))

    def scaled(self, factor) -> "PointConfiguration":
        return PointConfiguration(tuple(factor * x for x in self.positions))


@dataclass(frozen=True)
class LatticeConfiguration:
    """Distinct points of Z + 1/2, stored as odd numerators ``2x``."""

    points2: tuple[int, ...] = ()

    def __post_init__(self):
        pts = tuple(sorted(int(v) for v in self.points2))
        if any(v % 2 == 0 for v in pts):
            raise ValueError("lattice points must be half-integers (odd numerators)")
        if len(set(pts)) != len(pts):
            raise ValueError("lattice configurations are multiplicity free")
        object.__setattr__(self, "points2", pts)

    @classmethod
    def from_points(cls, points: Iterable) -> "LatticeConfiguration":
        return cls(tuple(int(Fraction(p) * 2) for p in points))

    @property
    def points(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, 2) for v in self.points2)

    def __len__(self) -> int:
        return len(self.points2)

    def __contains__(self, x) -> bool:
        return int(Fraction(x) * 2) in self.points2

    def contains_all(self, points2: Sequence[int]) -> bool:
        s = set(self.points2)
        return all(v in s for v in points2)

    @property
    def balanced(self) -> bool:
        return sum(1 for v in self.points2 if v < 0) == sum(1 for v in self.points2 if v > 0)

    def to_point_configuration(self) -> PointConfiguration:
        return PointConfiguration(self.points)
