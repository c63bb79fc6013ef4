"""Young diagrams: enumeration, hook lengths, contents, Frobenius coordinates.

Half-integer Frobenius coordinates are stored as odd integer numerators over an
implicit denominator 2, so every identity involving them stays exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence, Union

from .errors import DomainError, ResourceCapError

#: Largest n accepted by :func:`enumerate_partitions` unless overridden.
ENUMERATION_CAP = 60
#: Above this size :func:`log_dimension` switches from exact integers to lgamma sums.
EXACT_DIMENSION_MAX = 150

Real = Union[Fraction, float]


@dataclass(frozen=True, order=False)
class Partition:
    """A Young diagram given by its weakly decreasing row lengths."""

    parts: tuple[int, ...] = ()
    n: int = field(init=False, compare=False)

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        for i, p in enumerate(parts):
            if p < 1:
                raise ValueError(f"parts must be positive, got {parts}")
            if i and parts[i - 1] < p:
                raise ValueError(f"parts must be weakly decreasing, got {parts}")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "n", sum(parts))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __str__(self) -> str:
        return to_string(self)

    def row(self, i: int) -> int:
        """Length of row ``i`` (1-based); zero past the last row."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    @classmethod
    def parse(cls, text: str) -> "Partition":
        return from_string(text)


@dataclass(frozen=True)
class FrobeniusCoords:
    """Modified Frobenius coordinates; ``a2``/``b2`` hold ``2*a_i`` and ``2*b_i``."""

    a2: tuple[int, ...]
    b2: tuple[int, ...]

    def __post_init__(self):
        a2 = tuple(int(v) for v in self.a2)
        b2 = tuple(int(v) for v in self.b2)
        if len(a2) != len(b2):
            raise ValueError("a and b must have the same length")
        for seq in (a2, b2):
            if any(v <= 0 or v % 2 == 0 for v in seq):
                raise ValueError("Frobenius coordinates are positive half-integers")
            if any(x <= y for x, y in zip(seq, seq[1:])):
                raise ValueError("Frobenius coordinates must strictly decrease")
        object.__setattr__(self, "a2", a2)
        object.__setattr__(self, "b2", b2)

    @property
    def d(self) -> int:
        return len(self.a2)

    @property
    def a(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, 2) for v in self.a2)

    @property
    def b(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, 2) for v in self.b2)

    @property
    def n(self) -> int:
        return (sum(self.a2) + sum(self.b2)) // 2


@dataclass(frozen=True)
class ThomaPoint:
    """A point (alpha, beta) of the Thoma set.

    Entries may be :class:`fractions.Fraction` (exact) or floats. Trailing
    zeros are dropped on construction.
    """

    alpha: tuple = ()
    beta: tuple = ()

    def __post_init__(self):
        alpha = _strip_zeros(self.alpha)
        beta = _strip_zeros(self.beta)
        exact = all(isinstance(v, (int, Fraction)) for v in alpha + beta)
        for name, seq in (("alpha", alpha), ("beta", beta)):
            for i, v in enumerate(seq):
                if v < 0:
                    raise ValueError(f"{name} entries must be nonnegative")
                if i and seq[i - 1] < v:
                    raise ValueError(f"{name} must be weakly decreasing")
        total = sum(alpha) + sum(beta)
        if (total > 1) if exact else (total > 1 + 1e-12):
            raise ValueError(f"sum(alpha) + sum(beta) = {total} exceeds 1")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def deficiency(self):
        """``1 - sum(alpha) - sum(beta)``."""
        return 1 - sum(self.alpha) - sum(self.beta)

    def swapped(self) -> "ThomaPoint":
        return ThomaPoint(self.beta, self.alpha)


def _strip_zeros(seq) -> tuple:
    out = [Fraction(v) if isinstance(v, int) else v for v in seq]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def to_string(lam: Partition) -> str:
    return ",".join(str(p) for p in lam.parts) if lam.parts else "-"


def from_string(text: str) -> Partition:
    text = text.strip()
    if text in ("-", ""):
        return Partition(())
    return Partition(tuple(int(p) for p in text.split(",")))


def count_partitions(n: int) -> int:
    """p(n) by Euler's pentagonal recurrence."""
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return p[n]


def enumerate_partitions(n: int, cap: int = ENUMERATION_CAP) -> list[Partition]:
    """All partitions of ``n`` in reverse lexicographic order, ``(n)`` first."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n > cap:
        raise ResourceCapError(f"enumeration of partitions of {n} exceeds cap {cap}")
    return [Partition(p) for p in _revlex(n)]


@lru_cache(maxsize=64)
def _revlex(n: int) -> tuple[tuple[int, ...], ...]:
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, largest: int, prefix: list[int]):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for k in range(min(remaining, largest), 0, -1):
            prefix.append(k)
            rec(remaining - k, k, prefix)
            prefix.pop()

    rec(n, n, [])
    return tuple(out)


def transpose(lam: Partition) -> Partition:
    if not lam.parts:
        return lam
    return Partition(tuple(sum(1 for p in lam.parts if p > j) for j in range(lam.parts[0])))


def box_data(lam: Partition) -> list[tuple[int, int, int, int]]:
    """``(row, column, content, hook)`` for every box, rows then columns, 1-based."""
    cols = transpose(lam).parts
    return [
        (i, j, j - i, (p - j) + (cols[j - 1] - i) + 1)
        for i, p in enumerate(lam.parts, start=1)
        for j in range(1, p + 1)
    ]


def contents(lam: Partition) -> list[int]:
    return [j - i for i, p in enumerate(lam.parts, start=1) for j in range(1, p + 1)]


def hook_product(lam: Partition) -> int:
    return math.prod(h for *_, h in box_data(lam))


def dimension(lam: Partition) -> int:
    """Number of standard Young tableaux of shape ``lam`` (hook-length formula)."""
    return math.factorial(lam.n) // hook_product(lam)


def log_dimension(lam: Partition) -> float:
    """``log(dim lam)``; exact up to :data:`EXACT_DIMENSION_MAX`, lgamma sums above."""
    if lam.n <= EXACT_DIMENSION_MAX:
        return math.log(dimension(lam))
    return math.lgamma(lam.n + 1) - sum(math.log(h) for *_, h in box_data(lam))


def frobenius(lam: Partition) -> FrobeniusCoords:
    d = sum(1 for i, p in enumerate(lam.parts, start=1) if p >= i)
    cols = transpose(lam).parts
    a2 = tuple(2 * (lam.parts[i] - i - 1) + 1 for i in range(d))
    b2 = tuple(2 * (cols[i] - i - 1) + 1 for i in range(d))
    return FrobeniusCoords(a2, b2)


def from_frobenius(fc: FrobeniusCoords) -> Partition:
    """Inverse of :func:`frobenius`."""
    d = fc.d
    arms = [(v - 1) // 2 for v in fc.a2]
    legs = [(v - 1) // 2 for v in fc.b2]
    rows = [arms[i] + i + 1 for i in range(d)]
    # rows below the diagonal block come from the legs: row r > d has length #{i : legs[i] + i + 1 >= r}
    height = legs[0] + 1 if d else 0
    for r in range(d + 1, height + 1):
        rows.append(sum(1 for i in range(d) if legs[i] + i + 1 >= r))
    return Partition(tuple(rows))


def thoma_embed(lam: Partition) -> ThomaPoint:
    """The point ``omega_lam = (a/n, b/n)`` with exact rational coordinates."""
    if lam.n == 0:
        raise DomainError("the empty diagram has no Thoma embedding")
    fc = frobenius(lam)
    n2 = 2 * lam.n
    return ThomaPoint(tuple(Fraction(v, n2) for v in fc.a2), tuple(Fraction(v, n2) for v in fc.b2))


def addable_removable(lam: Partition) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Addable and removable boxes as 1-based ``(row, column)`` pairs, top to bottom."""
    parts = lam.parts
    addable = []
    removable = []
    for i in range(len(parts) + 1):
        cur = parts[i] if i < len(parts) else 0
        if i == 0 or parts[i - 1] > cur:
            addable.append((i + 1, cur + 1))
    for i, p in enumerate(parts):
        nxt = parts[i + 1] if i + 1 < len(parts) else 0
        if p > nxt:
            removable.append((i + 1, p))
    return addable, removable


def add_box(lam: Partition, row: int) -> Partition:
    """Diagram obtained by appending a box to ``row`` (1-based); must be addable."""
    parts = list(lam.parts)
    if row == len(parts) + 1:
        parts.append(1)
    elif 1 <= row <= len(parts) and (row == 1 or parts[row - 2] > parts[row - 1]):
        parts[row - 1] += 1
    else:
        raise DomainError(f"cannot add a box to row {row} of {lam}")
    return Partition(tuple(parts))


def covers(lam: Partition, mu: Partition) -> tuple[int, int] | None:
    """The box ``lam / mu`` if ``lam`` is ``mu`` plus one box, else ``None``."""
    if lam.n != mu.n + 1:
        return None
    diff = None
    for i in range(max(len(lam), len(mu))):
        a, b = lam.row(i + 1), mu.row(i + 1)
        if a == b:
            continue
        if a != b + 1 or diff is not None:
            return None
        diff = (i + 1, a)
    return diff


def partitions_up_to(n_max: int, cap: int = ENUMERATION_CAP) -> Iterator[Partition]:
    for n in range(n_max + 1):
        yield from enumerate_partitions(n, cap)


def as_partition(obj: Union[Partition, Sequence[int], str]) -> Partition:
    if isinstance(obj, Partition):
        return obj
    if isinstance(obj, str):
        return from_string(obj)
    return Partition(tuple(obj))
