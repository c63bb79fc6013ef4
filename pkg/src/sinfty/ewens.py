"""Ewens measures on S(n) and on virtual permutations."""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .arith import EXACT, FLOAT, check_mode, rising_factorial, to_real
from .errors import DomainError
from .permutations import (
    BisymmetricElement,
    Permutation,
    VirtualPermutationPrefix,
    act_perm,
    all_permutations,
    canonical_projection,
    cocycle_c,
    coords_from_perm,
    num_cycles,
    perm_from_coords,
)

__all__ = [
    "rising_factorial",
    "ewens_weight",
    "nu_coordinate_law",
    "sample_ewens",
    "sample_ewens_coords",
    "normalization_check",
    "consistency_check",
    "product_structure_check",
    "radon_nikodym_check",
    "num_cycles_marginal",
]


def _param(t, mode):
    t = to_real(t, mode)
    if t < 0:
        raise DomainError(f"Ewens parameter must be >= 0, got {t}")
    return t


def ewens_weight(t, s: Permutation, mode: str = EXACT):
    """``t**[s] / (t (t+1) ... (t+n-1))``; at ``t = 0`` the limit, uniform on n-cycles."""
    t = _param(t, mode)
    n = s.degree
    k = num_cycles(s)
    if t == 0:
        if k != 1:
            return Fraction(0) if mode == EXACT else 0.0
        return 1 / rising_factorial(Fraction(1) if mode == EXACT else 1.0, n - 1)
    return t**k / rising_factorial(t, n)


def nu_coordinate_law(t, m: int, mode: str = EXACT) -> list:
    """Law of the m-th coordinate: ``t/(t+m-1)`` at 0, ``1/(t+m-1)`` elsewhere."""
    t = _param(t, mode)
    if t == 0:
        raise DomainError("the coordinate law degenerates at t = 0")
    if m < 1:
        raise DomainError("m must be >= 1")
    den = t + m - 1
    one = Fraction(1) if mode == EXACT else 1.0
    return [t / den] + [one / den] * (m - 1)


def sample_ewens_coords(t, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent coordinate vectors, shape ``(size, n)``."""
    t = float(to_real(t, FLOAT))
    if t <= 0:
        raise DomainError("sampling requires t > 0")
    if n < 1:
        raise DomainError("n must be >= 1")
    out = np.zeros((size, n), dtype=np.int64)
    for m in range(2, n + 1):
        u = rng.random(size)
        nonzero = u >= t / (t + m - 1)
        out[nonzero, m - 1] = rng.integers(1, m, size=int(nonzero.sum()))
    return out


def sample_ewens(t, n: int, rng: np.random.Generator) -> VirtualPermutationPrefix:
    return VirtualPermutationPrefix(tuple(int(v) for v in sample_ewens_coords(t, n, 1, rng)[0]))


def num_cycles_marginal(t, n: int, mode: str = EXACT) -> list:
    """Exact law of the number of cycles under the Ewens measure, by summation over S(n)."""
    t = _param(t, mode)
    counts = defaultdict(int)
    for s in all_permutations(n):
        counts[num_cycles(s)] += 1
    norm = rising_factorial(t, n)
    return [counts.get(k, 0) * t**k / norm for k in range(n + 1)]


def normalization_check(t, n: int) -> bool:
    """``sum over S(n) of t**[x] == t (t+1) ... (t+n-1)`` exactly."""
    t = _param(t, EXACT)
    return sum(t ** num_cycles(s) for s in all_permutations(n)) == rising_factorial(t, n)


def consistency_check(
    t, n: int, weight: Optional[Callable[[Permutation], Fraction]] = None
) -> bool:
    """Pushforward of the level-n measure under the canonical projection equals level n-1.

    ``weight`` overrides the level-n weights (used to confirm the check can fail).
    """
    if n < 2:
        raise DomainError("consistency needs n >= 2")
    t = _param(t, EXACT)
    weight = weight or (lambda s: ewens_weight(t, s))
    fibers: dict[Permutation, Fraction] = defaultdict(Fraction)
    for s in all_permutations(n):
        fibers[canonical_projection(s)] += weight(s)
    return all(fibers[y] == ewens_weight(t, y) for y in all_permutations(n - 1))


def product_structure_check(t, n: int) -> bool:
    """The coordinate bijection carries the Ewens weight to the product of coordinate laws."""
    t = _param(t, EXACT)
    laws = [nu_coordinate_law(t, m) for m in range(1, n + 1)]
    for s in all_permutations(n):
        x = coords_from_perm(s)
        prod = Fraction(1)
        for m, i in enumerate(x.coords, start=1):
            prod *= laws[m - 1][i]
        if prod != ewens_weight(t, s):
            return False
    return True


def radon_nikodym_check(t, x: VirtualPermutationPrefix, g: BisymmetricElement, mode: str = EXACT) -> bool:
    """``mu(x_n . g) / mu(x_n) == t ** c(x, g)`` at a level where ``c`` is stable."""
    t = _param(t, check_mode(mode))
    if t == 0:
        raise DomainError("the Radon-Nikodym identity needs t > 0")
    c = cocycle_c(x, g)
    level = max(x.level, g.degree + 1)
    xn = perm_from_coords(x.extended(level))
    ratio = ewens_weight(t, act_perm(xn, g), mode) / ewens_weight(t, xn, mode)
    expected = t**c
    if mode == FLOAT:
        return abs(ratio - expected) <= 1e-12 * max(1.0, abs(expected))
    return ratio == expected
