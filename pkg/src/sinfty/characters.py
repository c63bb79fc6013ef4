"""Characters of finite and infinite symmetric groups.

Irreducible characters of S(n) come from the Murnaghan-Nakayama rule on
beta-sets; extreme characters of S(infinity) from Thoma's multiplicative
formula in the supersymmetric power sums ``p_k``. Both are evaluated on cycle
types only.
"""
from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .arith import EXACT, FLOAT, check_mode, z_parts
from .errors import DomainError
from .partitions import Partition, ThomaPoint, as_partition, dimension, enumerate_partitions
from .permutations import Permutation, all_permutations, compose, cycle_stats, inverse
from .zmeasure import zmeasure_prob

#: Default lower bound accepted for the smallest Gram eigenvalue.
PSD_TOL = 1e-9

CycleTypeLike = Union[Partition, Sequence[int]]


def _cycle_type(rho: CycleTypeLike, n: int | None = None) -> tuple[int, ...]:
    parts = tuple(sorted((int(v) for v in rho), reverse=True))
    if any(v < 1 for v in parts):
        raise DomainError("cycle lengths must be positive")
    if n is not None:
        m = sum(parts)
        if m > n:
            raise DomainError(f"cycle type of size {m} does not fit in S({n})")
        parts += (1,) * (n - m)
    return parts


def class_size(rho: CycleTypeLike) -> int:
    """``n! / z_rho``: number of permutations with cycle type ``rho``."""
    parts = _cycle_type(rho)
    n = sum(parts)
    z = 1
    for k, mult in Counter(parts).items():
        z *= k**mult * math.factorial(mult)
    return math.factorial(n) // z


def cycle_types(n: int) -> list[tuple[int, ...]]:
    return [lam.parts for lam in enumerate_partitions(n)]


def p_k(omega: ThomaPoint, k: int):
    """``sum alpha_i^k + (-1)^(k-1) sum beta_j^k`` for ``k >= 2``."""
    if k < 2:
        raise DomainError("p_k on the Thoma set is defined for k >= 2 only")
    sign = 1 if k % 2 else -1
    return sum(a**k for a in omega.alpha) + sign * sum(b**k for b in omega.beta)


def extreme_character(omega: ThomaPoint, sigma) -> object:
    """Thoma's character ``prod_{k >= 2} p_k(omega)^{m_k(sigma)}``.

    ``sigma`` may be a :class:`Permutation` or a cycle type; 1-cycles are ignored.
    """
    if isinstance(sigma, Permutation):
        counts = cycle_stats(sigma).counts
    else:
        counts = Counter(_cycle_type(sigma))
    one = Fraction(1) if all(isinstance(v, Fraction) for v in omega.alpha + omega.beta) else 1.0
    out = one
    for k, mult in counts.items():
        if k >= 2:
            out *= p_k(omega, k) ** mult
    return out


def sign(sigma: Permutation) -> int:
    return -1 if (sigma.degree - cycle_stats(sigma).num_cycles) % 2 else 1


def sgn_twist_check(omega: ThomaPoint, n_max: int = 6) -> bool:
    """``chi^(alpha,beta) * sgn == chi^(beta,alpha)`` on every element of S(n), n <= n_max."""
    swapped = omega.swapped()
    for n in range(1, n_max + 1):
        for s in all_permutations(n):
            if extreme_character(omega, s) * sign(s) != extreme_character(swapped, s):
                return False
    return True


@lru_cache(maxsize=200_000)
def _mn(beta: tuple[int, ...], rho: tuple[int, ...]) -> int:
    # beta: strictly decreasing beta-set of the current diagram; rho: remaining cycle lengths
    if not rho:
        return 1
    k, rest = rho[0], rho[1:]
    bset = set(beta)
    total = 0
    for b in beta:
        nb = b - k
        if nb < 0 or nb in bset:
            continue
        height = sum(1 for c in beta if nb < c < b)
        new = tuple(sorted((bset - {b}) | {nb}, reverse=True))
        total += (-1) ** height * _mn(new, rest)
    return total


def mn_character(lam, rho: CycleTypeLike) -> int:
    """Irreducible character value ``chi^lam`` on the class ``rho`` (padded with 1-cycles)."""
    lam = as_partition(lam)
    parts = _cycle_type(rho)
    if sum(parts) > lam.n:
        raise DomainError(f"cycle type of size {sum(parts)} exceeds |lam| = {lam.n}")
    parts += (1,) * (lam.n - sum(parts))
    ell = len(lam.parts)
    beta = tuple(p + ell - 1 - i for i, p in enumerate(lam.parts))
    return _mn(beta, parts)


def character_table(n: int) -> list[tuple[Partition, tuple[int, ...], int]]:
    return [(lam, rho, mn_character(lam, rho)) for lam in enumerate_partitions(n) for rho in cycle_types(n)]


def orthogonality_check(n: int) -> bool:
    """``sum_rho |class rho| chi^lam_rho chi^mu_rho == n! delta(lam, mu)``."""
    lams = enumerate_partitions(n)
    rhos = cycle_types(n)
    sizes = [class_size(r) for r in rhos]
    table = [[mn_character(lam, r) for r in rhos] for lam in lams]
    fact = math.factorial(n)
    for i in range(len(lams)):
        for j in range(i, len(lams)):
            s = sum(c * a * b for c, a, b in zip(sizes, table[i], table[j]))
            if s != (fact if i == j else 0):
                return False
    return True


def chi_z(z, rho: CycleTypeLike, n: int | None = None, mode: str = EXACT):
    """``chi_z`` on the class ``rho`` via its expansion at level ``n`` (default ``|rho|``).

    The value is independent of ``n``; the expansion coefficients are the
    z-measure weights ``P_z^(n)(lam)`` against normalized characters.
    """
    parts = _cycle_type(rho)
    m = sum(parts)
    n = m if n is None else n
    if n < m:
        raise DomainError(f"level {n} is below the support size {m} of the cycle type")
    check_mode(mode)
    zp = z_parts(z, mode)
    total = Fraction(0) if mode == EXACT else 0.0
    for lam in enumerate_partitions(n):
        p = zmeasure_prob(zp, lam, mode)
        if not p:
            continue
        chi = mn_character(lam, parts)
        if mode == EXACT:
            total += p * Fraction(chi, dimension(lam))
        else:
            total += p * (chi / dimension(lam))
    return total


def chi_z_transposition_closed_form(z, mode: str = EXACT):
    """``(z + conj z) / (|z|^2 + 1)``."""
    zr, zi = z_parts(z, mode)
    return 2 * zr / (zr * zr + zi * zi + 1)


def chi_z_function(z, n: int, mode: str = FLOAT) -> Callable[[Permutation], object]:
    """``chi_z`` restricted to S(n) as a callable on permutations (class values cached)."""
    cache: dict[tuple[int, ...], object] = {}

    def f(s: Permutation):
        ct = tuple(k for k in cycle_stats(s).cycle_type() if k > 1)
        if ct not in cache:
            cache[ct] = chi_z(z, ct, n, mode)
        return cache[ct]

    return f


def gram_matrix(char: Callable[[Permutation], object], elements: Sequence[Permutation]) -> np.ndarray:
    """``[f(g_j^{-1} g_i)]_{i,j}`` as a float matrix."""
    inv = [inverse(g) for g in elements]
    k = len(elements)
    out = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            out[i, j] = float(char(compose(inv[j], elements[i])))
    return out


def gram_min_eigenvalue(char, elements: Sequence[Permutation]) -> float:
    g = gram_matrix(char, elements)
    return float(np.linalg.eigvalsh(0.5 * (g + g.T)).min())


def gram_psd_check(char, elements: Sequence[Permutation], tol: float = PSD_TOL) -> bool:
    """True iff the Gram matrix of ``char`` on ``elements`` has no eigenvalue below ``-tol``."""
    degrees = {g.degree for g in elements}
    if len(degrees) > 1:
        n = max(degrees)
        elements = [g.extended(n) for g in elements]
    return gram_min_eigenvalue(char, elements) >= -tol


def central_check(char, n: int) -> bool:
    """``char`` is constant on conjugacy classes of S(n) (exhaustive)."""
    seen: dict[tuple[int, ...], object] = {}
    for s in all_permutations(n):
        ct = cycle_stats(s).cycle_type()
        v = char(s)
        if ct in seen and seen[ct] != v:
            return False
        seen.setdefault(ct, v)
    return True
