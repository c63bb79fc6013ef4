"""z-measures on Young diagrams, their mixtures, growth sampling and lattice configurations.

The growth sampler keeps a diagram as its interlacing sequences of addable
contents ``x_1 < ... < x_m`` and removable contents ``y_1 < ... < y_{m-1}``.
The dimension ratio ``dim(lam) / ((n+1) dim(mu))`` for adding the box of
content ``x_k`` equals ``prod_j (x_k - y_j) / prod_{l != k} (x_k - x_l)``,
so one step costs O(m^2) with m the number of corners.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

import numba
import numpy as np

from .arith import EXACT, FLOAT, abs2_shift, check_mode, rising_factorial, to_real, z_parts
from .configs import LatticeConfiguration, PointConfiguration
from .errors import DomainError, ResourceCapError
from .partitions import (
    ENUMERATION_CAP,
    FrobeniusCoords,
    Partition,
    addable_removable,
    add_box,
    box_data,
    covers,
    dimension,
    enumerate_partitions,
    frobenius,
    transpose,
)

#: Largest diagram size summed over by :class:`LatticeCorrelationTable`.
BRUTE_FORCE_MAX_N = 40
#: Uniforms drawn per chunk by the batch samplers.
_CHUNK_UNIFORMS = 1 << 22


def _t_of(zr, zi):
    return zr * zr + zi * zi


def zmeasure_prob(z, lam: Partition, mode: str = EXACT):
    """``P_z^(n)(lam)`` with ``n = |lam|``.

    The factor ``|z|^2`` of the box (1,1) is cancelled against the first
    factor of the rising factorial, so ``z = 0`` is handled by the same formula.
    """
    zr, zi = z_parts(z, mode)
    n = lam.n
    if n == 0:
        return Fraction(1) if mode == EXACT else 1.0
    t = _t_of(zr, zi)
    num = Fraction(1) if mode == EXACT else 1.0
    for i, j, c, _ in box_data(lam):
        if (i, j) != (1, 1):
            num *= abs2_shift(zr, zi, c)
    den = rising_factorial(t + 1, n - 1)
    d = dimension(lam)
    if mode == EXACT:
        return num / den * Fraction(d * d, math.factorial(n))
    return num / den * math.exp(2 * math.log(d) - math.lgamma(n + 1))


def zmeasure_law(z, n: int, mode: str = EXACT) -> dict[Partition, object]:
    return {lam: zmeasure_prob(z, lam, mode) for lam in enumerate_partitions(n)}


def normalization_check(z, n: int) -> bool:
    """``sum over Y_n of P_z^(n) == 1`` exactly, in scaled integer arithmetic.

    Writing ``z = (p + i r) / q`` every ``|z + c|^2 q^2`` and ``(t + k) q^2`` is
    an integer, and the common powers of ``q`` cancel.
    """
    zr, zi = z_parts(z, EXACT)
    if n == 0:
        return True
    q = math.lcm(zr.denominator, zi.denominator)
    p, r = int(zr * q), int(zi * q)

    @lru_cache(maxsize=None)
    def row_product(i: int, length: int) -> int:
        # product over boxes (i, 1..length) of q^2 |z + j - i|^2, skipping (1, 1)
        if length == 0:
            return 1
        c = length - i
        f = 1 if (i, length) == (1, 1) else (p + c * q) ** 2 + r * r
        return row_product(i, length - 1) * f

    total = 0
    for lam in enumerate_partitions(n):
        num = 1
        for i, part in enumerate(lam.parts, start=1):
            num *= row_product(i, part)
        d = dimension(lam)
        total += num * d * d
    tq = p * p + r * r
    den = math.factorial(n)
    for k in range(1, n):
        den *= tq + k * q * q
    return total == den


def coherency_check(z, n: int, prob=None) -> bool:
    """``P^(n)(mu) == sum_{lam > mu} dim(mu)/dim(lam) P^(n+1)(lam)`` for all ``mu`` in Y_n.

    ``prob(lam)`` overrides the level-(n+1) probabilities (harness sanity checks).
    """
    prob = prob or (lambda lam: zmeasure_prob(z, lam))
    upper = {lam: prob(lam) for lam in enumerate_partitions(n + 1)}
    for mu in enumerate_partitions(n):
        dim_mu = dimension(mu)
        addable, _ = addable_removable(mu)
        s = Fraction(0)
        for row, _ in addable:
            lam = add_box(mu, row)
            s += Fraction(dim_mu, dimension(lam)) * upper[lam]
        if s != zmeasure_prob(z, mu):
            return False
    return True


def growth_transition(z, mu: Partition, lam: Partition, mode: str = EXACT):
    """Probability of the growth step ``mu -> lam``."""
    box = covers(lam, mu)
    if box is None:
        raise DomainError(f"{lam} does not cover {mu}")
    zr, zi = z_parts(z, mode)
    n = mu.n
    i, j = box
    w = abs2_shift(zr, zi, j - i)
    if mode == EXACT:
        return w * Fraction(dimension(lam), dimension(mu) * (n + 1)) / (_t_of(zr, zi) + n)
    return w * dimension(lam) / (dimension(mu) * (n + 1)) / (_t_of(zr, zi) + n)


def transition_law(z, mu: Partition, mode: str = EXACT) -> dict[Partition, object]:
    addable, _ = addable_removable(mu)
    out = {}
    for row, _ in addable:
        lam = add_box(mu, row)
        out[lam] = growth_transition(z, mu, lam, mode)
    return out


# -- compiled growth kernel ---------------------------------------------------


@numba.njit(cache=True, nogil=True)
def _grow_batch(zr, zi, sizes, u, rowcap, rows_out, a2_out, b2_out):
    t = zr * zr + zi * zi
    nmax = 0
    for s in range(sizes.shape[0]):
        if sizes[s] > nmax:
            nmax = sizes[s]
    xs = np.empty(nmax + 2, np.int64)
    xrow = np.empty(nmax + 2, np.int64)
    ys = np.empty(nmax + 2, np.int64)
    w = np.empty(nmax + 2, np.float64)
    rows = np.zeros(nmax + 2, np.int64)
    pos = 0
    for s in range(sizes.shape[0]):
        n = sizes[s]
        m = 1
        xs[0] = 0
        xrow[0] = 0
        nrows = 0
        for step in range(n):
            total = 0.0
            for k in range(m):
                xk = xs[k]
                v = (zr + xk) * (zr + xk) + zi * zi
                for j in range(m - 1):
                    v *= xk - ys[j]
                for l in range(m):
                    if l != k:
                        v /= xk - xs[l]
                w[k] = v
                total += v
            target = u[pos] * total
            pos += 1
            k = 0
            acc = w[0]
            while acc <= target and k < m - 1:
                k += 1
                acc += w[k]
            while w[k] <= 0.0 and k > 0:
                k -= 1
            c = xs[k]
            r = xrow[k]
            rows[r] += 1
            if r == nrows:
                nrows += 1
            left = k > 0 and ys[k - 1] == c - 1
            right = k < m - 1 and ys[k] == c + 1
            if not left and not right:
                for l in range(m - 1, k, -1):
                    xs[l + 1] = xs[l]
                    xrow[l + 1] = xrow[l]
                for j in range(m - 2, k - 1, -1):
                    ys[j + 1] = ys[j]
                xs[k] = c - 1
                xrow[k] = r + 1
                xs[k + 1] = c + 1
                xrow[k + 1] = r
                ys[k] = c
                m += 1
            elif left and not right:
                ys[k - 1] = c
                xs[k] = c + 1
                xrow[k] = r
            elif right and not left:
                xs[k] = c - 1
                xrow[k] = r + 1
                ys[k] = c
            else:
                for l in range(k, m - 1):
                    xs[l] = xs[l + 1]
                    xrow[l] = xrow[l + 1]
                ys[k - 1] = c
                for j in range(k, m - 2):
                    ys[j] = ys[j + 1]
                m -= 1
        d = 0
        while d < nrows and rows[d] > d:
            d += 1
        for i in range(d):
            a2_out[s, i] = 2 * (rows[i] - i) - 1
            col = 0
            while col < nrows and rows[col] > i:
                col += 1
            b2_out[s, i] = 2 * (col - i) - 1
        for i in range(min(nrows, rowcap)):
            rows_out[s, i] = rows[i]
        for i in range(nrows):
            rows[i] = 0


@dataclass
class GrowthSamples:
    """Batch output: padded Frobenius numerators (0 = absent) and optional row lengths."""

    sizes: np.ndarray
    a2: np.ndarray
    b2: np.ndarray
    rows: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.sizes.shape[0]

    def frobenius(self, s: int) -> FrobeniusCoords:
        a = self.a2[s]
        b = self.b2[s]
        return FrobeniusCoords(tuple(int(v) for v in a[a > 0]), tuple(int(v) for v in b[b > 0]))

    def partition(self, s: int) -> Partition:
        if self.rows is None:
            from .partitions import from_frobenius

            return from_frobenius(self.frobenius(s))
        r = self.rows[s]
        return Partition(tuple(int(v) for v in r[r > 0]))


def _grow(z, sizes: np.ndarray, rng: np.random.Generator, keep_rows: bool) -> GrowthSamples:
    zr, zi = z_parts(z, FLOAT)
    sizes = np.asarray(sizes, dtype=np.int64)
    if sizes.size and sizes.min() < 0:
        raise DomainError("sizes must be nonnegative")
    nmax = int(sizes.max()) if sizes.size else 0
    dcap = max(1, math.isqrt(nmax))
    rowcap = nmax if keep_rows else 0
    count = sizes.shape[0]
    a2 = np.zeros((count, dcap), np.int64)
    b2 = np.zeros((count, dcap), np.int64)
    rows = np.zeros((count, rowcap), np.int64)
    start = 0
    while start < count:
        stop = start
        budget = 0
        while stop < count and (stop == start or budget + sizes[stop] <= _CHUNK_UNIFORMS):
            budget += int(sizes[stop])
            stop += 1
        u = rng.random(budget)
        _grow_batch(
            float(zr), float(zi), sizes[start:stop], u, rowcap,
            rows[start:stop], a2[start:stop], b2[start:stop],
        )
        start = stop
    return GrowthSamples(sizes, a2, b2, rows if keep_rows else None)


def sample_growth_batch(z, n: int, size: int, rng: np.random.Generator, keep_rows: bool = True) -> GrowthSamples:
    """``size`` independent diagrams from ``P_z^(n)`` by sequential growth."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    return _grow(z, np.full(size, n, dtype=np.int64), rng, keep_rows)


def sample_growth(z, n: int, rng: np.random.Generator) -> Partition:
    if n < 1:
        raise DomainError("n must be >= 1")
    return sample_growth_batch(z, n, 1, rng).partition(0)


def empirical_law(samples: GrowthSamples) -> dict[Partition, float]:
    if samples.rows is None:
        raise ValueError("row lengths were not kept")
    uniq, counts = np.unique(samples.rows, axis=0, return_counts=True)
    total = counts.sum()
    out = {}
    for r, c in zip(uniq, counts):
        out[Partition(tuple(int(v) for v in r[r > 0]))] = c / total
    return out


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(float(p.get(k, 0)) - float(q.get(k, 0))) for k in keys)


# -- mixed z-measures --------------------------------------------------------


def neg_binomial_weight(t, xi, n: int, mode: str = FLOAT):
    """``pi_{t,xi}(n) = (1-xi)^t (t)_n / n! xi^n``; exact mode needs integer ``t``."""
    if check_mode(mode) == EXACT:
        t, xi = to_real(t, EXACT), to_real(xi, EXACT)
        if t.denominator != 1:
            raise DomainError("exact negative-binomial weights need an integer t")
    else:
        t, xi = float(t), float(xi)
    if not t > 0 or not 0 < xi < 1:
        raise DomainError("need t > 0 and 0 < xi < 1")
    if mode == EXACT:
        return (1 - xi) ** int(t) * rising_factorial(t, n) / math.factorial(n) * xi**n
    log = t * math.log1p(-xi) + math.lgamma(t + n) - math.lgamma(t) - math.lgamma(n + 1) + n * math.log(xi)
    return math.exp(log)


def neg_binomial_tail_bound(t, xi, N: int) -> float:
    """Upper bound on ``sum_{n > N} pi_{t,xi}(n)`` from the ratio ``xi (t+n)/(n+1)``."""
    t, xi = float(t), float(xi)
    r = xi * max(1.0, (t + N + 1) / (N + 2))
    if r >= 1:
        return math.inf
    return neg_binomial_weight(t, xi, N + 1) / (1 - r)


def truncation_level(t, xi, tail_eps: float, cap: int = BRUTE_FORCE_MAX_N) -> int:
    """Smallest ``N <= cap`` whose certified tail bound is below ``tail_eps``."""
    for N in range(cap + 1):
        if neg_binomial_tail_bound(t, xi, N) < tail_eps:
            return N
    raise ResourceCapError(
        f"tail below {tail_eps} needs diagrams beyond n = {cap}; use a smaller xi or a larger tail"
    )


def mixed_prob(z, xi, lam: Partition) -> float:
    zr, zi = z_parts(z, FLOAT)
    return zmeasure_prob((zr, zi), lam, FLOAT) * neg_binomial_weight(_t_of(zr, zi), xi, lam.n)


def sample_mixed_batch(z, xi, size: int, rng: np.random.Generator, keep_rows: bool = False) -> GrowthSamples:
    """Diagrams from the mixed z-measure: size ``n ~ pi_{t,xi}``, then growth."""
    zr, zi = z_parts(z, FLOAT)
    t = _t_of(zr, zi)
    xi = float(xi)
    if t == 0:
        raise DomainError("z must be nonzero")
    if not 0 < xi < 1:
        raise DomainError("xi must lie in (0, 1)")
    # numpy counts failures before t successes of probability 1 - xi, i.e. pi_{t,xi}
    sizes = rng.negative_binomial(t, 1 - xi, size=size).astype(np.int64)
    return _grow(z, sizes, rng, keep_rows)


def sample_mixed(z, xi, rng: np.random.Generator) -> Partition:
    return sample_mixed_batch(z, xi, 1, rng, keep_rows=True).partition(0)


# -- lattice configurations --------------------------------------------------


def lattice_config(lam: Partition) -> LatticeConfiguration:
    """``{-b_1, ..., -b_d, a_d, ..., a_1}`` in Z + 1/2."""
    fc = frobenius(lam)
    return LatticeConfiguration(tuple(-v for v in fc.b2) + fc.a2)


def scaled_config(c: LatticeConfiguration, xi) -> PointConfiguration:
    """Embed the lattice in the punctured line by ``x -> (1 - xi) x``."""
    if isinstance(xi, (int, Fraction)):
        factor = 1 - Fraction(xi)
        pts = tuple(factor * Fraction(v, 2) for v in c.points2)
    else:
        factor = 1.0 - float(xi)
        pts = tuple(factor * v / 2 for v in c.points2)
    if not 0 < factor < 1:
        raise DomainError("xi must lie in (0, 1)")
    return PointConfiguration(pts)


@dataclass(frozen=True)
class CorrelationValue:
    value: float
    tail_bound: float


class LatticeCorrelationTable:
    """Exhaustive list of ``(configuration, mixed weight)`` over diagrams with ``n <= N``.

    ``N`` is the smallest level with certified negative-binomial tail below
    ``tail_eps``. Inner sums over each level are exact rationals when ``z``
    and ``xi`` are rational; the common factor ``(1 - xi)^t`` is applied in
    floating point at the end.
    """

    def __init__(self, z, xi, tail_eps: float, cap: int = BRUTE_FORCE_MAX_N):
        try:
            self.zr, self.zi = z_parts(z, EXACT)
            self.xi = to_real(xi, EXACT)
            self.exact = True
        except Exception:
            self.zr, self.zi = z_parts(z, FLOAT)
            self.xi = float(xi)
            self.exact = False
        t = _t_of(self.zr, self.zi)
        if t == 0:
            raise DomainError("z must be nonzero")
        if not 0 < self.xi < 1:
            raise DomainError("xi must lie in (0, 1)")
        self.t = t
        self.N = truncation_level(float(t), float(self.xi), tail_eps, cap=min(cap, ENUMERATION_CAP))
        self.tail = neg_binomial_tail_bound(float(t), float(self.xi), self.N)
        self.prefactor = (1 - float(self.xi)) ** float(t)
        mode = EXACT if self.exact else FLOAT
        self.entries: list[tuple[frozenset, object]] = []
        for n in range(self.N + 1):
            level = rising_factorial(t, n) / math.factorial(n) * self.xi**n
            for lam in enumerate_partitions(n):
                w = zmeasure_prob((self.zr, self.zi), lam, mode) * level
                if w:
                    self.entries.append((frozenset(lattice_config(lam).points2), w))

    def rho(self, points: Iterable) -> CorrelationValue:
        pts2 = {int(Fraction(p) * 2) for p in points}
        if any(v % 2 == 0 for v in pts2):
            raise DomainError("points must lie in Z + 1/2")
        s = sum((w for cfg, w in self.entries if pts2 <= cfg), Fraction(0) if self.exact else 0.0)
        return CorrelationValue(float(s) * self.prefactor, self.tail)


@lru_cache(maxsize=8)
def _table(z_key, xi_key, tail_eps):
    return LatticeCorrelationTable(z_key, xi_key, tail_eps)


def brute_force_correlation(z, xi, points: Iterable, tail_eps: float = 1e-12) -> CorrelationValue:
    """Probability that the mixed lattice configuration contains ``points``.

    The returned ``value`` is the truncated sum; the true value lies in
    ``[value, value + tail_bound]``.
    """
    if tail_eps <= 0:
        raise DomainError("tail_eps must be positive")
    try:
        zk = z_parts(z, EXACT)
        xk = to_real(xi, EXACT)
    except Exception:
        zk = z_parts(z, FLOAT)
        xk = float(xi)
    return _table(zk, xk, tail_eps).rho(points)


# -- degenerations -----------------------------------------------------------


def plancherel_limit_check(n: int, zbig) -> float:
    """``max over Y_n of |P_zbig^(n)(lam) - dim(lam)^2 / n!|``."""
    if n > 8:
        raise ResourceCapError("plancherel_limit_check is exhaustive up to n = 8")
    dev = 0.0
    for lam in enumerate_partitions(n):
        d = dimension(lam)
        p = zmeasure_prob(zbig, lam, FLOAT)
        dev = max(dev, abs(p - d * d / math.factorial(n)))
    return dev


def transpose_symmetry_check(z, n: int) -> bool:
    """``P_{-z}(lam) == P_z(lam')`` and ``P_{conj z}(lam) == P_z(lam)`` exactly."""
    zr, zi = z_parts(z, EXACT)
    for lam in enumerate_partitions(n):
        p = zmeasure_prob((zr, zi), lam)
        if zmeasure_prob((zr, -zi), lam) != p:
            return False
        if zmeasure_prob((-zr, -zi), transpose(lam)) != p:
            return False
    return True
