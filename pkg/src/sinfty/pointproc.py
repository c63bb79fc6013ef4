"""Point processes: configurations from Thoma points, lifting, correlation estimators,
determinantal evaluation and a Poisson reference process."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from scipy import integrate, stats

from .configs import LatticeConfiguration, PointConfiguration
from .errors import DomainError, NumericalError
from .partitions import ThomaPoint

#: Highest correlation order handled by the estimators.
MAX_ORDER = 3


def thoma_to_config(omega: ThomaPoint) -> PointConfiguration:
    """``{alpha_i != 0} u {-beta_j != 0}``."""
    return PointConfiguration(tuple(a for a in omega.alpha if a) + tuple(-b for b in omega.beta if b))


def lift(c: PointConfiguration, t: float, rng: np.random.Generator) -> PointConfiguration:
    """Scale every position by one draw from the gamma law with shape ``t``."""
    if not t > 0:
        raise DomainError("the lifting parameter must be positive")
    s = rng.gamma(float(t))
    return PointConfiguration(tuple(s * float(x) for x in c.positions))


def unlift(c: PointConfiguration) -> PointConfiguration:
    """Divide by the total absolute mass; inverts :func:`lift` on configurations of mass 1."""
    mass = sum(abs(x) for x in c.positions)
    if mass == 0:
        return c
    return PointConfiguration(tuple(x / mass for x in c.positions))


def gamma_density(t: float, s):
    return stats.gamma.pdf(s, float(t))


# -- ray transform -------------------------------------------------------------


@dataclass(frozen=True)
class PiecewiseDensity:
    """A piecewise-constant density: ``values[i]`` on ``[edges[i], edges[i+1])``."""

    edges: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.edges) != len(self.values) + 1:
            raise DomainError("need one more edge than value")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise DomainError("edges must increase")

    def __call__(self, x: float) -> float:
        i = int(np.searchsorted(self.edges, x, side="right")) - 1
        if 0 <= i < len(self.values):
            return float(self.values[i])
        return 0.0


def ray_transform(rho1: PiecewiseDensity, t: float, x: float) -> float:
    """``int_0^inf g_t(s) rho1(x/s) ds/s`` with ``g_t`` the gamma density."""
    if x == 0:
        raise DomainError("the ray transform is evaluated off the origin")
    u = abs(x)
    total = 0.0
    for lo, hi, v in zip(rho1.edges, rho1.edges[1:], rho1.values):
        if v == 0:
            continue
        # magnitudes |x/s| covered by the piece on the side of x
        if x > 0:
            A, B = max(lo, 0.0), max(hi, 0.0)
        else:
            A, B = -min(hi, 0.0), -min(lo, 0.0)
        if not B > A:
            continue
        s_lo = u / B
        s_hi = u / A if A > 0 else np.inf
        val, err = integrate.quad(lambda s: gamma_density(t, s) / s, s_lo, s_hi, limit=200)
        if not math.isfinite(val) or err > 1e-6 * max(1.0, abs(val)):
            raise NumericalError(f"ray transform quadrature did not converge at x={x}")
        total += v * val
    return total


def ray_transform_bin_average(rho1: PiecewiseDensity, t: float, lo: float, hi: float, order: int = 8) -> float:
    g, w = np.polynomial.legendre.leggauss(order)
    xs = (lo + hi) / 2 + (hi - lo) / 2 * g
    return float(sum(wi * ray_transform(rho1, t, xi) for wi, xi in zip(w, xs)) / 2)


@dataclass(frozen=True)
class RayCheckReport:
    max_deviation: float
    max_se_units: float
    predicted: np.ndarray
    estimate: CorrelationEstimate


def ray_transform_check(rho1: PiecewiseDensity, t: float, bins: "BinSpec", configs: Sequence[PointConfiguration], rng: np.random.Generator) -> RayCheckReport:
    """Lift ``configs`` (samples of a process with first correlation ``rho1``) and
    compare the binned estimate with the bin-averaged ray transform."""
    lifted = [lift(c, t, rng) for c in configs]
    est = estimate_correlations(lifted, 1, bins)
    pred = np.array([ray_transform_bin_average(rho1, t, a, b) for a, b in zip(bins.lo, bins.hi)])
    dev = np.abs(est.values - pred)
    with np.errstate(divide="ignore", invalid="ignore"):
        se_units = np.where(est.stderr > 0, dev / est.stderr, np.where(dev > 0, np.inf, 0.0))
    return RayCheckReport(float(dev.max()), float(se_units.max()), pred, est)


# -- bins and estimators --------------------------------------------------------


@dataclass(frozen=True)
class BinSpec:
    """Non-overlapping bins ``[lo_i, hi_i)`` in increasing order; gaps are allowed."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise DomainError("bins need matching, nonempty lo and hi")
        for i, (a, b) in enumerate(zip(self.lo, self.hi)):
            if not a < b:
                raise DomainError("each bin needs lo < hi")
            if i and a < self.hi[i - 1]:
                raise DomainError("bins overlap or are out of order")

    @classmethod
    def linear(cls, segments: Iterable[tuple[float, float, int]]) -> "BinSpec":
        lo: list[float] = []
        hi: list[float] = []
        for a, b, k in segments:
            e = np.linspace(a, b, int(k) + 1)
            lo.extend(float(v) for v in e[:-1])
            hi.extend(float(v) for v in e[1:])
        return cls(tuple(lo), tuple(hi))

    def __len__(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.hi) - np.asarray(self.lo)

    def index(self, x) -> np.ndarray:
        """Bin index of each position, -1 outside every bin."""
        x = np.asarray(x, dtype=float)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        i = np.searchsorted(lo, x, side="right") - 1
        ok = (i >= 0) & (x < hi[np.clip(i, 0, None)])
        return np.where(ok, i, -1)

    def counts(self, sample_ids: np.ndarray, positions: np.ndarray, n_samples: int) -> np.ndarray:
        """Per-sample bin counts from flat ``(sample_id, position)`` pairs."""
        idx = self.index(positions)
        keep = idx >= 0
        out = np.zeros((n_samples, len(self)), np.int64)
        np.add.at(out, (np.asarray(sample_ids)[keep], idx[keep]), 1)
        return out

    def to_json(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class CorrelationEstimate:
    """Estimated correlation densities with standard errors.

    ``support`` is a :class:`BinSpec` (continuous) or a tuple of point tuples
    (discrete). For order ``k > 1`` on bins, ``values`` has shape ``(nbins,)*k``.
    """

    support: Union[BinSpec, tuple]
    order: int
    values: np.ndarray
    stderr: np.ndarray
    hits: np.ndarray
    samples: int
    seed: Optional[object] = None

    @property
    def poisson_stderr(self) -> np.ndarray:
        """``sqrt(hits)`` scaled like ``values``; the Poisson reference error."""
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(self.hits > 0, self.values / self.hits, 0.0)
        return scale * np.sqrt(self.hits)


def _tuple_counts(N: np.ndarray, k: int) -> np.ndarray:
    """Per-sample numbers of ordered k-tuples of distinct points, one point per bin index.

    ``N`` has shape ``(S, nb)``; the result has shape ``(S,) + (nb,)*k``.
    """
    N = N.astype(np.float64)
    if k == 1:
        return N
    nb = N.shape[1]
    eye = np.eye(nb)
    if k == 2:
        return np.einsum("si,sj->sij", N, N) - np.einsum("si,ij->sij", N, eye)
    prod = np.einsum("si,sj,sl->sijl", N, N, N)
    nn = np.einsum("si,sl->sil", N, N)
    prod -= np.einsum("ij,sil->sijl", eye, nn)  # i == j
    prod -= np.einsum("jl,sij->sijl", eye, nn)  # j == l
    prod -= np.einsum("il,sij->sijl", eye, nn)  # i == l
    diag = np.zeros((N.shape[0], nb, nb, nb))
    r = np.arange(nb)
    diag[:, r, r, r] = 2 * N
    return prod + diag


@dataclass
class CorrelationAccumulator:
    """Running sums for a correlation estimate; :meth:`merge` is associative."""

    support: Union[BinSpec, tuple]
    order: int
    total: np.ndarray = field(default=None, repr=False)
    total_sq: np.ndarray = field(default=None, repr=False)
    hits: np.ndarray = field(default=None, repr=False)
    samples: int = 0

    def __post_init__(self):
        if not 1 <= self.order <= MAX_ORDER:
            raise DomainError(f"correlation order must be in 1..{MAX_ORDER}")
        if isinstance(self.support, BinSpec):
            shape = (len(self.support),) * self.order
        else:
            self.support = tuple(tuple(int(v) for v in p) for p in self.support)
            if any(len(p) != self.order for p in self.support):
                raise DomainError("each discrete support tuple must have the correlation order")
            shape = (len(self.support),)
        if self.total is None:
            self.total = np.zeros(shape)
            self.total_sq = np.zeros(shape)
            self.hits = np.zeros(shape, np.int64)

    def add_bin_counts(self, N: np.ndarray) -> None:
        """Feed per-sample bin counts of shape ``(S, nbins)``."""
        if not isinstance(self.support, BinSpec):
            raise DomainError("bin counts need a binned support")
        for start in range(0, N.shape[0], 4096 if self.order < 3 else 64):
            X = _tuple_counts(N[start : start + (4096 if self.order < 3 else 64)], self.order)
            self.total += X.sum(axis=0)
            self.total_sq += (X * X).sum(axis=0)
            self.hits += np.rint(X.sum(axis=0)).astype(np.int64)
        self.samples += N.shape[0]

    def add_lattice(self, configs: Iterable[LatticeConfiguration]) -> None:
        if isinstance(self.support, BinSpec):
            raise DomainError("lattice configurations need a discrete support")
        for c in configs:
            hit = np.array([c.contains_all(p) for p in self.support], dtype=float)
            self.total += hit
            self.total_sq += hit
            self.hits += hit.astype(np.int64)
            self.samples += 1

    def add_configs(self, configs: Iterable[PointConfiguration]) -> None:
        if not isinstance(self.support, BinSpec):
            self.add_lattice(c if isinstance(c, LatticeConfiguration) else LatticeConfiguration.from_points(c) for c in configs)
            return
        configs = list(configs)
        ids = np.repeat(np.arange(len(configs)), [len(c) for c in configs])
        pos = np.array([float(x) for c in configs for x in c.positions], dtype=float)
        self.add_bin_counts(self.support.counts(ids, pos, len(configs)))

    def merge(self, other: "CorrelationAccumulator") -> "CorrelationAccumulator":
        if self.order != other.order or self.support != other.support:
            raise DomainError("cannot merge accumulators with different supports")
        return CorrelationAccumulator(
            self.support, self.order,
            self.total + other.total, self.total_sq + other.total_sq,
            self.hits + other.hits, self.samples + other.samples,
        )

    def estimate(self, seed=None, cell_measure: Optional[np.ndarray] = None) -> CorrelationEstimate:
        """Mean per-sample tuple counts divided by the cell measure.

        ``cell_measure`` defaults to the product of bin widths (continuous) and to
        1 (discrete). Standard errors come from the per-sample variance.
        """
        if self.samples == 0:
            raise DomainError("no samples were accumulated")
        S = self.samples
        mean = self.total / S
        var = np.maximum(self.total_sq / S - mean * mean, 0.0)
        se = np.sqrt(var / max(S - 1, 1))
        if cell_measure is None:
            if isinstance(self.support, BinSpec):
                w = self.support.widths
                cell_measure = w
                for _ in range(self.order - 1):
                    cell_measure = np.multiply.outer(cell_measure, w)
            else:
                cell_measure = np.ones_like(mean)
        return CorrelationEstimate(self.support, self.order, mean / cell_measure, se / cell_measure, self.hits.copy(), S, seed)


def estimate_correlations(samples: Iterable, order: int, support, seed=None) -> CorrelationEstimate:
    """Correlation estimate from a stream of configurations.

    ``support`` is a :class:`BinSpec` for real positions or a sequence of point
    tuples (half-integers) for lattice configurations.
    """
    if not isinstance(support, BinSpec):
        support = tuple(tuple(int(Fraction(x) * 2) for x in p) for p in support)
    acc = CorrelationAccumulator(support, order)
    batch: list = []
    for c in samples:
        batch.append(c)
        if len(batch) >= 4096:
            acc.add_configs(batch)
            batch = []
    if batch:
        acc.add_configs(batch)
    if acc.samples == 0:
        raise DomainError("empty sample stream")
    return acc.estimate(seed)


# -- determinantal evaluation ----------------------------------------------------


def det_correlation(kernel: Callable[[float, float], float], points: Sequence[float]) -> float:
    """``det [K(x_i, x_j)]``."""
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise DomainError("points must be pairwise distinct")
    if not pts:
        return 1.0
    M = np.array([[kernel(x, y) for y in pts] for x in pts], dtype=float)
    return float(np.linalg.det(M))


# -- Poisson reference process -----------------------------------------------------


Window = Union[tuple[float, float], Sequence[tuple[float, float]]]


def _windows(window: Window) -> list[tuple[float, float]]:
    if len(window) == 2 and not isinstance(window[0], (tuple, list)):
        return [(float(window[0]), float(window[1]))]
    return [(float(a), float(b)) for a, b in window]


def _evaluate(density, x: np.ndarray) -> np.ndarray:
    """Evaluate a density on an array, vectorized when the callable allows it."""
    try:
        out = np.asarray(density(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([density(v) for v in x], dtype=float)


def density_mass(density, lo: float, hi: float) -> float:
    if not callable(density):
        return float(density) * (hi - lo)
    val, _ = integrate.quad(density, lo, hi, limit=200)
    return val


def poisson_sample(density, window: Window, rng: np.random.Generator, bound: Optional[float] = None) -> PointConfiguration:
    """Poisson process with the given density (constant or callable) on disjoint windows.

    Positions are drawn by rejection against ``bound`` (default: 1.25 times the
    density maximum on a fine grid of each window).
    """
    pts: list[float] = []
    for lo, hi in _windows(window):
        if not hi > lo:
            raise DomainError("windows need lo < hi")
        mass = density_mass(density, lo, hi)
        if not math.isfinite(mass) or mass < 0:
            raise DomainError("the density mass on the window must be finite and nonnegative")
        count = int(rng.poisson(mass)) if mass > 0 else 0
        if not callable(density):
            pts.extend(rng.uniform(lo, hi, count).tolist())
            continue
        m = bound if bound is not None else 1.25 * float(_evaluate(density, np.linspace(lo, hi, 4097)).max())
        got: list[float] = []
        while len(got) < count:
            x = rng.uniform(lo, hi, 2 * (count - len(got)) + 8)
            u = rng.uniform(0, m, x.size)
            fx = _evaluate(density, x)
            got.extend(x[u < fx].tolist())
        pts.extend(got[:count])
    return PointConfiguration(tuple(pts))


# -- determinantal necessary conditions on the lattice ------------------------------


@dataclass(frozen=True)
class DetConditionReport:
    pairs: int
    triples: int
    sign_violations: int
    worst_sign: float
    triple_max_residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.sign_violations == 0 and self.triple_max_residual <= self.tol


def _value(v):
    tail = getattr(v, "tail_bound", 0.0)
    return (getattr(v, "value", v), float(tail))


def det_necessary_conditions(rho: Callable[[tuple], object], points: Sequence, tol: Optional[float] = None) -> DetConditionReport:
    """Sign and triple-product conditions on ``D(x, y) = rho1(x) rho1(y) - rho2(x, y)``.

    ``rho`` maps a tuple of half-integers to a correlation value (optionally a
    :class:`~sinfty.zmeasure.CorrelationValue` with a tail bound). With ``tol``
    unset, the tolerance is derived from the largest reported tail bound.
    """
    pts = [Fraction(p) for p in points]
    cache: dict = {}
    worst_tail = 0.0

    def r(*xs):
        nonlocal worst_tail
        key = tuple(sorted(xs))
        if key not in cache:
            val, tail = _value(rho(key))
            worst_tail = max(worst_tail, tail)
            cache[key] = val
        return cache[key]

    def D(x, y):
        return r(x) * r(y) - r(x, y)

    sign_bad = 0
    worst_sign = math.inf
    pairs = 0
    for x, y in itertools.combinations(pts, 2):
        s = (1 if x > 0 else -1) * (1 if y > 0 else -1)
        v = float(s * D(x, y))
        worst_sign = min(worst_sign, v)
        pairs += 1
    residual = 0.0
    triples = 0
    for x, y, w in itertools.combinations(pts, 3):
        base = r(x) * r(y) * r(w) - r(x) * D(y, w) - r(y) * D(x, w) - r(w) * D(x, y)
        lhs = (r(x, y, w) - base) ** 2
        rhs = 4 * D(x, y) * D(y, w) * D(w, x)
        residual = max(residual, abs(float(lhs - rhs)))
        triples += 1
    if tol is None:
        tol = 64 * worst_tail + 1e-14
    for x, y in itertools.combinations(pts, 2):
        s = (1 if x > 0 else -1) * (1 if y > 0 else -1)
        if float(s * D(x, y)) < -tol:
            sign_bad += 1
    return DetConditionReport(pairs, triples, sign_bad, worst_sign if pairs else 0.0, residual, tol)
