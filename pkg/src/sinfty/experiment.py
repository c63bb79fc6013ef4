"""Monte Carlo comparison of the lifted spectral process with the Whittaker kernel.

Two routes produce samples of the limit process:

* growth: ``lam ~ P_z^(n)``, Frobenius coordinates divided by ``n``, then lifted
  by an independent gamma(t) factor;
* mixed: ``lam`` from the mixed z-measure at ``xi``, lattice points scaled by ``1 - xi``.

Both are binned and compared with bin averages of ``K(x, x)``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from .arith import z_complex, z_parts
from .errors import DomainError, ResourceCapError
from .pointproc import BinSpec, CorrelationAccumulator, CorrelationEstimate
from .rng import substreams
from .special import WhittakerKernel
from .zmeasure import GrowthSamples, _grow, sample_growth_batch

#: Resource caps for the experiment.
MAX_N = 100_000
MAX_SAMPLES = 10_000_000

DEFAULT_BINS = BinSpec.linear([(-3.0, -0.05, 15), (0.05, 5.0, 25)])


@dataclass(frozen=True)
class MainTheoremConfig:
    z: complex = 0.3 + 0.2j
    n: int = 2000
    samples: int = 20_000
    xi: float = 0.995
    bins: BinSpec = DEFAULT_BINS
    seed: int = 20240
    replicas: int = 8
    threads: int = 1
    se_hits: int = 500
    rel_hits: int = 2000
    se_limit: float = 3.0
    rel_limit: float = 0.05

    def validate(self) -> None:
        if z_complex(self.z) == 0:
            raise DomainError("z must be nonzero")
        if self.n < 1 or self.samples < 1 or self.replicas < 1 or self.threads < 1:
            raise DomainError("n, samples, replicas and threads must be positive")
        if self.n > MAX_N or self.samples > MAX_SAMPLES:
            raise ResourceCapError("n or sample count exceeds the experiment caps")
        if not 0 < self.xi < 1:
            raise DomainError("xi must lie in (0, 1)")


@dataclass(frozen=True)
class BinComparison:
    lo: float
    hi: float
    estimate: float
    stderr: float
    hits: int
    predicted: float
    se_units: float
    rel_error: float
    se_checked: bool
    rel_checked: bool
    ok: bool


@dataclass(frozen=True)
class RouteReport:
    route: str
    rows: tuple[BinComparison, ...]
    samples: int

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def checked_bins(self) -> int:
        return sum(r.se_checked for r in self.rows)

    @property
    def max_se_units(self) -> float:
        return max((r.se_units for r in self.rows if r.se_checked), default=0.0)


@dataclass(frozen=True)
class MeanCheck:
    mean: float
    stderr: float
    target: float
    limit: float = 3.0

    @property
    def se_units(self) -> float:
        return abs(self.mean - self.target) / self.stderr if self.stderr > 0 else math.inf

    @property
    def passed(self) -> bool:
        return self.se_units <= self.limit


@dataclass(frozen=True)
class MainTheoremReport:
    config: MainTheoremConfig
    growth: RouteReport
    mixed: Optional[RouteReport]
    p2: MeanCheck

    @property
    def passed(self) -> bool:
        return self.growth.passed and (self.mixed is None or self.mixed.passed) and self.p2.passed


# -- helpers ------------------------------------------------------------------------


def frobenius_positions(samples: GrowthSamples, scale: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flattened ``(sample id, position)`` of ``a_i * scale`` and ``-b_i * scale``."""
    scale = np.broadcast_to(np.asarray(scale, float), (len(samples),))
    ids_a, col_a = np.nonzero(samples.a2)
    ids_b, col_b = np.nonzero(samples.b2)
    pos_a = samples.a2[ids_a, col_a] / 2.0 * scale[ids_a]
    pos_b = -samples.b2[ids_b, col_b] / 2.0 * scale[ids_b]
    return np.concatenate([ids_a, ids_b]), np.concatenate([pos_a, pos_b])


def p2_values(samples: GrowthSamples) -> np.ndarray:
    """``p_2(omega_lam) = sum (a_i^2 - b_i^2) / n^2`` for every sample."""
    a = samples.a2.astype(np.float64) / 2
    b = samples.b2.astype(np.float64) / 2
    n = samples.sizes.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(n > 0, ((a * a).sum(axis=1) - (b * b).sum(axis=1)) / (n * n), 0.0)


def kernel_bin_averages(z, bins: BinSpec, order: int = 4) -> np.ndarray:
    kern = WhittakerKernel(z)
    g, w = leggauss(order)
    out = []
    for lo, hi in zip(bins.lo, bins.hi):
        xs = (lo + hi) / 2 + (hi - lo) / 2 * g
        out.append(sum(wi * kern.diagonal(float(x)) for wi, x in zip(w, xs)) / 2)
    return np.array(out)


def lattice_points_in_bins(bins: BinSpec, spacing: float) -> np.ndarray:
    """Number of points ``(k + 1/2) * spacing`` in each ``[lo, hi)``."""
    lo = np.asarray(bins.lo) / spacing - 0.5
    hi = np.asarray(bins.hi) / spacing - 0.5
    return (np.ceil(hi) - np.ceil(lo)).astype(np.int64)


def compare_bins(est: CorrelationEstimate, predicted: np.ndarray, cfg: MainTheoremConfig, route: str) -> RouteReport:
    rows = []
    bins = est.support
    for i in range(len(bins)):
        v, se, h, p = float(est.values[i]), float(est.stderr[i]), int(est.hits[i]), float(predicted[i])
        units = abs(v - p) / se if se > 0 else (0.0 if v == p else math.inf)
        rel = abs(v - p) / abs(p) if p else math.inf
        se_checked = h >= cfg.se_hits
        rel_checked = h >= cfg.rel_hits
        ok = (not se_checked or units <= cfg.se_limit) and (not rel_checked or rel <= cfg.rel_limit)
        rows.append(BinComparison(bins.lo[i], bins.hi[i], v, se, h, p, units, rel, se_checked, rel_checked, ok))
    return RouteReport(route, tuple(rows), est.samples)


def _split(total: int, parts: int) -> list[int]:
    q, r = divmod(total, parts)
    return [q + (1 if i < r else 0) for i in range(parts)]


def _run_replicas(work, cfg: MainTheoremConfig, stream_offset: int):
    """Run ``work(rng, count)`` over the replica substreams; results in replica order."""
    rngs = substreams(cfg.seed, stream_offset + cfg.replicas)[stream_offset:]
    counts = _split(cfg.samples, cfg.replicas)
    if cfg.threads == 1:
        return [work(g, c) for g, c in zip(rngs, counts)]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(work, rngs, counts))


def _merge(accs: list[CorrelationAccumulator]) -> CorrelationAccumulator:
    out = accs[0]
    for a in accs[1:]:
        out = out.merge(a)
    return out


# -- routes -------------------------------------------------------------------------


def growth_route(cfg: MainTheoremConfig) -> tuple[CorrelationEstimate, np.ndarray]:
    """Binned lifted first correlation from ``P_z^(n)`` and the per-sample ``p_2`` values."""
    zr, zi = z_parts(cfg.z, "float")
    t = zr * zr + zi * zi

    def work(rng, count):
        s = sample_growth_batch(cfg.z, cfg.n, count, rng, keep_rows=False)
        lift = rng.gamma(t, size=count)
        ids, pos = frobenius_positions(s, lift / cfg.n)
        acc = CorrelationAccumulator(cfg.bins, 1)
        acc.add_bin_counts(cfg.bins.counts(ids, pos, count))
        return acc, p2_values(s)

    parts = _run_replicas(work, cfg, 0)
    acc = _merge([a for a, _ in parts])
    return acc.estimate(seed=cfg.seed), np.concatenate([p for _, p in parts])


def mixed_route(cfg: MainTheoremConfig) -> CorrelationEstimate:
    """Binned first correlation of the mixed measure on the lattice scaled by ``1 - xi``."""
    zr, zi = z_parts(cfg.z, "float")
    t = zr * zr + zi * zi
    h = 1.0 - cfg.xi

    def work(rng, count):
        sizes = rng.negative_binomial(t, h, size=count).astype(np.int64)
        if sizes.max(initial=0) > MAX_N:
            raise ResourceCapError("a mixed-measure size exceeded the experiment cap")
        s = _grow(cfg.z, sizes, rng, keep_rows=False)
        ids, pos = frobenius_positions(s, h)
        acc = CorrelationAccumulator(cfg.bins, 1)
        acc.add_bin_counts(cfg.bins.counts(ids, pos, count))
        return acc

    acc = _merge(_run_replicas(work, cfg, cfg.replicas))
    measure = lattice_points_in_bins(cfg.bins, h) * h
    if np.any(measure == 0):
        raise DomainError("a bin contains no scaled lattice point")
    return acc.estimate(seed=cfg.seed, cell_measure=measure)


def main_theorem_experiment(cfg: MainTheoremConfig = MainTheoremConfig(), mixed: bool = True) -> MainTheoremReport:
    cfg.validate()
    predicted = kernel_bin_averages(cfg.z, cfg.bins)
    est, p2 = growth_route(cfg)
    growth = compare_bins(est, predicted, cfg, "growth")
    mixed_report = compare_bins(mixed_route(cfg), predicted, cfg, "mixed") if mixed else None
    zr, zi = z_parts(cfg.z, "float")
    target = 2 * zr / (zr * zr + zi * zi + 1)
    p2_check = MeanCheck(float(p2.mean()), float(p2.std(ddof=1) / math.sqrt(p2.size)), target)
    return MainTheoremReport(cfg, growth, mixed_report, p2_check)


# -- law of large numbers for the alpha coordinates ---------------------------------


@dataclass(frozen=True)
class LLNReport:
    median: float
    q: float
    k: int
    samples: int
    zero_fraction: float

    @property
    def passed(self) -> bool:
        return 0.5 * self.q < self.median < 2 * self.q


def lln_check(z, n: int, samples: int, k: int, seed: int) -> LLNReport:
    """Median over samples of ``alpha_k^(1/k)`` with ``alpha_k = a_k / n`` (0 if ``d < k``)."""
    from .special import q_of_z

    if k < 1:
        raise DomainError("k must be positive")
    rng = substreams(seed, 1)[0]
    s = sample_growth_batch(z, n, samples, rng, keep_rows=False)
    a = -np.sort(-s.a2, axis=1)
    ak = a[:, k - 1] / 2.0 / n if a.shape[1] >= k else np.zeros(samples)
    vals = ak ** (1.0 / k)
    return LLNReport(float(np.median(vals)), q_of_z(z).value, k, samples, float(np.mean(ak == 0)))
