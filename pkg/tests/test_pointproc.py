from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from sinfty.configs import LatticeConfiguration, PointConfiguration
from sinfty.errors import DomainError
from sinfty.partitions import ThomaPoint, partitions_up_to, thoma_embed
from sinfty.pointproc import (
    BinSpec,
    CorrelationAccumulator,
    PiecewiseDensity,
    det_correlation,
    det_necessary_conditions,
    estimate_correlations,
    gamma_density,
    lift,
    poisson_sample,
    ray_transform,
    ray_transform_check,
    thoma_to_config,
    unlift,
)
from sinfty.rng import make_rng, substreams
from sinfty.special import WhittakerKernel
from sinfty.zmeasure import brute_force_correlation, lattice_config, sample_mixed_batch


def test_thoma_to_config():
    assert len(thoma_to_config(ThomaPoint((), ()))) == 0
    c = thoma_to_config(ThomaPoint((Fraction(1, 2), Fraction(1, 4)), (Fraction(1, 8),)))
    assert c.positions == (Fraction(-1, 8), Fraction(1, 4), Fraction(1, 2))


def test_thoma_to_config_matches_lattice():
    for lam in partitions_up_to(10):
        if lam.n:
            got = thoma_to_config(thoma_embed(lam)).positions
            assert got == tuple(p / lam.n for p in lattice_config(lam).points)


def test_lift_and_unlift():
    rng = make_rng(0)
    assert len(lift(PointConfiguration(()), 0.5, rng)) == 0
    c = PointConfiguration((Fraction(-1, 4), Fraction(1, 4), Fraction(1, 2)))
    back = unlift(lift(c, 0.7, rng))
    assert np.allclose([float(x) for x in back.positions], [float(x) for x in c.positions], rtol=1e-14)
    with pytest.raises(DomainError):
        lift(c, 0.0, rng)


def test_lifted_singleton_has_gamma_density():
    rng = make_rng(1)
    t = 0.6
    bins = BinSpec.linear([(0.05, 3.0, 12)])
    est = estimate_correlations((lift(PointConfiguration((1.0,)), t, rng) for _ in range(50_000)), 1, bins)
    cdf = stats.gamma.cdf
    expected = (cdf(np.asarray(bins.hi), t) - cdf(np.asarray(bins.lo), t)) / bins.widths
    assert np.all(np.abs(est.values - expected) <= 4 * est.stderr + 1e-12)


def test_ray_transform_limits_and_linearity():
    t = 0.8
    narrow = PiecewiseDensity((1 - 1e-4, 1 + 1e-4), (1 / 2e-4,))
    for x in (0.3, 1.0, 2.5):
        assert ray_transform(narrow, t, x) == pytest.approx(gamma_density(t, x), rel=1e-3)
    a = PiecewiseDensity((0.5, 1.0), (2.0,))
    b = PiecewiseDensity((-1.0, -0.2), (0.5,))
    ab = PiecewiseDensity((-1.0, -0.2, 0.5, 1.0), (0.5, 0.0, 2.0))
    for x in (-1.3, -0.1, 0.4, 2.0):
        assert ray_transform(ab, t, x) == pytest.approx(ray_transform(a, t, x) + ray_transform(b, t, x), rel=1e-9, abs=1e-14)
        assert ray_transform(a, t, x) * 3 == pytest.approx(ray_transform(PiecewiseDensity((0.5, 1.0), (6.0,)), t, x))


def test_ray_transform_matches_sampled_lift():
    rng = make_rng(2)
    rho = PiecewiseDensity((0.5, 1.0), (2.0,))
    configs = [PointConfiguration((rng.uniform(0.5, 1.0),)) for _ in range(40_000)]
    report = ray_transform_check(rho, 0.7, BinSpec.linear([(0.05, 4.0, 20)]), configs, rng)
    assert report.max_se_units < 3.5


def test_bins():
    bins = BinSpec.linear([(-3, -1, 2), (1, 3, 2)])
    assert len(bins) == 4
    assert list(bins.index([-3, -1.5, 0.0, 1.0, 2.99, 3.0])) == [0, 1, -1, 2, 3, -1]
    with pytest.raises(DomainError):
        BinSpec((0.0, 0.5), (1.0, 2.0))


def test_estimator_deterministic_point():
    est = estimate_correlations([LatticeConfiguration.from_points([Fraction(1, 2)])] * 10, 1, [(Fraction(1, 2),)])
    assert est.values[0] == 1 and est.stderr[0] == 0
    bins = BinSpec.linear([(0.5, 1.5, 1)])
    assert estimate_correlations([PointConfiguration((1.0,))] * 5, 1, bins).values[0] == pytest.approx(1.0)
    with pytest.raises(DomainError):
        estimate_correlations([], 1, bins)
    with pytest.raises(DomainError):
        estimate_correlations([PointConfiguration((1.0,))], 4, bins)


def test_tuple_counts_exclude_repeated_indices():
    bins = BinSpec.linear([(0, 2, 2)])
    c = PointConfiguration((0.2, 0.4, 1.5))
    est2 = estimate_correlations([c], 2, bins)
    # ordered distinct pairs: (0,0) bin has 2, (0,1) and (1,0) have 2 each, (1,1) none
    assert np.allclose(est2.values, [[2, 2], [2, 0]])
    est3 = estimate_correlations([c], 3, bins)
    brute = np.zeros((2, 2, 2))
    pts = c.positions
    for i, j, k in itertools.permutations(range(3), 3):
        brute[int(pts[i]), int(pts[j]), int(pts[k])] += 1
    assert np.allclose(est3.values, brute)


def test_poisson_factorization():
    rng = make_rng(3)
    est = estimate_correlations((poisson_sample(1.5, (0, 2), rng) for _ in range(40_000)), 2, BinSpec.linear([(0, 2, 4)]))
    assert np.all(np.abs(est.values - 2.25) <= 3 * est.stderr)
    est1 = estimate_correlations((poisson_sample(lambda x: 2 * x, (0, 1), rng) for _ in range(40_000)), 1, BinSpec.linear([(0, 1, 5)]))
    centers = (np.asarray(est1.support.lo) + np.asarray(est1.support.hi))
    assert np.all(np.abs(est1.values - centers) <= 3.5 * est1.stderr)


def test_poisson_counts():
    rng = make_rng(4)
    assert all(len(poisson_sample(0.0, (0, 1), rng)) == 0 for _ in range(100))
    counts = np.array([len(poisson_sample(3.0, (0, 1), rng)) for _ in range(100_000)])
    k = np.arange(12)
    observed = np.append(np.bincount(counts, minlength=12)[:12], np.sum(counts >= 12))
    pmf = stats.poisson.pmf(k, 3.0)
    expected = np.append(pmf, 1 - pmf.sum()) * counts.size
    assert stats.chisquare(observed, expected).pvalue > 0.001


def test_poisson_disjoint_windows_independent():
    rng = make_rng(5)
    a, b = [], []
    for _ in range(20_000):
        c = poisson_sample(1.0, [(0, 1), (2, 4)], rng)
        a.append(sum(1 for x in c if x < 1))
        b.append(sum(1 for x in c if x >= 2))
    a, b = np.array(a, float), np.array(b, float)
    cov = np.mean((a - a.mean()) * (b - b.mean()))
    se = np.std((a - a.mean()) * (b - b.mean())) / math.sqrt(a.size)
    assert abs(cov) <= 3 * se


def test_accumulator_merge_is_associative():
    bins = BinSpec.linear([(0, 2, 4)])
    rng = make_rng(6)
    configs = [poisson_sample(2.0, (0, 2), rng) for _ in range(300)]
    parts = [CorrelationAccumulator(bins, 2) for _ in range(3)]
    for i, acc in enumerate(parts):
        acc.add_configs(configs[i * 100 : (i + 1) * 100])
    left = parts[0].merge(parts[1]).merge(parts[2]).estimate()
    right = parts[0].merge(parts[1].merge(parts[2])).estimate()
    whole = CorrelationAccumulator(bins, 2)
    whole.add_configs(configs)
    assert np.array_equal(left.values, right.values)
    assert np.allclose(left.values, whole.estimate().values)


def test_lattice_estimate_against_brute_force():
    rng = make_rng(7)
    support = [(Fraction(1, 2),), (Fraction(-1, 2), Fraction(1, 2))]
    acc1 = CorrelationAccumulator(tuple((int(2 * p[0]),) for p in support[:1]), 1)
    acc2 = CorrelationAccumulator(((-1, 1),), 2)
    for g in substreams(7, 4):
        s = sample_mixed_batch("1/2", 0.3, 50_000, g, keep_rows=False)
        configs = [LatticeConfiguration(tuple(-v for v in s.b2[i][s.b2[i] > 0]) + tuple(s.a2[i][s.a2[i] > 0])) for i in range(len(s))]
        acc1.add_lattice(configs)
        acc2.add_lattice(configs)
    for acc, pts in ((acc1, support[0]), (acc2, support[1])):
        est = acc.estimate()
        exact = brute_force_correlation("1/2", Fraction(3, 10), pts).value
        assert abs(est.values[0] - exact) <= 3 * est.stderr[0]


def test_det_correlation():
    k = WhittakerKernel(0.3 + 0.2j)
    assert det_correlation(k, [0.7]) == pytest.approx(k(0.7, 0.7))
    x, y = -0.4, 1.1
    assert det_correlation(k, [x, y]) == pytest.approx(k(x, x) * k(y, y) - k(x, y) * k(y, x))
    with pytest.raises(DomainError):
        det_correlation(k, [1.0, 1.0])


def test_det_correlation_gauge_invariant():
    k = WhittakerKernel(0.3 + 0.2j)
    rng = np.random.default_rng(8)
    for _ in range(20):
        pts = list(rng.uniform(-4, 4, 3))
        phi = dict(zip(pts, rng.uniform(0.3, 2.0, 3)))
        gauged = lambda a, b: phi[a] * k(a, b) / phi[b]
        assert det_correlation(gauged, pts) == pytest.approx(det_correlation(k, pts), rel=1e-9, abs=1e-15)


def test_whittaker_minors_nonnegative():
    rng = np.random.default_rng(9)
    for z in (0.3 + 0.2j, 0.4, -0.2 + 1.0j):
        k = WhittakerKernel(z)
        for size in (1, 2, 3):
            for _ in range(15):
                assert det_correlation(k, list(rng.uniform(-4, 4, size))) >= -1e-10


def test_det_necessary_conditions():
    rho = lambda p: brute_force_correlation("1/2", Fraction(3, 10), p)
    rep = det_necessary_conditions(rho, [Fraction(1, 2), Fraction(3, 2), Fraction(-1, 2)])
    assert rep.ok and rep.triples == 1
    full = det_necessary_conditions(rho, [Fraction(k, 2) for k in (-5, -3, -1, 1, 3, 5)])
    assert full.ok and full.pairs == 15 and full.triples == 20


def test_det_conditions_detect_non_determinantal_tables():
    # J-symmetric kernels make opposite-sign points attract; repulsion breaks the sign rule
    def rho(p):
        if len(p) == 1:
            return 0.5
        if len(p) == 2:
            return 0.25 - (0.1 if (p[0] < 0) != (p[1] < 0) else 0.0)
        return 0.125

    assert not det_necessary_conditions(rho, [Fraction(-1, 2), Fraction(1, 2)], tol=1e-12).ok
