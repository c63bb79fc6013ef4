from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from scipy import integrate
from scipy.interpolate import CubicSpline

from sinfty.errors import DomainError
from sinfty.special import (
    GridSpec,
    WhittakerKernel,
    gamma_abs,
    l_kernel,
    l_operator_matrix,
    make_grid,
    pq_functions,
    q_of_z,
    resolvent_check,
    sine_kernel,
    whittaker_W,
    whittaker_kernel,
)

X_START = 50.0


def asymptotic_W(kappa, mu_sq, x, terms=12):
    """Value and derivative from the large-x expansion, used to seed the ODE oracle."""
    s, ds, c = 1.0, 0.0, 1.0
    for k in range(1, terms):
        c *= ((0.5 - kappa + k - 1) ** 2 - mu_sq) / (k * -x)
        s += c
        ds += -k * c / x
    pre = x**kappa * math.exp(-x / 2)
    return pre * s, pre * (ds + (kappa / x - 0.5) * s)


def ode_W(kappa, mu_sq, xs):
    """Integrate W'' = (1/4 - kappa/x + (mu^2 - 1/4)/x^2) W backward from x = 50."""
    w0, dw0 = asymptotic_W(kappa, mu_sq, X_START)

    def rhs(x, y):
        return [y[1], (0.25 - kappa / x + (mu_sq - 0.25) / x**2) * y[0]]

    xs = np.sort(np.atleast_1d(xs))[::-1]
    sol = integrate.solve_ivp(rhs, (X_START, xs[-1]), [w0, dw0], t_eval=xs, rtol=1e-12, atol=1e-300, method="DOP853")
    return dict(zip(sol.t, sol.y[0]))


def test_closed_form_first_parameter_zero():
    for mu in (0.0, 0.5, 1.2):
        kappa = mu + 0.5
        for x in (1e-3, 0.3, 2.0, 17.0):
            assert whittaker_W(kappa, mu * mu, x) == pytest.approx(x ** (mu + 0.5) * math.exp(-x / 2), rel=1e-10)


def test_large_x_normalization():
    assert whittaker_W(0.5, 0.0, 40.0) / (40.0**0.5 * math.exp(-20)) == pytest.approx(1.0, abs=1e-4)
    for kappa, mu_sq in ((0.8, -0.04), (-1.3, 2.0), (2.5, -9.0)):
        w, _ = asymptotic_W(kappa, mu_sq, 40.0)
        assert whittaker_W(kappa, mu_sq, 40.0) == pytest.approx(w, rel=1e-4)


@pytest.mark.parametrize("kappa", [-3.0, -1.3, -0.2, 0.8, 1.5, 3.0])
@pytest.mark.parametrize("mu_sq", [-9.0, -1.0, -0.04, 0.0, 2.25, 9.0])
def test_agrees_with_ode_oracle(kappa, mu_sq):
    xs = [0.5, 1.0, 3.0, 10.0, 30.0]
    ref = ode_W(kappa, mu_sq, xs)
    scale = max(abs(v) for v in ref.values())
    for x in xs:
        assert whittaker_W(kappa, mu_sq, x) == pytest.approx(ref[x], rel=1e-6, abs=1e-10 * scale)


def test_ode_residual_by_spline():
    kappa, mu_sq = 0.8, -0.04
    xs = np.linspace(0.3, 10.5, 4081)
    w = np.array([whittaker_W(kappa, mu_sq, x) for x in xs])
    d2 = CubicSpline(xs, w)(xs, 2)
    inner = (xs >= 0.5) & (xs <= 10)
    resid = d2 - (0.25 - kappa / xs + (mu_sq - 0.25) / xs**2) * w
    assert np.max(np.abs(resid[inner])) < 1e-5


def test_exact_zero_of_terminating_case():
    # W_{3/2, 0}(x) = x^(1/2) e^(-x/2) (x - 1)
    for x in (0.5, 1.0, 2.0):
        assert whittaker_W(1.5, 0.0, x) == pytest.approx(x**0.5 * math.exp(-x / 2) * (x - 1), abs=1e-15)


def test_domain():
    with pytest.raises(DomainError):
        whittaker_W(0.5, 0.0, 0.0)
    with pytest.raises(DomainError):
        whittaker_kernel(0.3 + 0.2j, 0.0, 1.0)


def test_gamma_reflection():
    for z in np.linspace(0.05, 0.95, 19):
        assert gamma_abs(1 - z) * gamma_abs(1 + z) == pytest.approx(math.pi * z / math.sin(math.pi * z), rel=1e-10)
    for z in (0.3 + 0.2j, -1.2 + 2j):
        # |Gamma(1+z) Gamma(1-z)| = |pi z / sin(pi z)|
        assert gamma_abs(1 + z) * gamma_abs(1 - z) == pytest.approx(abs(math.pi * z / cmath.sin(math.pi * z)), rel=1e-10)
    assert gamma_abs(-2) == math.inf


def test_pq_at_half():
    pq = pq_functions(0.5, 1.0)
    assert pq.p_plus > 0 and all(map(math.isfinite, (pq.p_plus, pq.p_minus, pq.q_plus, pq.q_minus)))
    # Q+ uses W_{0, 0}; quadrature for the confluent function U(1/2, 1, x) gives an independent value
    a, b, x = 0.5, 1.0, 1.0
    u, _ = integrate.quad(lambda s: math.exp(-x * s) * s ** (a - 1) * (1 + s) ** (b - a - 1), 0, np.inf)
    w00 = x**0.5 * math.exp(-x / 2) * u / math.gamma(a)
    t = 0.25
    assert pq.q_plus == pytest.approx(t**0.75 / gamma_abs(1.5) * w00, rel=1e-8)
    ref = ode_W(1.0, 0.0, [1.0])[1.0]
    assert pq.p_plus == pytest.approx(t**0.25 / gamma_abs(1.5) * ref, rel=1e-6)


def test_pq_vanish_at_gamma_pole():
    k = WhittakerKernel(1.0)
    assert k.pq_side(-1, 2.0) == (0.0, 0.0)
    assert k(-1.0, -2.0) == 0.0


def test_pq_scaling_ratio():
    z = 0.3 + 0.2j
    x = 2.0
    pq = pq_functions(z, x)
    t = abs(z) ** 2
    ratio = whittaker_W(z.real - 0.5, -z.imag**2, x) / whittaker_W(z.real + 0.5, -z.imag**2, x)
    assert pq.q_plus / pq.p_plus == pytest.approx(math.sqrt(t) * ratio, rel=1e-12)


def test_j_symmetry_and_realness():
    k = WhittakerKernel(0.3 + 0.2j)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        x, y = rng.uniform(-5, 5, 2)
        v = k(x, y)
        assert isinstance(v, float)
        assert abs(v - np.sign(x) * np.sign(y) * k(y, x)) <= 1e-10


@pytest.mark.parametrize("x", [-2.0, -0.4, 0.3, 1.0, 3.5])
def test_diagonal_continuity_and_lhospital(x):
    k = WhittakerKernel(0.3 + 0.2j)
    d = k.diagonal(x)
    diffs = [abs(k(x, x + h) - d) for h in (1e-2, 1e-3, 1e-4)]
    assert diffs[0] > diffs[1] > diffs[2]
    assert max(dv / h for dv, h in zip(diffs, (1e-2, 1e-3, 1e-4))) < 10
    # Q P' - P Q' in |x| by central differences, on the side of x
    side = 1 if x > 0 else -1
    u, h = abs(x), 1e-5
    (pp, qp), (pm, qm) = k.pq_side(side, u + h), k.pq_side(side, u - h)
    p, q = k.pq_side(side, u)
    dp, dq = (pp - pm) / (2 * h), (qp - qm) / (2 * h)
    expected = q * dp - p * dq
    assert d == pytest.approx(expected, rel=1e-6)


def test_diagonal_positive():
    k = WhittakerKernel(0.3 + 0.2j)
    for x in np.linspace(-4, 4, 17):
        if x:
            assert k.diagonal(x) > 0


def test_gauge_invariance_of_minors():
    k = WhittakerKernel(0.3 + 0.2j)
    rng = np.random.default_rng(1)
    for _ in range(10):
        pts = rng.uniform(-4, 4, 4)
        phi = rng.uniform(0.2, 3.0, 4) * rng.choice([-1, 1], 4)
        M = k.matrix(pts)
        G = phi[:, None] * M / phi[None, :]
        assert np.linalg.det(G) == pytest.approx(np.linalg.det(M), rel=1e-9, abs=1e-15)


def test_q_examples():
    assert q_of_z(0.5).value == pytest.approx(math.exp(-math.pi**2), rel=1e-12, abs=1e-12)
    assert q_of_z(1j).value == pytest.approx(math.exp(-math.pi / math.tanh(math.pi)), rel=1e-10)
    assert q_of_z(0.5).cot_form is None
    with pytest.raises(DomainError):
        q_of_z(2)


def test_q_forms_agree():
    rng = np.random.default_rng(2)
    for _ in range(100):
        z = complex(rng.uniform(-3, 3), rng.choice([-1, 1]) * rng.uniform(0.1, 3))
        q = q_of_z(z)
        assert q.discrepancy < 1e-10
        assert 0 < q.value < 1
        assert q_of_z(z.conjugate()).value == pytest.approx(q.value, rel=1e-12)
        assert q_of_z(-z).value == pytest.approx(q.value, rel=1e-12)


def test_l_kernel():
    x, y = 1.3, -0.7
    assert l_kernel(0.5, x, y) == pytest.approx((x / 0.7) ** 0.5 * math.exp(-(x - y) / 2) / (x - y) / math.pi)
    z = 0.3 + 0.2j
    assert l_kernel(z, x, y) * l_kernel(-z, x, y) == pytest.approx(
        (abs(cmath.sin(math.pi * z)) / math.pi) ** 2 * math.exp(-(x - y)) / (x - y) ** 2
    )
    for x, y in ((1.0, -1.0), (3.0, -2.0), (8.0, -5.0)):
        assert l_kernel(z, x, y) <= 1.0 * max(x / -y, -y / x) ** 0.3 * math.exp(-(x - y) / 2) / (x - y)
    with pytest.raises(DomainError):
        l_kernel(z, -1.0, 1.0)


def test_grid_and_block_structure():
    grid_spec = GridSpec(64, order=8)
    g = make_grid(grid_spec)
    assert np.all(np.diff(g.nodes) > 0) and np.all(g.nodes != 0)
    assert g.weights.sum() == pytest.approx(2 * (grid_spec.upper - grid_spec.cutoff), rel=1e-12)
    L = l_operator_matrix(0.3 + 0.2j, g)
    assert np.allclose(L, -L.T)
    half = g.nodes.size // 2
    assert np.all(L[:half, :half] == 0) and np.all(L[half:, half:] == 0)


def test_resolvent_converges():
    r400 = resolvent_check(0.3 + 0.2j, GridSpec(400))
    r800 = resolvent_check(0.3 + 0.2j, GridSpec(800))
    assert r400.max_deviation < 1e-2
    assert r800.max_deviation < r400.max_deviation / 2
    fixed = resolvent_check(0.3 + 0.2j, GridSpec(400, eps=1e-8))
    assert fixed.max_deviation < 1e-5
    with pytest.raises(DomainError):
        resolvent_check(0.7, GridSpec(64))


def test_sine_kernel():
    assert sine_kernel(0.3, 0.3) == 1.0
    assert sine_kernel(0.3, 1.1) == sine_kernel(1.1, 0.3)
    assert sine_kernel(2.0, 1.0) == pytest.approx(0.0, abs=1e-15)
