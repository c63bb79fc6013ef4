"""Whittaker functions, the Whittaker correlation kernel and its L-operator.

With ``z = a + ib`` and ``t = |z|^2`` the kernel is built from

    P_pm(x) = t^(1/4) / |Gamma(1 pm z)| * x^(-1/2) W_{pm a + 1/2, ib}(x)
    Q_pm(x) = t^(3/4) / |Gamma(1 pm z)| * x^(-1/2) W_{pm a - 1/2, ib}(x)

and equals ``L (1 + L)^{-1}`` for the block operator ``L = [[0, A], [-A^T, 0]]``
with ``A(x, y) = |sin(pi z)| / pi * (x/|y|)^a exp(-(x - y)/2) / (x - y)``.
``W`` depends on ``mu`` only through ``mu^2``, so ``mu = ib`` keeps it real.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import loggamma

from .arith import z_complex
from .errors import DomainError, NumericalError, ResourceCapError

#: Resource cap on the number of nodes of a :class:`KernelGrid`.
MAX_GRID_NODES = 4000
#: Condition number above which ``1 + L`` is reported as ill-conditioned.
MAX_CONDITION = 1e10


def _terminating_order(kappa: float, mu_sq: float) -> Optional[int]:
    """``N`` if ``1/2 +- mu - kappa == -N`` for a real ``mu``, else None."""
    if mu_sq < 0:
        return None
    mu = math.sqrt(mu_sq)
    for a in (0.5 + mu - kappa, 0.5 - mu - kappa):
        if a <= 0 and abs(a - round(a)) < 1e-13:
            return int(round(-a))
    return None


def whittaker_W(kappa: float, mu_sq: float, x: float) -> float:
    """The solution of Whittaker's equation that decays like ``x^kappa e^(-x/2)``."""
    if not x > 0:
        raise DomainError("Whittaker W is evaluated for x > 0 only")
    mu = mpmath.sqrt(mpmath.mpf(mu_sq))
    try:
        return float(mpmath.re(mpmath.whitw(kappa, mu, x)))
    except ValueError:
        # mpmath cannot certify a zero of the terminating case; there the
        # large-x expansion is a polynomial in 1/x and exact
        order = _terminating_order(kappa, mu_sq)
        if order is None:
            raise NumericalError(f"Whittaker W({kappa}, {mu_sq}) failed at x={x}") from None
        with mpmath.workdps(40):
            c = mpmath.mpf(1)
            total = mpmath.mpf(1)
            for k in range(1, order + 1):
                c *= ((0.5 - kappa + k - 1) ** 2 - mpmath.mpf(mu_sq)) / (k * -mpmath.mpf(x))
                total += c
            return float(mpmath.power(x, kappa) * mpmath.exp(-mpmath.mpf(x) / 2) * total)


def gamma_abs(z: complex) -> float:
    """``|Gamma(z)|``; zero at the poles."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == round(z.real):
        return math.inf
    return math.exp(loggamma(z).real)


@dataclass(frozen=True)
class PQ:
    p_plus: float
    p_minus: float
    q_plus: float
    q_minus: float


class WhittakerKernel:
    """The Whittaker kernel for a fixed ``z``, caching Whittaker values per abscissa."""

    def __init__(self, z):
        z = z_complex(z)
        if z == 0:
            raise DomainError("z must be nonzero")
        self.z = z
        self.a = z.real
        self.b = z.imag
        self.t = abs(z) ** 2
        self.mu_sq = -self.b * self.b
        g_plus = gamma_abs(1 + z)
        g_minus = gamma_abs(1 - z)
        # 1/|Gamma| vanishes at the poles, killing P and Q on that side
        self.norm_plus = 0.0 if math.isinf(g_plus) else 1.0 / g_plus
        self.norm_minus = 0.0 if math.isinf(g_minus) else 1.0 / g_minus
        self._w: dict[tuple[int, float], tuple[float, float]] = {}

    def _whittaker_pair(self, side: int, u: float) -> tuple[float, float]:
        """``(W_{side*a + 1/2}(u), W_{side*a - 1/2}(u))``."""
        key = (side, u)
        if key not in self._w:
            k = side * self.a
            self._w[key] = (whittaker_W(k + 0.5, self.mu_sq, u), whittaker_W(k - 0.5, self.mu_sq, u))
        return self._w[key]

    def pq_side(self, side: int, u: float) -> tuple[float, float]:
        """``(P_side(u), Q_side(u))`` for ``u > 0``."""
        if not u > 0:
            raise DomainError("P and Q are evaluated at positive arguments")
        norm = self.norm_plus if side > 0 else self.norm_minus
        if norm == 0.0:
            return 0.0, 0.0
        w1, w2 = self._whittaker_pair(side, u)
        s = u**-0.5
        return self.t**0.25 * norm * s * w1, self.t**0.75 * norm * s * w2

    def pq(self, x: float) -> PQ:
        pp, qp = self.pq_side(1, x)
        pm, qm = self.pq_side(-1, x)
        return PQ(pp, pm, qp, qm)

    def diagonal(self, x: float) -> float:
        """``K(x, x)`` from the contiguous relations of ``W``.

        For the positive side, with ``W1 = W_{a+1/2}`` and ``W2 = W_{a-1/2}``,
        ``K(x, x) = t |Gamma(1+z)|^-2 x^-2 (W1^2 + (2a - x) W1 W2 + t W2^2)``;
        the negative side is the same with ``a -> -a`` at ``|x|``.
        """
        if x == 0:
            raise DomainError("the kernel lives on the punctured line")
        side = 1 if x > 0 else -1
        u = abs(x)
        norm = self.norm_plus if side > 0 else self.norm_minus
        if norm == 0.0:
            return 0.0
        w1, w2 = self._whittaker_pair(side, u)
        a = side * self.a
        return self.t * norm * norm / (u * u) * (w1 * w1 + (2 * a - u) * w1 * w2 + self.t * w2 * w2)

    def __call__(self, x: float, y: float) -> float:
        if x == 0 or y == 0:
            raise DomainError("the kernel lives on the punctured line")
        if x == y:
            return self.diagonal(x)
        if x > 0 and y > 0:
            p1, q1 = self.pq_side(1, x)
            p2, q2 = self.pq_side(1, y)
            return (p1 * q2 - q1 * p2) / (x - y)
        if x > 0 > y:
            p1, q1 = self.pq_side(1, x)
            p2, q2 = self.pq_side(-1, -y)
            return (p1 * p2 + q1 * q2) / (x - y)
        if x < 0 < y:
            p1, q1 = self.pq_side(-1, -x)
            p2, q2 = self.pq_side(1, y)
            return (p1 * p2 + q1 * q2) / (x - y)
        p1, q1 = self.pq_side(-1, -x)
        p2, q2 = self.pq_side(-1, -y)
        return -(p1 * q2 - q1 * p2) / (x - y)

    def matrix(self, xs, ys=None) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = xs if ys is None else np.asarray(ys, dtype=float)
        return np.array([[self(x, y) for y in ys] for x in xs])


def pq_functions(z, x: float) -> PQ:
    """``(P+, P-, Q+, Q-)`` at ``x > 0``."""
    return WhittakerKernel(z).pq(x)


def whittaker_kernel(z, x: float, y: float) -> float:
    return WhittakerKernel(z)(x, y)


def sine_kernel(x: float, y: float) -> float:
    d = x - y
    if d == 0:
        return 1.0
    return math.sin(math.pi * d) / (math.pi * d)


# -- q(z) ---------------------------------------------------------------------


@dataclass(frozen=True)
class QValue:
    value: float
    sum_form: float
    cot_form: Optional[float]
    discrepancy: Optional[float]


def _lattice_sum(z: complex, terms: int = 200_000) -> float:
    """``sum over n in Z of 1/|z - n|^2``, with a midpoint-integral tail estimate."""
    a, b = z.real, abs(z.imag)
    n = np.arange(-terms, terms + 1, dtype=float)
    d = (a - n) ** 2 + b * b
    head = math.fsum(np.sort(1.0 / d))
    # tail over n > terms and n < -terms: sum f(n) ~ integral from the half-integer point on
    lo_r = terms + 0.5 - a
    lo_l = terms + 0.5 + a
    if b > 0:
        tail = (math.pi / 2 - math.atan(lo_r / b)) / b + (math.pi / 2 - math.atan(lo_l / b)) / b
    else:
        tail = 1.0 / lo_r + 1.0 / lo_l
    return head + tail


def q_of_z(z) -> QValue:
    """``q(z)`` by the lattice-sum formula and, for non-real ``z``, the cotangent formula."""
    z = z_complex(z)
    if z.imag == 0 and z.real == round(z.real):
        raise DomainError("q(z) is defined for non-integer z")
    sum_form = math.exp(-_lattice_sum(z))
    if z.imag == 0:
        return QValue(sum_form, sum_form, None, None)
    cot = cmath.cos(math.pi * z) / cmath.sin(math.pi * z)
    # (cot(pi z) - cot(pi conj z)) / (z - conj z) = Im cot(pi z) / Im z
    cot_form = math.exp(math.pi * cot.imag / z.imag)
    return QValue(cot_form, sum_form, cot_form, abs(cot_form - sum_form))


# -- L-operator and resolvent identity ---------------------------------------


def l_kernel(z, x: float, y: float) -> float:
    """``A(x, y)`` for ``x > 0 > y``."""
    if not (x > 0 > y):
        raise DomainError("A(x, y) is defined for x > 0 > y")
    z = z_complex(z)
    c = abs(cmath.sin(math.pi * z)) / math.pi
    return c * (x / -y) ** z.real * math.exp(-(x - y) / 2) / (x - y)


def l_matrix_block(z, xp: np.ndarray, yn: np.ndarray) -> np.ndarray:
    """``A(x_i, y_j)`` for positive ``xp`` and negative ``yn`` (vectorized)."""
    z = z_complex(z)
    c = abs(cmath.sin(math.pi * z)) / math.pi
    X = np.asarray(xp, float)[:, None]
    Y = np.asarray(yn, float)[None, :]
    return c * (X / -Y) ** z.real * np.exp(-(X - Y) / 2) / (X - Y)


@dataclass(frozen=True)
class GridSpec:
    """Composite Gauss-Legendre panels, geometric toward 0, mirrored onto both half-lines.

    ``nodes`` counts both sides. Unless ``eps`` is given the inner cutoff is
    ``upper * 10**(-panels * decades_per_panel)``, so doubling the nodes also
    pushes the cutoff toward 0.
    """

    nodes: int = 400
    upper: float = 40.0
    order: int = 8
    decades_per_panel: float = 0.25
    eps: Optional[float] = None

    @property
    def panels(self) -> int:
        per_side = self.nodes // 2
        if per_side % self.order:
            raise DomainError("nodes/2 must be a multiple of the panel order")
        return per_side // self.order

    @property
    def cutoff(self) -> float:
        if self.eps is not None:
            return self.eps
        return self.upper * 10.0 ** (-self.panels * self.decades_per_panel)


@dataclass
class KernelGrid:
    nodes: np.ndarray
    weights: np.ndarray
    matrix: Optional[np.ndarray] = field(default=None, repr=False)


def make_grid(grid_spec: GridSpec) -> KernelGrid:
    if grid_spec.nodes > MAX_GRID_NODES:
        raise ResourceCapError(f"{grid_spec.nodes} grid nodes exceed the cap {MAX_GRID_NODES}")
    edges = np.geomspace(grid_spec.cutoff, grid_spec.upper, grid_spec.panels + 1)
    g, w = leggauss(grid_spec.order)
    mid = (edges[1:] + edges[:-1]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    xp = (mid[:, None] + half[:, None] * g[None, :]).ravel()
    wp = (half[:, None] * w[None, :]).ravel()
    nodes = np.concatenate([-xp[::-1], xp])
    weights = np.concatenate([wp[::-1], wp])
    return KernelGrid(nodes, weights)


def l_operator_matrix(z, grid: KernelGrid) -> np.ndarray:
    """Weight-conjugated discrete ``L``: ``sqrt(w_i) L(x_i, x_j) sqrt(w_j)``."""
    x = grid.nodes
    neg = x < 0
    pos = ~neg
    sw = np.sqrt(grid.weights)
    A = l_matrix_block(z, x[pos], x[neg]) * sw[pos][:, None] * sw[neg][None, :]
    L = np.zeros((x.size, x.size))
    L[np.ix_(pos, neg)] = A
    L[np.ix_(neg, pos)] = -A.T
    return L


@dataclass(frozen=True)
class ResolventReport:
    max_deviation: float
    pairs: int
    condition: float
    nodes: int
    cutoff: float


def resolvent_check(z, grid_spec: GridSpec = GridSpec(), window: tuple[float, float] = (0.1, 5.0)) -> ResolventReport:
    """Compare the discretized ``L (1 + L)^{-1}`` with the Whittaker kernel.

    Pairs of distinct nodes with ``|x|, |y|`` inside ``window`` are compared.
    """
    zc = z_complex(z)
    if not (-0.5 < zc.real < 0.5) or zc == 0:
        raise DomainError("the resolvent identity is stated for |Re z| < 1/2, z != 0")
    grid = make_grid(grid_spec)
    L = l_operator_matrix(zc, grid)
    eye = np.eye(L.shape[0])
    cond = float(np.linalg.cond(eye + L))
    if cond > MAX_CONDITION:
        raise NumericalError(f"1 + L is ill-conditioned (condition number {cond:.3g})")
    M = np.linalg.solve(eye + L, L)
    sw = np.sqrt(grid.weights)
    M = M / sw[:, None] / sw[None, :]
    grid.matrix = M
    kern = WhittakerKernel(zc)
    sel = np.flatnonzero((np.abs(grid.nodes) >= window[0]) & (np.abs(grid.nodes) <= window[1]))
    dev = 0.0
    pairs = 0
    for i in sel:
        for j in sel:
            if i == j:
                continue
            dev = max(dev, abs(M[i, j] - kern(grid.nodes[i], grid.nodes[j])))
            pairs += 1
    return ResolventReport(dev, pairs, cond, int(grid.nodes.size), grid_spec.cutoff)
