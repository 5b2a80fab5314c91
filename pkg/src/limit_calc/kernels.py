"""Limit kernels h0, h1, h2, h1_tilde, h2_tilde and the angular line integrals L_{1,+-}, L_{2,+-}."""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from src.coeff_families.angular import AngularFunction, a_infinity
from src.core.config import get_config
from src.core.exceptions import BoundaryRegionError, DivergentIntegralError, UnsupportedRegionError
from src.core.schemas import KernelKind, Point

logger = logging.getLogger(__name__)

# Beyond this radius a_inf is replaced by its leading power law.
TAIL_START = 1e12

_TABLE_NODES = 1200
_TABLE_ORDER = 16

# Graded Gauss-Legendre rule for the t-integral inside h0.
_H0_PANELS = 24
_H0_ORDER = 6


def _half_line_integral(profile: Callable[[float], float], q: float, c_tail: float,
                        tol: float) -> Tuple[float, float]:
    """Integral of profile over [0, inf): quad on [0, 1], quad in log w on [1, S], power-law tail past S."""
    near, err_near = quad(profile, 0.0, 1.0, epsabs=tol, limit=200)
    far, err_far = quad(lambda xi: profile(math.exp(xi)) * math.exp(xi), 0.0, math.log(TAIL_START),
                        epsabs=tol, limit=500)
    tail = c_tail * TAIL_START ** (1.0 - q) / (q - 1.0)
    return near + far + tail, err_near + err_far


def _require_decay(q: float, name: str) -> None:
    if q <= 1.0:
        raise DivergentIntegralError(f"{name} diverges: it needs the decay exponent > 1, got {q}")


def _l1_pair(q1: float, q2: float, angular: AngularFunction, tol: float) -> Tuple[float, float]:
    _require_decay(q2, "L_1 = integral of a_inf(+-1, s) ds (condition q2 > 1)")
    c_tail = float(angular(0.0))
    values = []
    for sign in (1.0, -1.0):
        half, _ = _half_line_integral(lambda s: float(a_infinity(sign, s, q1, q2, angular)), q2, c_tail, tol)
        values.append(2.0 * half)
    return values[0], values[1]


def _l2_pair(q1: float, q2: float, angular: AngularFunction, tol: float) -> Tuple[float, float]:
    _require_decay(q1, "L_2 = integral of a_inf(t, +-1) dt (condition q1 > 1)")
    values = []
    for sign in (1.0, -1.0):
        right, _ = _half_line_integral(lambda t: float(a_infinity(t, sign, q1, q2, angular)), q1,
                                       float(angular(1.0)), tol)
        left, _ = _half_line_integral(lambda t: float(a_infinity(-t, sign, q1, q2, angular)), q1,
                                      float(angular(-1.0)), tol)
        values.append(right + left)
    return values[0], values[1]


def angular_integrals(q1: float, q2: float, angular: AngularFunction,
                      tol: Optional[float] = None) -> Tuple[float, float, float, float]:
    """
    (L1_plus, L1_minus, L2_plus, L2_minus) with L_{1,+-} = int a_inf(+-1, s) ds and L_{2,+-} = int a_inf(t, +-1) dt.

    Raises:
        DivergentIntegralError: If q2 <= 1 (L_1 diverges) or q1 <= 1 (L_2 diverges)
    """
    tol = tol or get_config().quad_tol
    return (*_l1_pair(q1, q2, angular, tol), *_l2_pair(q1, q2, angular, tol))


@dataclass(frozen=True)
class ProfileTable:
    """
    Antiderivative F(z) = int_0^z f(w) dw of a profile with tails f(w) ~ c_plus w^-q and c_minus |w|^-q.

    Tabulated on sinh-spaced nodes out to TAIL_START and interpolated monotonically in between.
    """
    nodes: np.ndarray
    values: np.ndarray
    q: float
    c_plus: float
    c_minus: float
    interpolant: PchipInterpolator = field(repr=False, compare=False)

    @classmethod
    def build(cls, profile: Callable[[np.ndarray], np.ndarray], q: float, c_plus: float, c_minus: float,
              zmax: float = TAIL_START, n: int = _TABLE_NODES, order: int = _TABLE_ORDER) -> "ProfileTable":
        _require_decay(q, "profile antiderivative")
        half = np.sinh(np.linspace(0.0, math.asinh(zmax), n + 1))
        half[-1] = zmax
        nodes = np.concatenate([-half[:0:-1], half])

        x, w = leggauss(order)
        mid = 0.5 * (nodes[:-1] + nodes[1:])
        hw = 0.5 * (nodes[1:] - nodes[:-1])
        pieces = (profile(mid[:, None] + hw[:, None] * x[None, :]) * w[None, :]).sum(axis=1) * hw
        values = np.concatenate([[0.0], np.cumsum(pieces)])
        values -= values[n]
        table = cls(nodes=nodes, values=values, q=q, c_plus=c_plus, c_minus=c_minus,
                    interpolant=PchipInterpolator(nodes, values))
        logger.debug(f"antiderivative table on {nodes.size} nodes up to {zmax:g}, total {table.total:.10g}")
        return table

    @property
    def zmax(self) -> float:
        return float(self.nodes[-1])

    def _tail_weight(self) -> float:
        return self.zmax ** (1.0 - self.q) / (self.q - 1.0)

    @property
    def upper(self) -> float:
        return float(self.values[-1]) + self.c_plus * self._tail_weight()

    @property
    def lower(self) -> float:
        return float(self.values[0]) - self.c_minus * self._tail_weight()

    @property
    def total(self) -> float:
        """Integral of the profile over the whole line."""
        return self.upper - self.lower

    def __call__(self, z):
        z = np.asarray(z, dtype=np.float64)
        out = self.interpolant(np.clip(z, -self.zmax, self.zmax))
        magnitude = np.maximum(np.abs(z), self.zmax)
        tail = self._tail_weight() - magnitude ** (1.0 - self.q) / (self.q - 1.0)
        return out + np.where(z > 0, self.c_plus * tail, -self.c_minus * tail)


@dataclass(frozen=True)
class KernelSpec:
    """A kernel kind with its decay exponents, angular function and cached line integrals."""
    kind: KernelKind
    q1: float
    q2: float
    angular: AngularFunction
    L1_plus: float = math.nan
    L1_minus: float = math.nan
    L2_plus: float = math.nan
    L2_minus: float = math.nan

    @classmethod
    def build(cls, kind: KernelKind, q1: float, q2: float, angular: AngularFunction,
              tol: Optional[float] = None) -> "KernelSpec":
        """Compute the line integrals the kernel needs; the others are filled in when they converge."""
        tol = tol or get_config().quad_tol
        kind = KernelKind(kind)
        needs_l1 = kind in (KernelKind.H0, KernelKind.H1, KernelKind.H1_TILDE)
        needs_l2 = kind in (KernelKind.H2, KernelKind.H2_TILDE)
        l1 = _l1_pair(q1, q2, angular, tol) if needs_l1 or q2 > 1.0 else (math.nan, math.nan)
        l2 = _l2_pair(q1, q2, angular, tol) if needs_l2 or q1 > 1.0 else (math.nan, math.nan)
        return cls(kind=kind, q1=q1, q2=q2, angular=angular, L1_plus=l1[0], L1_minus=l1[1],
                   L2_plus=l2[0], L2_minus=l2[1])

    @property
    def Q(self) -> float:
        return 1.0 / self.q1 + 1.0 / self.q2

    @property
    def kappa(self) -> float:
        return self.q1 / self.q2

    @property
    def alpha(self) -> float:
        """Decay of int a_inf(t, s) ds in |t|."""
        return self.q1 - self.kappa

    @property
    def beta(self) -> float:
        """Decay of int a_inf(t, s) dt in |s|."""
        return self.q2 - self.q2 / self.q1

    @property
    def H1(self) -> float:
        return 1.5 - self.alpha

    @property
    def H2(self) -> float:
        return 1.5 - self.beta

    @cached_property
    def row_tables(self) -> Tuple[ProfileTable, ProfileTable]:
        """Antiderivatives of a_inf(+1, .) and a_inf(-1, .)."""
        c_tail = float(self.angular(0.0))
        return tuple(
            ProfileTable.build(lambda w, sign=sign: a_infinity(sign, w, self.q1, self.q2, self.angular),
                               self.q2, c_tail, c_tail)
            for sign in (1.0, -1.0)
        )

    @cached_property
    def column_table(self) -> ProfileTable:
        """Antiderivative of a_inf(., 1)."""
        return ProfileTable.build(lambda w: a_infinity(w, 1.0, self.q1, self.q2, self.angular), self.q1,
                                  float(self.angular(1.0)), float(self.angular(-1.0)))


def _positive_power(z, p: float):
    z = np.asarray(z, dtype=np.float64)
    return np.where(z > 0, np.where(z > 0, z, 1.0) ** p, 0.0)


def line_kernel(L_plus: float, L_minus: float, H: float, x: float, u):
    """
    Closed form of int_(0,x] |t - u|^{-alpha} L_{sign(t-u)} dt with alpha = 3/2 - H:

        {L_plus [(-u)_+^p - (x-u)_+^p] + L_minus [(x-u)_-^p - (-u)_-^p]} / (1/2 - H),  p = H - 1/2.

    For alpha > 1 and u in (0, x] this is minus the integral over the complement of (0, x].
    """
    if H == 0.5:
        raise BoundaryRegionError("the line kernel prefactor 1/(1/2 - H) is singular at H = 1/2 (Q = 1)")
    p = H - 0.5
    u = np.asarray(u, dtype=np.float64)
    bracket = (L_plus * (_positive_power(-u, p) - _positive_power(x - u, p))
               + L_minus * (_positive_power(u - x, p) - _positive_power(u, p)))
    return bracket / (0.5 - H)


def line_kernel_integral(L_plus: float, L_minus: float, alpha: float, x: float, u: float,
                         tol: Optional[float] = None) -> float:
    """The same line kernel evaluated by adaptive quadrature of its defining integral."""
    tol = tol or get_config().quad_tol

    def integrand(t: float) -> float:
        return abs(t - u) ** (-alpha) * (L_plus if t > u else L_minus)

    inside = 0.0 < u <= x
    if inside and alpha > 1.0:
        left, _ = quad(integrand, -np.inf, 0.0, epsabs=tol, limit=200)
        right, _ = quad(integrand, x, np.inf, epsabs=tol, limit=200)
        return -(left + right)
    if inside:
        below, _ = quad(integrand, 0.0, u, epsabs=tol, limit=200)
        above, _ = quad(integrand, u, x, epsabs=tol, limit=200)
        return below + above
    value, _ = quad(integrand, 0.0, x, epsabs=tol, limit=200)
    return value


def _graded_rule(a: np.ndarray, b: np.ndarray, panels: int, order: int):
    """
    Gauss-Legendre nodes and weights on [a_i, b_i] (0 <= a_i <= b_i), with panels geometric in log r.

    The first `order` columns belong to the innermost panel [a_i, lo_i].
    """
    empty = b <= a
    b_safe = np.where(empty, 1.0, b)
    a_safe = np.where(empty, 1.0, a)
    lo = np.maximum(a_safe, b_safe * 2.0 ** (-panels))
    steps = np.linspace(0.0, 1.0, panels + 1)
    geometric = lo[:, None] * (b_safe / lo)[:, None] ** steps[None, :]
    breaks = np.concatenate([a_safe[:, None], geometric], axis=1)

    x, w = leggauss(order)
    mid = 0.5 * (breaks[:, 1:] + breaks[:, :-1])
    hw = 0.5 * (breaks[:, 1:] - breaks[:, :-1])
    nodes = (mid[:, :, None] + hw[:, :, None] * x[None, None, :]).reshape(a.size, -1)
    weights = (hw[:, :, None] * w[None, None, :]).reshape(a.size, -1)
    weights[empty] = 0.0
    return nodes, weights, lo


def h0_values(spec: KernelSpec, rect: Point, u, v, panels: int = _H0_PANELS, order: int = _H0_ORDER) -> np.ndarray:
    """
    Vectorized h0(x, y; u, v).

    Uses a_inf(tau, sigma) = |tau|^{-q1} a_inf(+-1, sigma |tau|^{-q1/q2}) so the s-integral is a table lookup
    and only the t-integral is done by quadrature. Under Q < 1 points inside the rectangle take minus the
    integral over the complement; the t-tails of that integral are closed form.
    """
    x, y = rect
    u = np.atleast_1d(np.asarray(u, dtype=np.float64)).ravel()
    v = np.atleast_1d(np.asarray(v, dtype=np.float64)).ravel()
    u, v = np.broadcast_arrays(u, v)
    negative_dependence = spec.Q < 1.0
    alpha, kappa = spec.alpha, spec.kappa
    plus_table, minus_table = spec.row_tables

    inside = (u > 0) & (u <= x) & (v > 0) & (v <= y) if negative_dependence else np.zeros(u.shape, dtype=bool)
    sigma0 = (-v)[:, None]
    sigma1 = (y - v)[:, None]

    total = np.zeros(u.shape)
    for table, a, b in ((plus_table, np.maximum(-u, 0.0), np.maximum(x - u, 0.0)),
                        (minus_table, np.maximum(u - x, 0.0), np.maximum(u, 0.0))):
        r, w, lo = _graded_rule(a, b, panels, order)
        scale = r ** (-kappa)
        bracket = table(sigma1 * scale) - table(sigma0 * scale)
        bracket = np.where(inside[:, None], table.total - bracket, bracket)
        integrand = w * r ** (-alpha) * bracket
        if not negative_dependence:
            # r^{-alpha} is integrable at 0 here; integrate it exactly over the innermost panel.
            at_zero = (a == 0.0) & (b > 0.0)
            innermost = table(sigma1[:, 0] * lo ** (-kappa)) - table(sigma0[:, 0] * lo ** (-kappa))
            integrand[at_zero, :order] = 0.0
            total += np.where(at_zero, innermost * lo ** (1.0 - alpha) / (1.0 - alpha), 0.0)
        total += integrand.sum(axis=1)

    if negative_dependence:
        with np.errstate(divide="ignore", invalid="ignore"):
            tails = (minus_table.total * np.where(inside, u, 1.0) ** (1.0 - alpha)
                     + plus_table.total * np.where(inside, x - u, 1.0) ** (1.0 - alpha)) / (alpha - 1.0)
        total = np.where(inside, -(tails + total), total)
    return total


def h1_tilde_values(spec: KernelSpec, rect: Point, u, v) -> np.ndarray:
    """h1_tilde(x, y; u, v) = x int_(0,y] a_inf(u, s - v) ds."""
    x, y = rect
    u, v = np.broadcast_arrays(np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64))
    plus_table, minus_table = spec.row_tables
    r = np.where(u == 0.0, np.inf, np.abs(u))
    scale = r ** (-spec.kappa)
    bracket = np.where(u > 0, plus_table((y - v) * scale) - plus_table(-v * scale),
                       minus_table((y - v) * scale) - minus_table(-v * scale))
    return x * r ** (-spec.alpha) * bracket


def h2_tilde_values(spec: KernelSpec, rect: Point, u, v) -> np.ndarray:
    """h2_tilde(x, y; u, v) = y int_(0,x] a_inf(t - u, v) dt."""
    x, y = rect
    u, v = np.broadcast_arrays(np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64))
    c = np.where(v == 0.0, np.inf, np.abs(v) ** (1.0 / spec.kappa))
    table = spec.column_table
    return y * np.abs(np.where(v == 0.0, np.inf, v)) ** (-spec.beta) * (table((x - u) / c) - table(-u / c))


def _check_rect(rect: Point) -> None:
    if rect[0] <= 0 or rect[1] <= 0:
        raise UnsupportedRegionError(f"rectangle sides must be positive, got {rect}")


def kernel_h(spec: KernelSpec, rect: Point, point: Point, form: str = "closed") -> float:
    """
    Evaluate the kernel of the given kind at (x, y; u, v).

    Args:
        spec: Kernel kind, exponents, angular function and line integrals
        rect: (x, y)
        point: (u, v)
        form: "closed" for the explicit power formulas of h1/h2, "integral" for quadrature of their
            defining integrals; other kinds ignore it

    Raises:
        BoundaryRegionError: If H1 (or H2) equals 1/2
        UnsupportedRegionError: If h0 is requested outside 0 < Q < 2, Q != 1
    """
    _check_rect(rect)
    x, y = rect
    u, v = point
    kind = spec.kind
    if kind == KernelKind.H1:
        if not 0.0 < v <= y:
            return 0.0
        if form == "integral":
            return line_kernel_integral(spec.L1_plus, spec.L1_minus, spec.alpha, x, u)
        return float(line_kernel(spec.L1_plus, spec.L1_minus, spec.H1, x, u))
    if kind == KernelKind.H2:
        if not 0.0 < u <= x:
            return 0.0
        if form == "integral":
            return line_kernel_integral(spec.L2_plus, spec.L2_minus, spec.beta, y, v)
        return float(line_kernel(spec.L2_plus, spec.L2_minus, spec.H2, y, v))
    if kind == KernelKind.H1_TILDE:
        return float(h1_tilde_values(spec, rect, u, v))
    if kind == KernelKind.H2_TILDE:
        return float(h2_tilde_values(spec, rect, u, v))

    if not 0.0 < spec.Q < 2.0 or spec.Q == 1.0:
        raise UnsupportedRegionError(f"h0 needs 0 < Q < 2 and Q != 1, got Q = {spec.Q}")
    return float(h0_values(spec, rect, u, v)[0])
