"""Covariance of the well-balanced limit V0 as the L2 inner product of two h0 kernels."""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from src.coeff_families.angular import AngularFunction
from src.coeff_families.envelope import rho_tail_integral
from src.core.exceptions import ToleranceError, UnsupportedRegionError
from src.core.schemas import KernelKind, Point
from src.limit_calc.kernels import KernelSpec, h0_values
from src.region_atlas.exponents import exponents

logger = logging.getLogger(__name__)

_BATCH = 2048
_MAX_DOUBLINGS = 12


def _graded_segment(a: float, b: float, panels: int, order: int, toward_a: bool, toward_b: bool):
    """Gauss-Legendre rule on [a, b] with panels halving toward the flagged ends."""
    x, w = leggauss(order)
    if toward_a and toward_b:
        mid = 0.5 * (a + b)
        left = _graded_segment(a, mid, panels, order, True, False)
        right = _graded_segment(mid, b, panels, order, False, True)
        return np.concatenate([left[0], right[0]]), np.concatenate([left[1], right[1]])

    fractions = np.concatenate([[0.0], 2.0 ** -np.arange(panels, -1, -1)])
    if toward_a:
        breaks = a + (b - a) * fractions
    elif toward_b:
        breaks = b - (b - a) * fractions[::-1]
    else:
        breaks = np.linspace(a, b, panels + 2)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    hw = 0.5 * (breaks[1:] - breaks[:-1])
    return (mid[:, None] + hw[:, None] * x[None, :]).ravel(), (hw[:, None] * w[None, :]).ravel()


def axis_rule(edges: Sequence[float], margin: float, panels: int, order: int):
    """
    Quadrature rule on [-margin, max(edges) + margin], graded toward 0 and every rectangle edge,
    where h0 has power-type singularities.
    """
    cuts = sorted({0.0, *[float(e) for e in edges]})
    nodes, weights = [], []
    outer_left = _graded_segment(-margin, cuts[0], panels, order, False, True)
    nodes.append(outer_left[0])
    weights.append(outer_left[1])
    for a, b in zip(cuts[:-1], cuts[1:]):
        seg = _graded_segment(a, b, panels, order, True, True)
        nodes.append(seg[0])
        weights.append(seg[1])
    outer_right = _graded_segment(cuts[-1], cuts[-1] + margin, panels, order, True, False)
    nodes.append(outer_right[0])
    weights.append(outer_right[1])
    return np.concatenate(nodes), np.concatenate(weights)


def h0_tail_bound(q1: float, q2: float, sup_angular: float, rect: Point, M1: float, M2: float) -> float:
    """
    Upper bound on the integral of h0(x, y; u, v)^2 outside [-M1, x + M1] x [-M2, y + M2].

    Uses |a_inf| <= 2 sup|L0| rho, so |h0| <= 2 sup|L0| x y rho(du, dv) with (du, dv) the distance
    to the rectangle in each coordinate.
    """
    x, y = rect
    K = 2.0 * sup_angular * x * y
    corners = rho_tail_integral(q1, q2, M1, M2) / min(M1 ** q1, M2 ** q2)
    strips = (2.0 * x * M2 ** (1.0 - 2.0 * q2) / (2.0 * q2 - 1.0)
              + 2.0 * y * M1 ** (1.0 - 2.0 * q1) / (2.0 * q1 - 1.0))
    return K * K * (corners + strips)


def _h0_on_grid(spec: KernelSpec, rect: Point, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    uu = np.repeat(U, V.size)
    vv = np.tile(V, U.size)
    out = np.empty(uu.size)
    for start in range(0, uu.size, _BATCH):
        stop = start + _BATCH
        out[start:stop] = h0_values(spec, rect, uu[start:stop], vv[start:stop])
    return out.reshape(U.size, V.size)


def v0_covariance(q1: float, q2: float, angular: AngularFunction, point1: Point, point2: Point,
                  rel_tol: float = 1e-4, panels: int = 10, order: int = 4,
                  margin: Optional[float] = None) -> Tuple[float, float]:
    """
    Cov(V0(x1, y1), V0(x2, y2)) = int h0(x1, y1; u, v) h0(x2, y2; u, v) du dv.

    The plane is cut to a box whose rho-certified tail is below rel_tol times the product of the
    two kernel norms; inside the box a tensor Gauss-Legendre rule graded toward the rectangle
    edges is used.

    Returns:
        (covariance, certified truncation bound)

    Raises:
        UnsupportedRegionError: If Q >= 1 or Q_edge,1 ^ Q_edge,2 <= 1
        ToleranceError: If no box within the doubling cap meets rel_tol
    """
    exps = exponents(q1, q2)
    if not (exps.Q < 1.0 and min(exps.Q_edge1, exps.Q_edge2) > 1.0):
        raise UnsupportedRegionError(
            f"V0 covariance needs Q < 1 and Q_edge,1 ^ Q_edge,2 > 1, got Q = {exps.Q:.6g}, "
            f"Q_edge = ({exps.Q_edge1:.6g}, {exps.Q_edge2:.6g})"
        )
    spec = KernelSpec.build(KernelKind.H0, q1, q2, angular)
    sup = angular.sup_norm
    M = margin if margin is not None else 4.0 * max(point1[0], point1[1], point2[0], point2[1])

    def integrate(M: float):
        U, wU = axis_rule([point1[0], point2[0]], M, panels, order)
        V, wV = axis_rule([point1[1], point2[1]], M, panels, order)
        G1 = _h0_on_grid(spec, point1, U, V)
        G2 = G1 if point1 == point2 else _h0_on_grid(spec, point2, U, V)
        weights = wU[:, None] * wV[None, :]
        return (math.fsum((weights * G1 * G2).ravel()), math.fsum((weights * G1 * G1).ravel()),
                math.fsum((weights * G2 * G2).ravel()))

    def tail(M: float) -> float:
        return math.sqrt(h0_tail_bound(q1, q2, sup, point1, M, M) * h0_tail_bound(q1, q2, sup, point2, M, M))

    cov, norm1, norm2 = integrate(M)
    target = rel_tol * math.sqrt(norm1 * norm2)
    if tail(M) > target:
        # Grow the box on the analytic bound alone, then integrate once more.
        for _ in range(_MAX_DOUBLINGS):
            M *= 2.0
            if tail(M) <= target:
                break
        else:
            raise ToleranceError(f"V0 covariance tail bound stayed above {rel_tol:g} relative up to margin {M:g}")
        cov, norm1, norm2 = integrate(M)

    bound = tail(M)
    logger.info(f"V0 covariance {cov:.6g} on margin {M:g}, tail bound {bound:.3g}")
    return cov, bound
