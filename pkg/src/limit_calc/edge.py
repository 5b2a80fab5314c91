"""Edge variances sigma^2_edge,1 and sigma^2_edge,2 of a coefficient grid."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from src.coeff_families.envelope import RhoEnvelope, line_constant
from src.coeff_families.grid import CoefficientGrid
from src.core.exceptions import ParameterValidationError, UnsupportedRegionError
from src.core.schemas import EdgeSigmas
from src.lattice_sim.partial_sums import rectangle_counts
from src.lattice_sim.variance import weight_field

logger = logging.getLogger(__name__)


def _marginal(values: np.ndarray, axis: int) -> List[float]:
    lines = values.T if axis == 0 else values
    return [math.fsum(line) for line in lines]


def _edge_series(marginal: List[float]) -> Tuple[float, List[float]]:
    """
    2 sum_{k >= 1} T(k)^2 + 2 sum_{v <= -1} P(v)^2, where T(k) sums the marginal over indices >= k
    and P(v) over indices <= v. Returns the value and the partial sums that entered it.
    """
    R = (len(marginal) - 1) // 2
    upper = [math.fsum(marginal[k + R:]) for k in range(1, R + 1)]
    lower = [math.fsum(marginal[:v + R + 1]) for v in range(-R, 0)]
    partials = upper + lower
    return 2.0 * math.fsum(p * p for p in partials), partials


def _edge_remainder(C: float, qa: float, qb: float, R: int) -> float:
    """
    Bound on the series terms beyond the grid. Partial sums beyond index k are at most D k^{1-beta}
    with beta = qb (1 - 1/qa); squares are summable when beta > 3/2.
    """
    beta = qb * (1.0 - 1.0 / qa)
    if beta <= 1.5:
        return math.inf
    c = line_constant(qa)
    D = C * (1.0 + 2.0 * c + 1.0 / (qb - 1.0) + 2.0 * c / (beta - 1.0))
    return 2.0 * 2.0 * D * D * R ** (3.0 - 2.0 * beta) / (2.0 * beta - 3.0)


def _truncation_bound(coeffs: CoefficientGrid, partials1: List[float], partials2: List[float]) -> float:
    if coeffs.finite_support:
        return 0.0
    R1, R2 = coeffs.truncation_radii
    envelope = RhoEnvelope.fit(coeffs)
    try:
        delta = envelope.tail_mass(R1, R2)
    except ParameterValidationError:
        return math.inf
    inside = 2.0 * math.fsum(2.0 * abs(p) * delta + delta * delta for p in partials1 + partials2)
    beyond = (_edge_remainder(envelope.C, coeffs.q1, coeffs.q2, R2)
              + _edge_remainder(envelope.C, coeffs.q2, coeffs.q1, R1))
    return inside + beyond


def edge_sigmas(coeffs: CoefficientGrid) -> EdgeSigmas:
    """
    sigma^2_edge,1 = 2 sum_{v>=0} (sum_{t, s>=1} a(t, s+v))^2 + 2 sum_{v<=-1} (sum_{t, s<=0} a(t, s+v))^2
    and its mirror sigma^2_edge,2, summed exactly over the truncated grid.

    The convergence flags record whether the infinite-lattice series converge (Q_edge,2 < 1 for the
    first, Q_edge,1 < 1 for the second); when they do not, the values are finite-grid quantities only.
    """
    sigma1, partials1 = _edge_series(_marginal(coeffs.values, axis=0))
    sigma2, partials2 = _edge_series(_marginal(coeffs.values, axis=1))

    if coeffs.finite_support:
        converges1 = converges2 = True
    else:
        converges1 = 1.0 / coeffs.q1 + 1.5 / coeffs.q2 < 1.0
        converges2 = 1.5 / coeffs.q1 + 1.0 / coeffs.q2 < 1.0
    if not converges1:
        logger.warning("sigma_edge,1 series does not converge on the full lattice (Q_edge,2 >= 1)")
    if not converges2:
        logger.warning("sigma_edge,2 series does not converge on the full lattice (Q_edge,1 >= 1)")

    return EdgeSigmas(sigma2_edge1=sigma1, sigma2_edge2=sigma2,
                      truncation_bound=_truncation_bound(coeffs, partials1, partials2),
                      converges1=converges1, converges2=converges2)


def boundary_distance(u: np.ndarray, v: np.ndarray, n1: int, n2: int) -> np.ndarray:
    """Euclidean distance from (u, v) to the boundary ring of [1, n1] x [1, n2]."""
    du = np.maximum.reduce([1 - u, np.zeros_like(u), u - n1])
    dv = np.maximum.reduce([1 - v, np.zeros_like(v), v - n2])
    outside = np.hypot(du, dv)
    inside = np.minimum(np.minimum(u - 1, n1 - u), np.minimum(v - 1, n2 - v))
    return np.where((du > 0) | (dv > 0), outside, inside)


def boundary_sum_identity_check(coeffs: CoefficientGrid, x: float, y: float, lam: float, delta: float,
                                sigmas: Optional[EdgeSigmas] = None) -> float:
    """
    lambda^{-1} times the sum of G^2 over cells within delta * lambda of the rectangle boundary,
    minus x sigma^2_edge,1 + y sigma^2_edge,2. The residual shrinks as lambda grows.
    """
    if coeffs.q1 != coeffs.q2:
        raise UnsupportedRegionError(f"the boundary identity is stated for q1 = q2, got {(coeffs.q1, coeffs.q2)}")
    if delta <= 0:
        raise ParameterValidationError(f"delta must be positive, got {delta}")
    sigmas = sigmas or edge_sigmas(coeffs)
    n1, n2 = rectangle_counts(lam, 1.0, x, y)
    u, v, G = weight_field(coeffs, n1, n2)
    near = boundary_distance(u[:, None], v[None, :], n1, n2) <= delta * lam
    boundary_sum = math.fsum((G[near] ** 2).ravel()) / lam
    residual = boundary_sum - (x * sigmas.sigma2_edge1 + y * sigmas.sigma2_edge2)
    logger.debug(f"boundary sum {boundary_sum:.6g} at lambda={lam}, residual {residual:.3g}")
    return residual
