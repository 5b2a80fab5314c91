"""Rectangle-sum variances of the untruncated field, from its spectral density."""

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from src.core.exceptions import ParameterValidationError
from src.lattice_sim.field import check_budget
from src.lattice_sim.partial_sums import rectangle_counts

logger = logging.getLogger(__name__)

SpectralDensity = Callable[[np.ndarray, np.ndarray], np.ndarray]

NEAR_PERIODS = 32
ORDER = 8
ORIGIN_LEVELS = 12


def fejer_kernel(n: int, w) -> np.ndarray:
    """|sum_{t=1}^n e^{itw}|^2 = sin^2(nw/2) / sin^2(w/2), equal to n^2 at w = 0."""
    w = np.asarray(w, dtype=np.float64)
    half = np.sin(0.5 * w)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.sin(0.5 * n * w) ** 2 / (half * half)
    return np.where(half == 0.0, float(n) ** 2, values)


def _panel_rule(breaks: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    hw = 0.5 * (breaks[1:] - breaks[:-1])
    return (mid[:, None] + hw[:, None] * x[None, :]).ravel(), (hw[:, None] * w[None, :]).ravel()


def fejer_axis_rule(n: int, near_periods: int = NEAR_PERIODS, order: int = ORDER,
                    origin_levels: int = ORIGIN_LEVELS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes on (0, pi) and weights W with sum W phi(w) ~ int_0^pi phi(w) K_n(w) dw.

    Up to `near_periods` zeros 2 pi k / n the rule has one Gauss-Legendre panel per period, the
    first graded toward 0. Further out K_n is replaced by its period average 1 / (2 sin^2(w/2))
    on panels of doubling length; phi must vary slowly on the period there.
    """
    if n < 1:
        raise ParameterValidationError(f"rectangle side must be >= 1, got {n}")
    period = 2.0 * math.pi / n
    cut = min(math.pi, near_periods * period)
    periods = np.unique(np.minimum(np.arange(math.ceil(cut / period) + 1) * period, cut))
    grading = periods[1] * 2.0 ** -np.arange(origin_levels, 0, -1)
    near_nodes, near_weights = _panel_rule(np.concatenate([[0.0], grading, periods[1:]]), order)
    near_weights = near_weights * fejer_kernel(n, near_nodes)
    if cut >= math.pi:
        return near_nodes, near_weights

    far = [cut]
    while far[-1] < math.pi:
        far.append(min(2.0 * far[-1], math.pi))
    far_nodes, far_weights = _panel_rule(np.asarray(far), order)
    far_weights = far_weights / (2.0 * np.sin(0.5 * far_nodes) ** 2)
    return np.concatenate([near_nodes, far_nodes]), np.concatenate([near_weights, far_weights])


def spectral_variance(density: SpectralDensity, n1: int, n2: int,
                      memory_budget: Optional[int] = None) -> float:
    """
    Var of the sum over [1, n1] x [1, n2] as the integral of f(x, y) K_n1(x) K_n2(y) over
    [-pi, pi]^2, for a density even in each coordinate.
    """
    x, wx = fejer_axis_rule(n1)
    y, wy = fejer_axis_rule(n2)
    check_budget(x.size * y.size, f"spectral grid {x.size} x {y.size}", memory_budget, overhead=3)
    values = density(x[:, None], y[None, :])
    return 4.0 * math.fsum((wx[:, None] * wy[None, :] * values).ravel())


def spectral_rectangle_variance(density: SpectralDensity, gamma: float, lam: float, point: Tuple[float, float],
                                memory_budget: Optional[int] = None) -> float:
    """Var S_{lambda,gamma}(x, y) of the untruncated field with unit-variance innovations."""
    n1, n2 = rectangle_counts(lam, gamma, *point)
    var = spectral_variance(density, n1, n2, memory_budget)
    logger.debug(f"spectral variance at lambda={lam}, gamma={gamma}: rectangle {n1} x {n2}, var {var:.6g}")
    return var
