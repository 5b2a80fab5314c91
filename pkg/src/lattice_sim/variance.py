"""Exact and Monte Carlo variances of rectangle sums."""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.coeff_families.grid import CoefficientGrid
from src.core.exceptions import ParameterValidationError
from src.core.schemas import InnovationSpec, VarianceEstimate
from src.lattice_sim.field import check_budget, simulate_field
from src.lattice_sim.partial_sums import prefix_table, rectangle_counts
from src.utils.performance import ReplicatePool

logger = logging.getLogger(__name__)


def coefficient_prefix(grid: CoefficientGrid) -> np.ndarray:
    """P[i + R1 + 1, j + R2 + 1] = sum of a(k, l) over k <= i, l <= j."""
    return prefix_table(grid.values)


def _prefix_at(prefix: np.ndarray, R1: int, R2: int, i, j):
    rows = np.clip(np.asarray(i) + R1 + 1, 0, 2 * R1 + 1)
    cols = np.clip(np.asarray(j) + R2 + 1, 0, 2 * R2 + 1)
    return prefix[rows, cols]


def rectangle_weights(grid: CoefficientGrid, n1: int, n2: int, u, v, prefix: Optional[np.ndarray] = None):
    """
    G(u, v) = sum over 1 <= t <= n1, 1 <= s <= n2 of a(t - u, s - v), the weight of eps(u, v) in S.

    u and v broadcast against each other.
    """
    R1, R2 = grid.truncation_radii
    P = coefficient_prefix(grid) if prefix is None else prefix
    u = np.asarray(u)
    v = np.asarray(v)
    return (_prefix_at(P, R1, R2, n1 - u, n2 - v) - _prefix_at(P, R1, R2, -u, n2 - v)
            - _prefix_at(P, R1, R2, n1 - u, -v) + _prefix_at(P, R1, R2, -u, -v))


def band_coordinates(n: int, R: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distinct coordinates of G along one axis and their multiplicities.

    G vanishes outside [1 - R, n + R]. Coordinates in [R + 1, n - R] see the whole kernel on
    both sides, so they share one G profile; one representative stands in for all of them.
    """
    if n <= 2 * R:
        coords = np.arange(1 - R, n + R + 1)
        return coords, np.ones(coords.size)
    low = np.arange(1 - R, R + 1)
    high = np.arange(n - R + 1, n + R + 1)
    coords = np.concatenate([low, [R + 1], high])
    weights = np.concatenate([np.ones(low.size), [float(n - 2 * R)], np.ones(high.size)])
    return coords, weights


def exact_variance(coeffs: CoefficientGrid, gamma: float, lam: float, point: Tuple[float, float],
                   memory_budget: Optional[int] = None) -> float:
    """Var S_{lambda,gamma}(x, y) = sum of G(u, v)^2 for the truncated coefficients (unit-variance innovations)."""
    n1, n2 = rectangle_counts(lam, gamma, *point)
    return rectangle_variance(coeffs, n1, n2, memory_budget)


def rectangle_variance(coeffs: CoefficientGrid, n1: int, n2: int, memory_budget: Optional[int] = None) -> float:
    R1, R2 = coeffs.truncation_radii
    U, wU = band_coordinates(n1, R1)
    V, wV = band_coordinates(n2, R2)
    check_budget(U.size * V.size, f"G band grid {U.size} x {V.size}", memory_budget, overhead=6)
    G = rectangle_weights(coeffs, n1, n2, U[:, None], V[None, :])
    return math.fsum((wU[:, None] * wV[None, :] * G * G).ravel())


def weight_field(coeffs: CoefficientGrid, n1: int, n2: int, extent: Optional[Tuple[int, int]] = None,
                 memory_budget: Optional[int] = None):
    """
    G on the full grid u in [1 - R1, N1 + R1], v in [1 - R2, N2 + R2], where (N1, N2) = extent or (n1, n2).

    Returns (u coordinates, v coordinates, G array).
    """
    R1, R2 = coeffs.truncation_radii
    N1, N2 = extent or (n1, n2)
    u = np.arange(1 - R1, N1 + R1 + 1)
    v = np.arange(1 - R2, N2 + R2 + 1)
    check_budget(u.size * v.size, f"G grid {u.size} x {v.size}", memory_budget, overhead=6)
    return u, v, rectangle_weights(coeffs, n1, n2, u[:, None], v[None, :])


def exact_covariance(coeffs: CoefficientGrid, gamma: float, lam: float, point1: Tuple[float, float],
                     point2: Tuple[float, float], memory_budget: Optional[int] = None) -> float:
    """Cov(S(x1, y1), S(x2, y2)) = sum of G1 G2 over the common support."""
    a1, b1 = rectangle_counts(lam, gamma, *point1)
    a2, b2 = rectangle_counts(lam, gamma, *point2)
    extent = (max(a1, a2), max(b1, b2))
    _, _, G1 = weight_field(coeffs, a1, b1, extent, memory_budget)
    _, _, G2 = weight_field(coeffs, a2, b2, extent, memory_budget)
    return math.fsum((G1 * G2).ravel())


def replicate_sums(coeffs: CoefficientGrid, innov: InnovationSpec, rectangles: Sequence[Tuple[int, int]],
                   reps: int, workers: Optional[int] = None, method: str = "fft") -> np.ndarray:
    """
    S over each (n1, n2) rectangle for replicates 0..reps-1; row r belongs to replicate r.
    """
    T1 = max(n1 for n1, _ in rectangles)
    T2 = max(n2 for _, n2 in rectangles)

    def one_replicate(replicate: int) -> np.ndarray:
        slab = simulate_field(coeffs, T1, T2, innov, replicate, method=method)
        prefix = prefix_table(slab.values)
        return np.array([prefix[n1, n2] for n1, n2 in rectangles])

    rows = ReplicatePool(workers).map_ordered(one_replicate, list(range(reps)))
    return np.vstack(rows)


def variance_with_stderr(samples: np.ndarray) -> Tuple[float, float]:
    """Unbiased sample variance and its standard error from the fourth central moment."""
    n = samples.size
    mean = math.fsum(samples) / n
    centered = samples - mean
    var = math.fsum(centered * centered) / (n - 1)
    m4 = math.fsum(centered ** 4) / n
    se2 = (m4 - var * var * (n - 3) / (n - 1)) / n
    return var, math.sqrt(max(se2, 0.0))


def replicate_variance(coeffs: CoefficientGrid, innov: InnovationSpec, gamma: float, lambdas: Sequence[float],
                       point: Tuple[float, float], reps: int, workers: Optional[int] = None,
                       method: str = "fft") -> List[VarianceEstimate]:
    """Per-lambda sample variance of S across independent replicates."""
    if reps < 2:
        raise ParameterValidationError(f"reps must be >= 2, got {reps}")
    rectangles = [rectangle_counts(lam, gamma, *point) for lam in lambdas]
    sums = replicate_sums(coeffs, innov, rectangles, reps, workers, method)
    logger.info(f"simulated {reps} replicates for {len(lambdas)} scales at gamma={gamma}")

    estimates = []
    for column, (lam, (n1, n2)) in enumerate(zip(lambdas, rectangles)):
        var, stderr = variance_with_stderr(sums[:, column])
        estimates.append(VarianceEstimate(lam=lam, gamma=gamma, x=point[0], y=point[1], n1=n1, n2=n2,
                                          var=var, stderr=stderr, reps=reps, seed=innov.base_seed))
    return estimates
