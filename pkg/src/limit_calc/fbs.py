"""Covariances of fractional Brownian sheets B_{H1,H2}, including degenerate Hurst values 0."""

from typing import Sequence, Tuple

import numpy as np

from src.core.exceptions import ParameterValidationError
from src.core.schemas import FbsParams, Point


def fbm_factor(H: float, a: float, b: float) -> float:
    """
    (a^{2H} + b^{2H} - |a - b|^{2H}) / 2, with |a - b|^0 read as 0 when a == b.

    For H = 0 this gives 1 when a == b and 1/2 otherwise; equality is exact comparison.
    """
    if H == 0.0:
        return 1.0 if a == b else 0.5
    return 0.5 * (a ** (2.0 * H) + b ** (2.0 * H) - abs(a - b) ** (2.0 * H))


def _check_point(point: Point) -> None:
    if point[0] <= 0 or point[1] <= 0:
        raise ParameterValidationError(f"sheet coordinates must be positive, got {point}")


def fbs_covariance(p: FbsParams, point1: Point, point2: Point) -> float:
    """E B(x1, y1) B(x2, y2) = factor(H_x; x1, x2) * factor(H_y; y1, y2)."""
    _check_point(point1)
    _check_point(point2)
    return fbm_factor(p.H_x, point1[0], point2[0]) * fbm_factor(p.H_y, point1[1], point2[1])


def fbs_covariance_matrix(p: FbsParams, points: Sequence[Point]) -> np.ndarray:
    n = len(points)
    gram = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            gram[i, j] = gram[j, i] = fbs_covariance(p, points[i], points[j])
    return gram


def self_similarity_check(p: FbsParams, scales: Tuple[float, float], points: Sequence[Point],
                          tol: float = 1e-10) -> bool:
    """
    Check Cov(B(l1 x, l2 y), B(l1 x', l2 y')) = l1^{2 H_x} l2^{2 H_y} Cov(B(x, y), B(x', y')) on every pair of points.
    """
    l1, l2 = scales
    if l1 <= 0 or l2 <= 0:
        raise ParameterValidationError(f"scales must be positive, got {scales}")
    factor = l1 ** (2.0 * p.H_x) * l2 ** (2.0 * p.H_y)
    scaled = [(l1 * x, l2 * y) for x, y in points]
    for i in range(len(points)):
        for j in range(i, len(points)):
            lhs = fbs_covariance(p, scaled[i], scaled[j])
            rhs = factor * fbs_covariance(p, points[i], points[j])
            if abs(lhs - rhs) > tol * max(1.0, abs(rhs)):
                return False
    return True
