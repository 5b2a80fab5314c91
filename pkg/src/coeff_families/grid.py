"""Truncated moving-average coefficient grids."""

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from src.core.exceptions import ParameterValidationError
from src.core.schemas import Family


@dataclass(frozen=True)
class CoefficientGrid:
    """
    Coefficients a(t, s) for t in [-R1, R1], s in [-R2, R2].

    values[t + R1, s + R2] holds a(t, s). The array is read-only once the grid exists,
    so grids can be shared between worker threads.
    """
    values: np.ndarray
    q1: float
    q2: float
    family: Family
    params: Dict[str, float] = field(default_factory=dict)
    zero_sum_residual: float = 0.0

    def __post_init__(self):
        R1, R2 = self.truncation_radii
        if self.values.ndim != 2 or self.values.shape[0] % 2 == 0 or self.values.shape[1] % 2 == 0:
            raise ParameterValidationError(f"coefficient array must have odd dimensions, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ParameterValidationError("coefficient values must be finite")
        if R1 < 1 or R2 < 1:
            raise ParameterValidationError(f"truncation radii must be positive, got {(R1, R2)}")
        self.values.flags.writeable = False

    @property
    def truncation_radii(self) -> Tuple[int, int]:
        return (self.values.shape[0] - 1) // 2, (self.values.shape[1] - 1) // 2

    @property
    def finite_support(self) -> bool:
        return math.isinf(self.q1) and math.isinf(self.q2)

    def at(self, t: int, s: int) -> float:
        R1, R2 = self.truncation_radii
        if abs(t) > R1 or abs(s) > R2:
            return 0.0
        return float(self.values[t + R1, s + R2])

    def sum_of_squares(self) -> float:
        return math.fsum((self.values * self.values).ravel())

    def l1_norm(self) -> float:
        return math.fsum(np.abs(self.values).ravel())


def zero_sum_residual(grid: CoefficientGrid) -> float:
    """Correctly rounded sum of all stored coefficients."""
    return math.fsum(grid.values.ravel())


def make_grid(values: np.ndarray, q1: float, q2: float, family: Family,
              params: Dict[str, float], enforce_zero_sum: bool = False) -> CoefficientGrid:
    """Build a grid, optionally moving the residual into a(0, 0) so the stored values sum to 0."""
    values = np.array(values, dtype=np.float64)
    if enforce_zero_sum:
        R1, R2 = (values.shape[0] - 1) // 2, (values.shape[1] - 1) // 2
        origin = values[R1, R2]
        values[R1, R2] = 0.0
        values[R1, R2] = -math.fsum(values.ravel())
        if origin != values[R1, R2]:
            params = {**params, "origin_shift": float(values[R1, R2] - origin)}
    residual = math.fsum(values.ravel())
    return CoefficientGrid(values=values, q1=q1, q2=q2, family=family, params=dict(params),
                           zero_sum_residual=residual)
