"""The envelope rho(t, s) = (|t|^q1 + |s|^q2)^{-1} and tail bounds derived from it."""

import math
from dataclasses import dataclass

import numpy as np

from src.coeff_families.grid import CoefficientGrid
from src.core.exceptions import ParameterValidationError


def rho(t, s, q1: float, q2: float):
    t = np.abs(np.asarray(t, dtype=np.float64))
    s = np.abs(np.asarray(s, dtype=np.float64))
    with np.errstate(divide="ignore"):
        return 1.0 / (t ** q1 + s ** q2)


def line_constant(q: float) -> float:
    """Integral of (1 + w^q)^{-1} over w > 0."""
    return (math.pi / q) / math.sin(math.pi / q)


def _check_summable(q1: float, q2: float) -> None:
    if q1 <= 0 or q2 <= 0:
        raise ParameterValidationError(f"decay exponents must be positive, got {(q1, q2)}")
    if 1.0 / q1 + 1.0 / q2 >= 1.0:
        raise ParameterValidationError(f"rho is not summable for Q = 1/q1 + 1/q2 = {1/q1 + 1/q2} >= 1")


def _far_strips(qa: float, qb: float, R: int) -> float:
    # 2 * sum_{t > R} [rho(t,0) + 2 int_0^inf rho(t,s) ds], bounded by the integral from R.
    alpha = qa * (1.0 - 1.0 / qb)
    return 2.0 * (R ** (1.0 - qa) / (qa - 1.0)
                  + 2.0 * line_constant(qb) * R ** (1.0 - alpha) / (alpha - 1.0))


def rho_tail_mass(q1: float, q2: float, R1: int, R2: int) -> float:
    """
    Upper bound on the sum of rho over lattice points outside [-R1, R1] x [-R2, R2].

    Uses that rho is nonincreasing in |t| and |s| to compare each tail sum with an integral.
    """
    if math.isinf(q1) and math.isinf(q2):
        return 0.0
    _check_summable(q1, q2)
    if R1 < 1 or R2 < 1:
        raise ParameterValidationError(f"radii must be positive, got {(R1, R2)}")
    return _far_strips(q1, q2, R1) + _far_strips(q2, q1, R2)


def rho_tail_integral(q1: float, q2: float, M1: float, M2: float) -> float:
    """Upper bound on the integral of rho over the plane minus [-M1, M1] x [-M2, M2]."""
    _check_summable(q1, q2)
    a1 = q1 * (1.0 - 1.0 / q2)
    a2 = q2 * (1.0 - 1.0 / q1)
    return (4.0 * line_constant(q2) * M1 ** (1.0 - a1) / (a1 - 1.0)
            + 4.0 * line_constant(q1) * M2 ** (1.0 - a2) / (a2 - 1.0))


@dataclass(frozen=True)
class RhoEnvelope:
    """Envelope C * rho(t, s) dominating |a(t, s)| away from the origin."""
    q1: float
    q2: float
    C: float

    def __call__(self, t, s):
        return self.C * rho(t, s, self.q1, self.q2)

    def tail_mass(self, R1: int, R2: int) -> float:
        return self.C * rho_tail_mass(self.q1, self.q2, R1, R2)

    @classmethod
    def fit(cls, grid: CoefficientGrid) -> "RhoEnvelope":
        """Smallest C with |a(t, s)| <= C rho(t, s) at every stored offset except the origin."""
        if grid.finite_support:
            return cls(q1=grid.q1, q2=grid.q2, C=0.0)
        R1, R2 = grid.truncation_radii
        t = np.arange(-R1, R1 + 1)[:, None]
        s = np.arange(-R2, R2 + 1)[None, :]
        ratio = np.abs(grid.values) * (np.abs(t) ** grid.q1 + np.abs(s) ** grid.q2)
        ratio[R1, R2] = 0.0
        return cls(q1=grid.q1, q2=grid.q2, C=float(ratio.max()))
