"""Constructors for the coefficient families."""

import functools
import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import gamma as gamma_fn

from src.coeff_families.angular import AngularFunction, a_infinity, isotropic_angular, heat_angular
from src.coeff_families.frac_weights import psi_weights
from src.coeff_families.grid import CoefficientGrid, make_grid
from src.coeff_families.random_walks import lazy_walk_tables, simple_walk_block
from src.core.config import get_config
from src.core.exceptions import ParameterValidationError, ToleranceError
from src.core.schemas import Family, ModelSpec

logger = logging.getLogger(__name__)

# Rows of the walk table evaluated per block in the isotropic series.
_J_BLOCK = 4096


def isotropic_tail_bound(d: float, J: int) -> float:
    """
    Pointwise bound on the discarded series terms j > J:
    sum |psi_j(-d)| sup p_j ~ 2 / (pi |Gamma(d)| (1 - d)) J^{d-1}.
    """
    return 2.0 / (math.pi * abs(gamma_fn(d)) * (1.0 - d)) * J ** (d - 1.0)


def _isotropic_series(d: float, R: int, J: int) -> np.ndarray:
    """a(u, v) = sum_{j <= J} psi_j(-d) b_j(|u+v|) b_j(|u-v|) on [-R, R]^2."""
    psi = psi_weights(-d, J).weights
    k_max = 2 * R
    M = np.zeros((k_max + 1, k_max + 1))

    for parity in (0, 1):
        ks = np.arange(parity, k_max + 1, 2)
        if ks.size == 0:
            continue
        block = np.zeros((ks.size, ks.size))
        for j0 in range(parity, J + 1, 2 * _J_BLOCK):
            js = np.arange(j0, min(j0 + 2 * _J_BLOCK, J + 1), 2)
            B = simple_walk_block(js, ks)
            block += B.T @ (psi[js][:, None] * B)
        M[np.ix_(ks, ks)] = block

    u = np.arange(-R, R + 1)[:, None]
    v = np.arange(-R, R + 1)[None, :]
    return M[np.abs(u + v), np.abs(u - v)]


def isotropic_coeffs(d: float, R: int, J: Optional[int] = None, tol: Optional[float] = None,
                     series_factor: Optional[float] = None, j_cap: Optional[int] = None,
                     enforce_zero_sum: bool = False) -> CoefficientGrid:
    """
    Coefficients of the fractional lattice Laplacian, a(u, v) = sum_j psi_j(-d) p_j(u, v).

    Args:
        d: Fractional order, -1 < d < 0.
        R: Window radius in both coordinates.
        J: Series length. When None it starts at series_factor * R^2 and doubles until
           the discarded-tail bound is below tol.
        tol: Tolerance on the discarded-tail bound.
        series_factor: c in the starting length c * R^2.
        j_cap: Largest series length tried before giving up.
        enforce_zero_sum: Move the truncation residual into a(0, 0).

    Returns:
        CoefficientGrid with q1 = q2 = 2(1 - d).
    """
    if not -1.0 < d < 0.0:
        raise ParameterValidationError(f"isotropic family requires -1 < d < 0, got d={d}")
    if d <= -0.5:
        logger.warning(f"isotropic d={d} is below -1/2; far-field asymptotics are extrapolated")
    if R < 1:
        raise ParameterValidationError(f"R must be >= 1, got {R}")

    config = get_config()
    if J is None:
        tol = config.series_tol if tol is None else tol
        factor = config.series_factor if series_factor is None else series_factor
        cap = config.series_cap if j_cap is None else j_cap
        J = max(1, math.ceil(factor * R * R))
        while isotropic_tail_bound(d, J) > tol and J < cap:
            J = min(2 * J, cap)
        if isotropic_tail_bound(d, J) > tol:
            raise ToleranceError(
                f"isotropic series tail bound {isotropic_tail_bound(d, J):.3e} exceeds tol={tol} at J cap {J}"
            )
    logger.info(f"isotropic coefficients d={d}, R={R}, J={J}")

    values = _isotropic_series(d, R, J)
    q = 2.0 * (1.0 - d)
    return make_grid(values, q, q, Family.ISOTROPIC, {"d": d, "J": float(J)}, enforce_zero_sum)


def heat_coeffs(d: float, theta: float, R1: int, enforce_zero_sum: bool = False) -> CoefficientGrid:
    """a(u, v) = psi_u(-d) q_theta(u, v) 1(0 <= u <= R1) on the window [-R1, R1]^2."""
    if not -0.75 < d < 0.0:
        raise ParameterValidationError(f"heat family requires -3/4 < d < 0, got d={d}")
    if not 0.0 < theta < 1.0:
        raise ParameterValidationError(f"theta must lie in (0, 1), got {theta}")
    if R1 < 1:
        raise ParameterValidationError(f"R1 must be >= 1, got {R1}")

    psi = psi_weights(-d, R1).weights
    values = np.zeros((2 * R1 + 1, 2 * R1 + 1))
    for u, table in enumerate(lazy_walk_tables(theta, R1)):
        values[u + R1, R1 - u:R1 + u + 1] = psi[u] * table

    q1 = 1.5 - d
    return make_grid(values, q1, 2.0 * q1, Family.HEAT, {"d": d, "theta": theta}, enforce_zero_sum)


def separable_coeffs(d1: float, d2: float, R1: int, R2: int) -> CoefficientGrid:
    """a(u, v) = psi_u(-d1) psi_v(-d2) on [0, R1] x [0, R2], zero elsewhere."""
    for name, value in (("d1", d1), ("d2", d2)):
        if not -0.5 < value < 0.5 or value == 0:
            raise ParameterValidationError(f"{name} must lie in (-1/2, 1/2) without 0, got {value}")
    if R1 < 1 or R2 < 1:
        raise ParameterValidationError(f"radii must be positive, got {(R1, R2)}")

    values = np.zeros((2 * R1 + 1, 2 * R2 + 1))
    values[R1:, R2:] = np.outer(psi_weights(-d1, R1).weights, psi_weights(-d2, R2).weights)
    return make_grid(values, 1.0 - d1, 1.0 - d2, Family.SEPARABLE, {"d1": d1, "d2": d2})


def pair_difference_coeffs() -> CoefficientGrid:
    """The two-tap field X(t, s) = eps(t, s) - eps(t, s - 1)."""
    values = np.zeros((3, 3))
    values[1, 1] = 1.0
    values[1, 2] = -1.0
    return make_grid(values, math.inf, math.inf, Family.PAIR_DIFFERENCE, {})


def synthetic_coeffs(q1: float, q2: float, angular: AngularFunction, R1: int, R2: int) -> CoefficientGrid:
    """
    Coefficients a_inf(t, s) built from an angular function, with a(0, 0) set so the grid sums to 0.
    """
    if q1 <= 0 or q2 <= 0:
        raise ParameterValidationError(f"q1, q2 must be positive, got {(q1, q2)}")
    if 1.0 / q1 + 1.0 / q2 >= 1.0:
        raise ParameterValidationError(f"synthetic family requires Q = 1/q1 + 1/q2 < 1, got {1/q1 + 1/q2}")
    if R1 < 1 or R2 < 1:
        raise ParameterValidationError(f"radii must be positive, got {(R1, R2)}")

    t = np.arange(-R1, R1 + 1, dtype=np.float64)[:, None]
    s = np.arange(-R2, R2 + 1, dtype=np.float64)[None, :]
    t_grid, s_grid = np.broadcast_arrays(t, s)
    values = np.zeros(t_grid.shape)
    off_origin = (t_grid != 0) | (s_grid != 0)
    values[off_origin] = a_infinity(t_grid[off_origin], s_grid[off_origin], q1, q2, angular)
    return make_grid(values, q1, q2, Family.SYNTHETIC, {"L0_sup": angular.sup_norm}, enforce_zero_sum=True)


def decay_exponents(spec: ModelSpec) -> Tuple[float, float]:
    """(q1, q2) of the coefficient asymptotics for families that have them."""
    if spec.family == Family.ISOTROPIC:
        q = 2.0 * (1.0 - spec.d)
        return q, q
    if spec.family == Family.HEAT:
        return 1.5 - spec.d, 2.0 * (1.5 - spec.d)
    if spec.family == Family.SYNTHETIC:
        return spec.q1, spec.q2
    raise ParameterValidationError(f"family {spec.family.value} has no (q1, q2) decay exponents")


def angular_for(spec: ModelSpec) -> AngularFunction:
    """The angular function L0 of a model with power-law coefficient asymptotics."""
    if spec.family == Family.ISOTROPIC:
        return isotropic_angular(spec.d)
    if spec.family == Family.HEAT:
        return heat_angular(spec.d, spec.theta)
    if spec.family == Family.SYNTHETIC:
        return AngularFunction.constant(spec.angular_constant)
    raise ParameterValidationError(f"family {spec.family.value} has no angular function")


def build_grid(spec: ModelSpec, **series_options) -> CoefficientGrid:
    """Construct the coefficient grid a ModelSpec describes."""
    R2 = spec.R2 if spec.R2 is not None else spec.R1
    if spec.family == Family.ISOTROPIC:
        return isotropic_coeffs(spec.d, spec.R1, enforce_zero_sum=spec.enforce_zero_sum, **series_options)
    if spec.family == Family.HEAT:
        return heat_coeffs(spec.d, spec.theta, spec.R1, enforce_zero_sum=spec.enforce_zero_sum)
    if spec.family == Family.SEPARABLE:
        return separable_coeffs(spec.d1, spec.d2, spec.R1, R2)
    if spec.family == Family.PAIR_DIFFERENCE:
        return pair_difference_coeffs()
    return synthetic_coeffs(spec.q1, spec.q2, angular_for(spec), spec.R1, R2)


def isotropic_fourier_transform(d: float, x, y):
    """
    Fourier transform of the isotropic coefficients, (1 - (cos x + cos y) / 2)^{-d}, evaluated as
    (sin^2(x/2) + sin^2(y/2))^{-d} to keep precision near the origin.
    """
    return (np.sin(0.5 * x) ** 2 + np.sin(0.5 * y) ** 2) ** (-d)


def isotropic_spectral_density(d: float, x, y):
    """Spectral density (2 pi)^{-2} |a_hat(x, y)|^2 of the isotropic field, zero only at the origin."""
    return (2.0 * math.pi) ** -2 * isotropic_fourier_transform(d, x, y) ** 2


def spectral_density_for(spec: ModelSpec) -> Optional[Callable]:
    """Closed-form spectral density of the untruncated field, or None when the family has none."""
    if spec.family == Family.ISOTROPIC:
        return functools.partial(isotropic_spectral_density, spec.d)
    return None
