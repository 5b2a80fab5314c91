"""Fractional integration weights psi_j(d) = Gamma(j-d) / (Gamma(j+1) Gamma(-d))."""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, gammasgn

from src.core.exceptions import ParameterValidationError


@dataclass(frozen=True)
class FracWeights:
    """Weights psi_0..psi_J of the binomial series (1 - z)^d."""
    d: float
    weights: np.ndarray

    @property
    def J(self) -> int:
        return len(self.weights) - 1


def _check_order(d: float) -> None:
    if d == 0:
        raise ParameterValidationError("d = 0 is degenerate (Gamma(-d) has a pole)")
    if abs(d) >= 1:
        raise ParameterValidationError(f"|d| must be < 1, got d={d}")


def psi_weights(d: float, J: int) -> FracWeights:
    """
    Compute psi_0..psi_J by the ratio recursion psi_j = psi_{j-1} (j-1-d) / j.

    Args:
        d: Fractional order in (-1, 1) without 0.
        J: Last index, J >= 0.

    Returns:
        FracWeights with a read-only weight array of length J + 1.
    """
    _check_order(d)
    if J < 0:
        raise ParameterValidationError(f"J must be >= 0, got {J}")

    j = np.arange(1, J + 1, dtype=np.float64)
    weights = np.empty(J + 1, dtype=np.float64)
    weights[0] = 1.0
    weights[1:] = np.cumprod((j - 1.0 - d) / j)
    weights.flags.writeable = False
    return FracWeights(d=d, weights=weights)


def psi_weights_loggamma(d: float, J: int) -> np.ndarray:
    """Direct log-Gamma evaluation of the same weights, used to cross-check the recursion."""
    _check_order(d)
    j = np.arange(J + 1, dtype=np.float64)
    sign = gammasgn(j - d) * gammasgn(-d)
    return sign * np.exp(gammaln(j - d) - gammaln(j + 1.0) - gammaln(-d))
