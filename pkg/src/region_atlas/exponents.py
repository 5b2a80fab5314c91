"""Exponent algebra of the (q1, q2) parameter plane."""

import math

from src.core.exceptions import ParameterValidationError
from src.core.schemas import ModelExponents


def exponents(q1: float, q2: float) -> ModelExponents:
    """
    Compute every derived exponent of a model with decay exponents (q1, q2).

    Raises:
        ParameterValidationError: If q1 or q2 is not a positive finite real.
    """
    if not (q1 > 0 and q2 > 0) or math.isinf(q1) or math.isinf(q2):
        raise ParameterValidationError(f"q1, q2 must be positive finite reals, got {(q1, q2)}")

    Q = 1.0 / q1 + 1.0 / q2
    H1 = 0.5 + q1 * (Q - 1.0)
    H2 = 0.5 + q2 * (Q - 1.0)
    edges = {}
    if Q < 1.0:
        edges = {
            "gamma0_edge1": 1.0 / (2.0 * q2 * (1.0 - Q)),
            "gamma0_edge2": 2.0 * q1 * (1.0 - Q),
        }

    return ModelExponents(
        q1=q1,
        q2=q2,
        Q=Q,
        H1=H1,
        H2=H2,
        H1_tilde=1.0 - (q1 / 2.0) * (2.0 - Q),
        H2_tilde=1.0 - (q2 / 2.0) * (2.0 - Q),
        gamma0=q1 / q2,
        Q_edge1=1.5 / q1 + 1.0 / q2,
        Q_edge2=1.0 / q1 + 1.5 / q2,
        Q_tilde1=0.5 / q1 + 1.0 / q2,
        Q_tilde2=1.0 / q1 + 0.5 / q2,
        **edges,
    )


def hurst_alternative_forms(q1: float, q2: float):
    """The expanded forms 3/2 + q1/q2 - q1 and 3/2 + q2/q1 - q2 of H1 and H2."""
    return 1.5 + q1 / q2 - q1, 1.5 + q2 / q1 - q2
