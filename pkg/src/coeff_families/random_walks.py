"""Transition tables of the nearest-neighbour walks behind the isotropic and heat families."""

import numpy as np
from scipy.signal import convolve2d
from scipy.special import gammaln

from src.core.exceptions import ParameterValidationError

_STEP_2D = np.array([[0.0, 0.25, 0.0],
                     [0.25, 0.0, 0.25],
                     [0.0, 0.25, 0.0]])


def rw2d_transition(j: int) -> np.ndarray:
    """
    j-step transition table p_j(u, v) of the symmetric nearest-neighbour walk on Z^2.

    The table has shape (2j+1, 2j+1) and entry [u + j, v + j] holds p_j(u, v).
    """
    if j < 0:
        raise ParameterValidationError(f"j must be >= 0, got {j}")
    table = np.ones((1, 1))
    for _ in range(j):
        table = convolve2d(table, _STEP_2D, mode="full")
    return table


def rw1d_lazy_transition(theta: float, u: int) -> np.ndarray:
    """
    u-step table q_theta(u, v) of the lazy walk on Z with P(0) = theta, P(+-1) = (1 - theta)/2.

    Entry [v + u] holds q_theta(u, v).
    """
    if not 0.0 < theta < 1.0:
        raise ParameterValidationError(f"theta must lie in (0, 1), got {theta}")
    if u < 0:
        raise ParameterValidationError(f"u must be >= 0, got {u}")
    step = np.array([(1.0 - theta) / 2.0, theta, (1.0 - theta) / 2.0])
    table = np.ones(1)
    for _ in range(u):
        table = np.convolve(table, step)
    return table


def lazy_walk_tables(theta: float, u_max: int):
    """Yield q_theta(u, .) for u = 0..u_max, reusing each table for the next step."""
    if not 0.0 < theta < 1.0:
        raise ParameterValidationError(f"theta must lie in (0, 1), got {theta}")
    step = np.array([(1.0 - theta) / 2.0, theta, (1.0 - theta) / 2.0])
    table = np.ones(1)
    yield table
    for _ in range(u_max):
        table = np.convolve(table, step)
        yield table


def simple_walk_block(j_values: np.ndarray, k_values: np.ndarray) -> np.ndarray:
    """
    P(S_j = k) for the simple +-1 walk, for every j in j_values (rows) and k in k_values (columns).

    All k must be nonnegative, increase in steps of 2 and share the parity of every j.
    The 2-D walk factorizes in rotated coordinates: p_j(u, v) = P(S_j = u+v) P(S'_j = u-v).
    """
    j = np.asarray(j_values, dtype=np.float64)[:, None]
    k = np.asarray(k_values, dtype=np.float64)[None, :]
    k0 = k[:, :1]

    with np.errstate(divide="ignore"):
        log_first = (_log_factorial(j) - _log_factorial((j + k0) / 2.0) - _log_factorial((j - k0) / 2.0)
                     - j * np.log(2.0))
        log_first = np.where(k0 <= j, log_first, -np.inf)
        ratios = np.log(np.maximum(j - k[:, :-1], 0.0)) - np.log(j + k[:, :-1] + 2.0)
    log_table = np.concatenate([log_first, log_first + np.cumsum(ratios, axis=1)], axis=1)
    return np.exp(log_table)


def _log_factorial(n: np.ndarray) -> np.ndarray:
    """log(n!) on arrays that may hold negative entries (returned as +inf, so the term vanishes)."""
    n = np.asarray(n, dtype=np.float64)
    return np.where(n >= 0, gammaln(np.maximum(n, 0.0) + 1.0), np.inf)
