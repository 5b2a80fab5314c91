"""L2 norms sigma_i = ||h_i(1, 1; ., .)|| and sigma_i_tilde = ||h_i_tilde(1, 1; ., .)||."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import nquad, quad

from src.coeff_families.angular import AngularFunction
from src.core.config import get_config
from src.core.exceptions import DivergentIntegralError, ModelOutOfScopeError, UnsupportedRegionError
from src.core.schemas import KernelKind
from src.limit_calc.kernels import KernelSpec, kernel_h, line_kernel

logger = logging.getLogger(__name__)

_UNIT = (1.0, 1.0)
_LINE_PIECES = ((-np.inf, 0.0), (0.0, 1.0), (1.0, np.inf))


@dataclass(frozen=True)
class SigmaNorms:
    sigma1: Optional[float] = None
    sigma2: Optional[float] = None
    sigma1_tilde: Optional[float] = None
    sigma2_tilde: Optional[float] = None
    abs_error: float = 0.0


def _check_line_norm(H: float, index: int) -> None:
    if H == 0.5:
        raise UnsupportedRegionError(f"sigma{index} is undefined on the boundary Q = 1 (H{index} = 1/2)")
    if H <= 0.0:
        raise DivergentIntegralError(f"sigma{index} diverges: it needs Q_edge,{index} > 1 (H{index} = {H:.6g} <= 0)")
    if H >= 1.0:
        raise DivergentIntegralError(f"sigma{index} diverges: it needs Q_tilde{index} < 1 (H{index} = {H:.6g} >= 1)")


def _check_tilde_norm(spec: KernelSpec, index: int) -> None:
    if not 1.0 < spec.Q < 2.0:
        raise UnsupportedRegionError(f"sigma{index}_tilde is defined for 1 < Q < 2, got Q = {spec.Q:.6g}")
    q_tilde = (0.5 / spec.q1 + 1.0 / spec.q2) if index == 1 else (1.0 / spec.q1 + 0.5 / spec.q2)
    if q_tilde <= 1.0:
        raise DivergentIntegralError(f"sigma{index}_tilde diverges: it needs Q_tilde{index} > 1, got {q_tilde:.6g}")


def _reduced_line_norm(L_plus: float, L_minus: float, H: float, tol: float) -> Tuple[float, float]:
    """The v-integral of h_i^2 is exactly 1, leaving one quadrature of the squared line kernel."""
    total, error = 0.0, 0.0
    for lo, hi in _LINE_PIECES:
        value, err = quad(lambda z: float(line_kernel(L_plus, L_minus, H, 1.0, z)) ** 2, lo, hi,
                          epsabs=tol, epsrel=1e-10, limit=400)
        total += value
        error += err
    return total, error


def _planar_norm(spec: KernelSpec, tol: float) -> Tuple[float, float]:
    """Two-dimensional quadrature of the kernel squared, across the indicator jumps."""
    total, error = 0.0, 0.0
    for lo, hi in _LINE_PIECES:
        if spec.kind == KernelKind.H1:
            integrand = lambda z, w: kernel_h(spec, _UNIT, (z, w)) ** 2
        else:
            integrand = lambda z, w: kernel_h(spec, _UNIT, (w, z)) ** 2
        value, err = nquad(integrand, [(lo, hi), (-0.5, 1.5)],
                           opts=[{"epsabs": tol, "epsrel": 1e-10, "limit": 400},
                                 {"epsabs": tol, "epsrel": 1e-10, "points": [0.0, 1.0]}])
        total += value
        error += err
    return total, error


def _tilde_inner(table, c: float, tol: float) -> float:
    """int [F(c - w) - F(-w)]^2 dw over the real line."""
    total = 0.0
    for lo, hi in ((-np.inf, 0.0), (0.0, c), (c, np.inf)):
        value, _ = quad(lambda w: float(table(c - w) - table(-w)) ** 2, lo, hi, epsabs=tol, limit=200)
        total += value
    return total


def _tilde_norm(spec: KernelSpec, index: int, tol: float) -> Tuple[float, float]:
    """
    sigma_tilde^2 by nested 1-D quadratures.

    For h1_tilde the v-integral at fixed u reduces by w = v |u|^{-kappa} to
    |u|^{-2 alpha} I(c) / c with c = |u|^{-kappa}; h2_tilde is analogous in (v, u).
    """
    total, error = 0.0, 0.0
    if index == 1:
        for table in spec.row_tables:
            def outer(r: float, table=table) -> float:
                c = r ** (-spec.kappa)
                return r ** (-2.0 * spec.alpha) * _tilde_inner(table, c, tol) / c
            value, err = quad(outer, 0.0, np.inf, epsabs=tol, limit=200)
            total += value
            error += err
        return total, error

    table = spec.column_table

    def outer(r: float) -> float:
        c = r ** (1.0 / spec.kappa)
        return r ** (-2.0 * spec.beta) * c * _tilde_inner(table, 1.0 / c, tol)

    value, err = quad(outer, 0.0, np.inf, epsabs=tol, limit=200)
    return 2.0 * value, 2.0 * err


def sigma_norm(spec: KernelSpec, method: str = "reduced", tol: Optional[float] = None) -> Tuple[float, float]:
    """
    ||h(1, 1; ., .)|| for the kernel kind of `spec`, with an absolute error estimate.

    Args:
        spec: Kernel of kind h1, h2, h1_tilde or h2_tilde
        method: "reduced" (separable 1-D form) or "planar" (2-D quadrature; h1/h2 only)

    Raises:
        DivergentIntegralError: If the norm is infinite for the exponents
        UnsupportedRegionError: If the kernel is not defined for the exponents
    """
    tol = tol or get_config().quad_tol
    kind = spec.kind
    if kind in (KernelKind.H1, KernelKind.H2):
        index = 1 if kind == KernelKind.H1 else 2
        H = spec.H1 if index == 1 else spec.H2
        _check_line_norm(H, index)
        if method == "planar":
            square, err = _planar_norm(spec, tol)
        elif index == 1:
            square, err = _reduced_line_norm(spec.L1_plus, spec.L1_minus, H, tol)
        else:
            square, err = _reduced_line_norm(spec.L2_plus, spec.L2_minus, H, tol)
    elif kind in (KernelKind.H1_TILDE, KernelKind.H2_TILDE):
        index = 1 if kind == KernelKind.H1_TILDE else 2
        _check_tilde_norm(spec, index)
        square, err = _tilde_norm(spec, index, tol)
    else:
        raise UnsupportedRegionError("the h0 norm depends on the rectangle; use v0_covariance")

    sigma = math.sqrt(max(square, 0.0))
    return sigma, err / (2.0 * sigma) if sigma > 0 else math.sqrt(err)


def sigma_norms(q1: float, q2: float, angular: AngularFunction, method: str = "reduced",
                tilde: bool = False, tol: Optional[float] = None) -> SigmaNorms:
    """Every norm that is finite for (q1, q2); the others are left as None."""
    values = {}
    error = 0.0
    kinds = [KernelKind.H1, KernelKind.H2]
    if tilde:
        kinds += [KernelKind.H1_TILDE, KernelKind.H2_TILDE]
    for kind in kinds:
        try:
            sigma, err = sigma_norm(KernelSpec.build(kind, q1, q2, angular, tol), method, tol)
        except ModelOutOfScopeError as e:
            logger.info(f"{kind.value} norm not available: {e}")
            continue
        name = {"h1": "sigma1", "h2": "sigma2", "h1_tilde": "sigma1_tilde", "h2_tilde": "sigma2_tilde"}[kind.value]
        values[name] = sigma
        error += err
    return SigmaNorms(abs_error=error, **values)
