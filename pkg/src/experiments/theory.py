"""Theoretical H(gamma), limit descriptors and limit covariances for each model family."""

import logging
import math
from typing import Dict, Optional

from scipy.special import gamma as gamma_fn

from src.coeff_families.angular import AngularFunction
from src.coeff_families.families import angular_for, decay_exponents
from src.coeff_families.grid import CoefficientGrid
from src.core.config import get_config
from src.core.exceptions import ModelOutOfScopeError, ParameterValidationError, UnsupportedRegionError
from src.core.schemas import (
    Branch,
    EdgeSigmas,
    Family,
    FbsParams,
    KernelKind,
    LimitComponent,
    LimitDescriptor,
    ModelExponents,
    ModelSpec,
    Point,
    RegionId,
    ScaleSymbol,
)
from src.lattice_sim.partial_sums import rectangle_counts
from src.limit_calc.edge import edge_sigmas
from src.limit_calc.fbs import fbs_covariance
from src.limit_calc.kernels import KernelSpec
from src.limit_calc.norms import sigma_norm
from src.limit_calc.v0 import v0_covariance
from src.region_atlas.exponents import exponents
from src.region_atlas.regions import classify_exponents, critical_gamma, limit_descriptor, normalization_exponent

logger = logging.getLogger(__name__)

_NORM_KINDS = {
    ScaleSymbol.SIGMA1: KernelKind.H1,
    ScaleSymbol.SIGMA2: KernelKind.H2,
    ScaleSymbol.SIGMA1_TILDE: KernelKind.H1_TILDE,
    ScaleSymbol.SIGMA2_TILDE: KernelKind.H2_TILDE,
}


def arfima_sum_constant(d: float) -> float:
    """c(d) with Var(sum_{t <= n} X_t) ~ c(d) n^{2d+1} for fractionally integrated noise of order d."""
    return gamma_fn(1.0 - 2.0 * d) / ((2.0 * d + 1.0) * gamma_fn(1.0 + d) * gamma_fn(1.0 - d))


def pair_difference_variance(lam: float, gamma: float, point: Point) -> float:
    """Var S = 2 floor(lambda x) for the two-tap field, whenever floor(lambda^gamma y) >= 1."""
    n1, _ = rectangle_counts(lam, gamma, *point)
    return 2.0 * n1


class TheoryOverlay:
    """
    Scaling theory of one model: H(gamma), the critical gamma and the limit random field.

    q-region models (isotropic, heat, synthetic) are dispatched to the region atlas. The
    separable and pair-difference families have no transition and carry their own limits.
    """

    def __init__(self, spec: ModelSpec, tol: Optional[float] = None):
        self.spec = spec
        self.tol = tol or get_config().classify_tol
        self.exps: Optional[ModelExponents] = None
        self.region: Optional[RegionId] = None
        self._scales: Dict[ScaleSymbol, float] = {}

        if spec.family in (Family.ISOTROPIC, Family.HEAT, Family.SYNTHETIC):
            q1, q2 = decay_exponents(spec)
            self.exps = exponents(q1, q2)
            self.region = classify_exponents(self.exps, tol=self.tol)
            logger.info(f"{spec.family.value} model: q = ({q1:.6g}, {q2:.6g}), region {self.region.tag.value}")

    @property
    def gamma0(self) -> Optional[float]:
        if self.region is None:
            return None
        try:
            return critical_gamma(self.exps, self.region)
        except ModelOutOfScopeError:
            return None

    def _fixed_hurst(self) -> Point:
        if self.spec.family == Family.SEPARABLE:
            return self.spec.d1 + 0.5, self.spec.d2 + 0.5
        return 0.5, 0.0

    def hurst(self, gamma: float) -> float:
        """
        H(gamma) of the normalization lambda^{H(gamma)}.

        Raises:
            ModelOutOfScopeError: For boundary parameters, LRD regions and the open R23/R32 transition point
        """
        if gamma <= 0:
            raise ParameterValidationError(f"gamma must be positive, got {gamma}")
        if self.region is not None:
            return normalization_exponent(self.exps, self.region, gamma)
        H1, H2 = self._fixed_hurst()
        return H1 + gamma * H2

    def hurst_or_none(self, gamma: float) -> Optional[float]:
        try:
            return self.hurst(gamma)
        except ModelOutOfScopeError as e:
            logger.info(f"no theoretical H at gamma={gamma}: {e}")
            return None

    def descriptor(self, gamma: float) -> LimitDescriptor:
        if self.region is not None:
            return limit_descriptor(self.exps, self.region, gamma)
        hurst = self._fixed_hurst()
        if self.spec.family == Family.SEPARABLE:
            symbol = ScaleSymbol.SEPARABLE_PRODUCT
        else:
            symbol = ScaleSymbol.SIGMA_EDGE1
        return LimitDescriptor(hurst_pair=hurst, scale_symbol=symbol, branch=Branch.BALANCED,
                               components=[LimitComponent(hurst_pair=hurst, scale_symbol=symbol)])

    def _angular(self) -> AngularFunction:
        return angular_for(self.spec)

    def scale_squared(self, symbol: ScaleSymbol, coeffs: CoefficientGrid, sigmas: Optional[EdgeSigmas] = None) -> float:
        """Squared scale constant of one FBS component of the limit."""
        if symbol in self._scales:
            return self._scales[symbol]

        if symbol in (ScaleSymbol.SIGMA_EDGE1, ScaleSymbol.SIGMA_EDGE2):
            sigmas = sigmas or edge_sigmas(coeffs)
            value = sigmas.sigma2_edge1 if symbol == ScaleSymbol.SIGMA_EDGE1 else sigmas.sigma2_edge2
        elif symbol in _NORM_KINDS:
            spec = KernelSpec.build(_NORM_KINDS[symbol], self.exps.q1, self.exps.q2, self._angular())
            sigma, _ = sigma_norm(spec)
            value = sigma * sigma
        elif symbol == ScaleSymbol.SRD_SUM:
            value = math.fsum(coeffs.values.ravel()) ** 2
        elif symbol == ScaleSymbol.SEPARABLE_PRODUCT:
            value = arfima_sum_constant(self.spec.d1) * arfima_sum_constant(self.spec.d2)
        else:
            raise UnsupportedRegionError(f"{symbol.value} is not the scale of an FBS component")

        self._scales[symbol] = value
        return value

    def covariance(self, gamma: float, point1: Point, point2: Point, coeffs: CoefficientGrid) -> float:
        """
        Cov(V(x1, y1), V(x2, y2)) of the scaling limit at gamma.

        Independent FBS components add; the balanced V0 limit uses the kernel inner product.
        """
        descriptor = self.descriptor(gamma)
        if descriptor.scale_symbol == ScaleSymbol.V0_KERNEL:
            value, _ = v0_covariance(self.exps.q1, self.exps.q2, self._angular(), point1, point2)
            return value

        sigmas = None
        if any(c.scale_symbol in (ScaleSymbol.SIGMA_EDGE1, ScaleSymbol.SIGMA_EDGE2) for c in descriptor.components):
            sigmas = edge_sigmas(coeffs)
        return math.fsum(
            self.scale_squared(c.scale_symbol, coeffs, sigmas)
            * fbs_covariance(FbsParams(H_x=c.hurst_pair[0], H_y=c.hurst_pair[1]), point1, point2)
            for c in descriptor.components
        )


def theory_for_model(spec: ModelSpec, tol: Optional[float] = None) -> TheoryOverlay:
    return TheoryOverlay(spec, tol)
