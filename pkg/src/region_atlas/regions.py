"""Region classification, critical gamma, normalization exponents and limit descriptors."""

import logging
import math
from typing import Tuple

from src.core.exceptions import (
    BoundaryRegionError,
    ModelOutOfScopeError,
    OpenCaseError,
    ParameterValidationError,
    UnsupportedRegionError,
)
from src.core.schemas import (
    Branch,
    LimitComponent,
    LimitDescriptor,
    ModelExponents,
    RegionId,
    RegionTag,
    ScaleSymbol,
)
from src.region_atlas.exponents import exponents

logger = logging.getLogger(__name__)

ND_REGIONS = frozenset({RegionTag.R22_MINUS, RegionTag.R23, RegionTag.R32, RegionTag.R33})
LRD_REGIONS = frozenset({RegionTag.R11, RegionTag.R12, RegionTag.R21, RegionTag.R22_PLUS})

_MIRROR = {
    RegionTag.R23: RegionTag.R32,
    RegionTag.R32: RegionTag.R23,
    RegionTag.R12: RegionTag.R21,
    RegionTag.R21: RegionTag.R12,
}


def mirror(tag: RegionTag) -> RegionTag:
    """Region of the model with q1 and q2 swapped."""
    return _MIRROR.get(tag, tag)


def classify_exponents(exps: ModelExponents, tol: float = 1e-9, zero_sum: bool = True) -> RegionId:
    Q = exps.Q
    if Q <= 0 or Q > 2.0 + tol:
        raise ModelOutOfScopeError(f"Q = {Q:.12g} lies outside the model range 0 < Q < 2")

    for name, value, level in (("Q", Q, 1.0), ("Q", Q, 2.0)):
        if abs(value - level) <= tol:
            return RegionId(tag=RegionTag.BOUNDARY, boundary_detail=f"{name} = {value:.12g} is within {tol} of {level:g}")

    if Q < 1.0:
        if not zero_sum:
            return RegionId(tag=RegionTag.SRD_LIKE)
        first, second, names = exps.Q_edge1, exps.Q_edge2, ("Q_edge1", "Q_edge2")
        table = {
            (True, True): RegionTag.R22_MINUS,
            (True, False): RegionTag.R23,
            (False, True): RegionTag.R32,
            (False, False): RegionTag.R33,
        }
    else:
        first, second, names = exps.Q_tilde1, exps.Q_tilde2, ("Q_tilde1", "Q_tilde2")
        table = {
            (False, False): RegionTag.R22_PLUS,
            (False, True): RegionTag.R12,
            (True, False): RegionTag.R21,
            (True, True): RegionTag.R11,
        }

    for name, value in zip(names, (first, second)):
        if abs(value - 1.0) <= tol:
            return RegionId(tag=RegionTag.BOUNDARY, boundary_detail=f"{name} = {value:.12g} is within {tol} of 1")

    return RegionId(tag=table[(first > 1.0, second > 1.0)])


def classify(q1: float, q2: float, tol: float = 1e-9, zero_sum: bool = True) -> RegionId:
    """
    Classify (q1, q2) into a scaling region.

    Args:
        q1, q2: Positive decay exponents.
        tol: Distance to a classifying line below which the point is tagged boundary.
        zero_sum: False for coefficients with nonzero total, which are short-range dependent when Q < 1.

    Returns:
        RegionId with the region tag and, for boundary points, the offending quantity.
    """
    return classify_exponents(exponents(q1, q2), tol=tol, zero_sum=zero_sum)


def _require_classified(region: RegionId) -> None:
    if region.tag == RegionTag.BOUNDARY:
        raise BoundaryRegionError(f"boundary parameters are not covered: {region.boundary_detail}")


def critical_gamma(exps: ModelExponents, region: RegionId) -> float:
    """The aspect-ratio exponent at which the scaling limit changes."""
    _require_classified(region)
    tag = region.tag
    if tag == RegionTag.SRD_LIKE:
        raise UnsupportedRegionError("short-range dependent fields have no scaling transition")
    if tag == RegionTag.R23:
        return exps.gamma0_edge2
    if tag == RegionTag.R32:
        return exps.gamma0_edge1
    if tag == RegionTag.R33:
        return 1.0
    return exps.gamma0


def one_sided_exponents(exps: ModelExponents, region: RegionId, gamma: float) -> Tuple[float, float]:
    """(H for the gamma < gamma0 formula, H for the gamma > gamma0 formula), both evaluated at gamma."""
    _require_classified(region)
    tag = region.tag
    if tag == RegionTag.R22_MINUS:
        return gamma * exps.H2 + 0.5, exps.H1 + gamma / 2.0
    if tag == RegionTag.R23:
        return 0.5, exps.H1 + gamma / 2.0
    if tag == RegionTag.R32:
        return gamma * exps.H2 + 0.5, gamma / 2.0
    if tag == RegionTag.R33:
        return 0.5, gamma / 2.0
    if tag == RegionTag.SRD_LIKE:
        return 0.5 + gamma / 2.0, 0.5 + gamma / 2.0
    raise UnsupportedRegionError(
        f"normalization exponents for long-range dependent region {tag.value} are not provided"
    )


def normalization_exponent(exps: ModelExponents, region: RegionId, gamma: float, tol: float = 1e-12) -> float:
    """
    H(gamma) such that lambda^{-H(gamma)} S_{lambda,gamma} has a nondegenerate limit.

    Raises:
        UnsupportedRegionError: For long-range dependent regions.
        OpenCaseError: At the transition point of R23 and R32.
    """
    if gamma <= 0:
        raise ParameterValidationError(f"gamma must be positive, got {gamma}")
    below, above = one_sided_exponents(exps, region, gamma)
    if region.tag == RegionTag.SRD_LIKE:
        return below
    gamma0 = critical_gamma(exps, region)
    if math.isclose(gamma, gamma0, rel_tol=0.0, abs_tol=tol):
        if region.tag in (RegionTag.R23, RegionTag.R32):
            raise OpenCaseError(
                f"H(gamma) at gamma = gamma0 = {gamma0:.12g} in {region.tag.value} is open (possible logarithmic factors)"
            )
        return above
    return above if gamma > gamma0 else below


def _component(hurst: Tuple[float, float], symbol: ScaleSymbol) -> LimitComponent:
    return LimitComponent(hurst_pair=hurst, scale_symbol=symbol)


def _unbalanced(exps: ModelExponents, tag: RegionTag, branch: Branch) -> LimitComponent:
    plus = branch == Branch.PLUS
    if tag == RegionTag.R33:
        return _component((0.0, 0.5), ScaleSymbol.SIGMA_EDGE2) if plus else _component((0.5, 0.0), ScaleSymbol.SIGMA_EDGE1)
    if tag == RegionTag.R23:
        return _component((exps.H1, 0.5), ScaleSymbol.SIGMA1) if plus else _component((0.5, 0.0), ScaleSymbol.SIGMA_EDGE1)
    if tag == RegionTag.R32:
        return _component((0.0, 0.5), ScaleSymbol.SIGMA_EDGE2) if plus else _component((0.5, exps.H2), ScaleSymbol.SIGMA2)
    if plus:
        if tag in (RegionTag.R11, RegionTag.R21):
            return _component((1.0, exps.H2_tilde), ScaleSymbol.SIGMA1_TILDE)
        return _component((exps.H1, 0.5), ScaleSymbol.SIGMA1)
    if tag in (RegionTag.R11, RegionTag.R12):
        return _component((exps.H1_tilde, 1.0), ScaleSymbol.SIGMA2_TILDE)
    return _component((0.5, exps.H2), ScaleSymbol.SIGMA2)


def limit_descriptor(exps: ModelExponents, region: RegionId, gamma: float, tol: float = 1e-12) -> LimitDescriptor:
    """Identify the scaling limit (sheet Hurst pair and scale constant) for the given gamma."""
    _require_classified(region)
    tag = region.tag
    if tag == RegionTag.SRD_LIKE:
        return LimitDescriptor(hurst_pair=(0.5, 0.5), scale_symbol=ScaleSymbol.SRD_SUM, branch=Branch.BALANCED,
                               components=[_component((0.5, 0.5), ScaleSymbol.SRD_SUM)])

    gamma0 = critical_gamma(exps, region)
    if math.isclose(gamma, gamma0, rel_tol=0.0, abs_tol=tol):
        if tag in (RegionTag.R23, RegionTag.R32):
            raise OpenCaseError(f"the balanced limit of {tag.value} at gamma0 = {gamma0:.12g} is open")
        if tag == RegionTag.R33:
            parts = [_component((0.5, 0.0), ScaleSymbol.SIGMA_EDGE1), _component((0.0, 0.5), ScaleSymbol.SIGMA_EDGE2)]
            return LimitDescriptor(hurst_pair=None, scale_symbol=ScaleSymbol.MIXED_EDGE,
                                   branch=Branch.BALANCED, components=parts)
        return LimitDescriptor(hurst_pair=None, scale_symbol=ScaleSymbol.V0_KERNEL, branch=Branch.BALANCED)

    branch = Branch.PLUS if gamma > gamma0 else Branch.MINUS
    part = _unbalanced(exps, tag, branch)
    return LimitDescriptor(hurst_pair=part.hurst_pair, scale_symbol=part.scale_symbol, branch=branch,
                           components=[part])
