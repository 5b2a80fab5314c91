"""Tests for the exponent algebra, region classification and limit descriptors."""

import csv

import pytest

from src.core.exceptions import (
    BoundaryRegionError,
    ModelOutOfScopeError,
    OpenCaseError,
    ParameterValidationError,
    UnsupportedRegionError,
)
from src.core.schemas import Branch, RegionTag, ScaleSymbol
from src.region_atlas.exponents import exponents, hurst_alternative_forms
from src.region_atlas.phase import PHASE_COLUMNS, midpoint_grid, phase_diagram, write_phase_csv
from src.region_atlas.regions import (
    LRD_REGIONS,
    ND_REGIONS,
    classify,
    critical_gamma,
    limit_descriptor,
    mirror,
    normalization_exponent,
    one_sided_exponents,
)


class TestExponents:
    """Test cases for the derived exponents."""

    def test_symmetric_model(self):
        exps = exponents(4.0, 4.0)
        assert exps.Q == pytest.approx(0.5)
        assert exps.H1 == exps.H2 == pytest.approx(-1.5)
        assert exps.gamma0 == 1.0
        assert exps.gamma0_edge1 == pytest.approx(0.25)
        assert exps.gamma0_edge2 == pytest.approx(4.0)

    def test_edge_gammas_only_below_one(self):
        exps = exponents(1.5, 1.5)
        assert exps.gamma0_edge1 is None
        assert exps.gamma0_edge2 is None

    @pytest.mark.parametrize("q1,q2", [(4.0, 4.0), (1.6, 8.0), (2.2, 2.2), (1.2, 3.0)])
    def test_alternative_hurst_forms(self, q1, q2):
        exps = exponents(q1, q2)
        h1, h2 = hurst_alternative_forms(q1, q2)
        assert exps.H1 == pytest.approx(h1)
        assert exps.H2 == pytest.approx(h2)

    @pytest.mark.parametrize("q1,q2", [(0.0, 2.0), (-1.0, 3.0), (float("inf"), 2.0)])
    def test_invalid_exponents(self, q1, q2):
        with pytest.raises(ParameterValidationError):
            exponents(q1, q2)


class TestClassification:
    """Test cases for the region battery."""

    @pytest.mark.parametrize("q1,q2,tag,gamma0", [
        (4.0, 4.0, RegionTag.R33, 1.0),
        (1.6, 8.0, RegionTag.R23, 0.8),
        (8.0, 1.6, RegionTag.R32, 1.25),
        (2.2, 2.2, RegionTag.R22_MINUS, 1.0),
    ])
    def test_battery(self, q1, q2, tag, gamma0):
        exps = exponents(q1, q2)
        region = classify(q1, q2)
        assert region.tag == tag
        assert critical_gamma(exps, region) == pytest.approx(gamma0)

    def test_hurst_values_of_battery(self):
        assert exponents(1.6, 8.0).H1 == pytest.approx(0.1)
        assert exponents(8.0, 1.6).H2 == pytest.approx(0.1)
        exps = exponents(2.2, 2.2)
        assert exps.H1 == exps.H2 == pytest.approx(0.3)

    def test_boundary(self):
        region = classify(1.0, 1.0)
        assert region.tag == RegionTag.BOUNDARY
        assert "Q" in region.boundary_detail

    def test_edge_line_is_boundary(self):
        # Q_edge1 = 1.5/q1 + 1/q2 = 1 at q1 = q2 = 2.5
        region = classify(2.5, 2.5)
        assert region.tag == RegionTag.BOUNDARY
        assert "Q_edge" in region.boundary_detail

    def test_long_range_regions(self):
        assert classify(1.2, 1.2).tag == RegionTag.R11
        assert classify(1.2, 1.2).tag in LRD_REGIONS
        assert classify(4.0, 4.0).tag in ND_REGIONS

    def test_nonzero_sum_is_short_range(self):
        assert classify(4.0, 4.0, zero_sum=False).tag == RegionTag.SRD_LIKE

    def test_out_of_model_range(self):
        with pytest.raises(ModelOutOfScopeError):
            classify(0.4, 0.4)

    @pytest.mark.parametrize("q1,q2", [(1.6, 8.0), (4.0, 4.0), (1.5, 2.5), (2.2, 3.1)])
    def test_mirror_symmetry(self, q1, q2):
        assert classify(q2, q1).tag == mirror(classify(q1, q2).tag)


class TestNormalizationExponents:
    """Test cases for H(gamma) and its continuity at gamma0."""

    @pytest.mark.parametrize("q1,q2", [(4.0, 4.0), (1.6, 8.0), (8.0, 1.6), (2.2, 2.2)])
    def test_one_sided_forms_meet_at_gamma0(self, q1, q2):
        exps = exponents(q1, q2)
        region = classify(q1, q2)
        gamma0 = critical_gamma(exps, region)
        below, above = one_sided_exponents(exps, region, gamma0)
        assert below == pytest.approx(above, abs=1e-12)

    def test_r33_values(self):
        exps, region = exponents(4.0, 4.0), classify(4.0, 4.0)
        assert normalization_exponent(exps, region, 0.5) == pytest.approx(0.5)
        assert normalization_exponent(exps, region, 1.0) == pytest.approx(0.5)
        assert normalization_exponent(exps, region, 2.0) == pytest.approx(1.0)

    def test_r23_values(self):
        exps, region = exponents(1.6, 8.0), classify(1.6, 8.0)
        assert normalization_exponent(exps, region, 0.5) == pytest.approx(0.5)
        assert normalization_exponent(exps, region, 1.6) == pytest.approx(0.9)

    def test_r23_balanced_case_is_open(self):
        exps, region = exponents(1.6, 8.0), classify(1.6, 8.0)
        with pytest.raises(OpenCaseError):
            normalization_exponent(exps, region, 0.8)
        with pytest.raises(OpenCaseError):
            limit_descriptor(exps, region, 0.8)

    def test_r22_minus_values(self):
        exps, region = exponents(2.2, 2.2), classify(2.2, 2.2)
        assert normalization_exponent(exps, region, 0.5) == pytest.approx(0.65)
        assert normalization_exponent(exps, region, 2.0) == pytest.approx(1.3)

    def test_long_range_not_provided(self):
        exps, region = exponents(1.2, 1.2), classify(1.2, 1.2)
        with pytest.raises(UnsupportedRegionError):
            normalization_exponent(exps, region, 1.0)

    def test_boundary_raises(self):
        exps, region = exponents(1.0, 1.0), classify(1.0, 1.0)
        with pytest.raises(BoundaryRegionError):
            critical_gamma(exps, region)

    def test_gamma_must_be_positive(self):
        exps, region = exponents(4.0, 4.0), classify(4.0, 4.0)
        with pytest.raises(ParameterValidationError):
            normalization_exponent(exps, region, 0.0)

    def test_short_range_normalization(self):
        exps, region = exponents(4.0, 4.0), classify(4.0, 4.0, zero_sum=False)
        assert normalization_exponent(exps, region, 2.0) == pytest.approx(1.5)


class TestLimitDescriptors:
    """Test cases for branch selection and scale symbols."""

    def test_r33_branches(self):
        exps, region = exponents(4.0, 4.0), classify(4.0, 4.0)
        minus = limit_descriptor(exps, region, 0.5)
        plus = limit_descriptor(exps, region, 2.0)
        assert (minus.branch, minus.hurst_pair, minus.scale_symbol) == (Branch.MINUS, (0.5, 0.0), ScaleSymbol.SIGMA_EDGE1)
        assert (plus.branch, plus.hurst_pair, plus.scale_symbol) == (Branch.PLUS, (0.0, 0.5), ScaleSymbol.SIGMA_EDGE2)

    def test_r33_balanced_is_mixed(self):
        exps, region = exponents(4.0, 4.0), classify(4.0, 4.0)
        balanced = limit_descriptor(exps, region, 1.0)
        assert balanced.scale_symbol == ScaleSymbol.MIXED_EDGE
        assert balanced.hurst_pair is None
        assert [c.scale_symbol for c in balanced.components] == [ScaleSymbol.SIGMA_EDGE1, ScaleSymbol.SIGMA_EDGE2]

    def test_r22_minus_balanced_is_kernel(self):
        exps, region = exponents(2.2, 2.2), classify(2.2, 2.2)
        assert limit_descriptor(exps, region, 1.0).scale_symbol == ScaleSymbol.V0_KERNEL

    def test_r23_branches(self):
        exps, region = exponents(1.6, 8.0), classify(1.6, 8.0)
        plus = limit_descriptor(exps, region, 2.0)
        assert plus.hurst_pair == pytest.approx((0.1, 0.5))
        assert plus.scale_symbol == ScaleSymbol.SIGMA1
        assert limit_descriptor(exps, region, 0.5).scale_symbol == ScaleSymbol.SIGMA_EDGE1

    def test_r32_mirrors_r23(self):
        exps, region = exponents(8.0, 1.6), classify(8.0, 1.6)
        minus = limit_descriptor(exps, region, 0.5)
        assert minus.hurst_pair == pytest.approx((0.5, 0.1))
        assert minus.scale_symbol == ScaleSymbol.SIGMA2
        assert limit_descriptor(exps, region, 2.0).scale_symbol == ScaleSymbol.SIGMA_EDGE2


class TestPhaseDiagram:
    """Test cases for the atlas over the (1/q1, 1/q2) plane."""

    def test_midpoint_grid(self):
        points = midpoint_grid(2)
        assert points == [(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)]

    def test_phase_regions(self):
        rows = phase_diagram([(0.25, 0.25), (0.625, 0.125)])
        assert [row.region for row in rows] == [RegionTag.R33, RegionTag.R23]

    def test_symmetric_under_swap(self):
        rows = phase_diagram(midpoint_grid(10))
        by_point = {(row.inv_q1, row.inv_q2): row.region for row in rows}
        for (a, b), tag in by_point.items():
            assert by_point[(b, a)] == mirror(tag)

    def test_csv_output(self, tmp_path):
        path = write_phase_csv(phase_diagram(midpoint_grid(4)), tmp_path / "atlas.csv")
        with path.open() as handle:
            records = list(csv.reader(handle))
        assert records[0] == PHASE_COLUMNS
        assert len(records) == 17
        assert records[1][2] == "R33"
