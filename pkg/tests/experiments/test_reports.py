"""Tests for deterministic CSV and JSON reports."""

import csv
import json

import pytest

from src import __version__
from src.core.schemas import (
    Branch,
    CovariancePair,
    CovarianceReport,
    EdgeSigmas,
    LimitDescriptor,
    ReportFormat,
    ScaleSymbol,
    SlopeFit,
    TransitionPoint,
    TransitionReport,
    VarianceEstimate,
)
from src.experiments.reports import emit_report, report_metadata, report_rows
from src.utils.json_utils import config_hash


def _slope_fit():
    estimates = [VarianceEstimate(lam=lam, gamma=1.0, x=1.0, y=1.0, n1=int(lam), n2=int(lam), var=2.0 * lam)
                 for lam in (64.0, 128.0, 256.0)]
    return SlopeFit(gamma=1.0, H_hat=0.1, stderr=0.0, r_squared=1.0, residuals=[0.0, 0.0, 0.0],
                    lambdas_used=[64.0, 128.0, 256.0], H_theory=None, estimates=estimates)


def _read_csv(path):
    with path.open(newline="") as handle:
        return list(csv.DictReader(handle))


class TestReportRows:
    """Test cases for flattening results into CSV rows."""

    def test_slope_fit_row_per_estimate(self):
        rows = report_rows(_slope_fit())
        assert len(rows) == 3
        assert [row["lam"] for row in rows] == [64.0, 128.0, 256.0]
        assert all(row["H_hat"] == 0.1 and row["fit_stderr"] == 0.0 for row in rows)

    def test_transition_row_per_point(self):
        report = TransitionReport(points=[TransitionPoint(gamma=g, H_hat=0.5, stderr=0.01) for g in (0.5, 1.0)],
                                  detected_kink=None, kink_claimed=False, gamma0_theory=1.0)
        rows = report_rows(report)
        assert [row["gamma"] for row in rows] == [0.5, 1.0]
        assert all(row["gamma0_theory"] == 1.0 and row["kink_claimed"] is False for row in rows)

    def test_covariance_pairs_split_coordinates(self):
        descriptor = LimitDescriptor(hurst_pair=(0.5, 0.0), scale_symbol=ScaleSymbol.SIGMA_EDGE1, branch=Branch.PLUS)
        report = CovarianceReport(gamma=1.0, lam=64.0, reps=200, H=0.5, descriptor=descriptor, pairs=[
            CovariancePair(point1=(1.0, 0.5), point2=(2.0, 0.7), empirical=0.98, stderr=0.1, exact=1.0,
                           theory=1.0, passed=True),
        ])
        row = report_rows(report)[0]
        assert (row["x1"], row["y1"], row["x2"], row["y2"]) == (1.0, 0.5, 2.0, 0.7)
        assert row["scale_symbol"] == "sigma_edge1"
        assert "point1" not in row

    def test_plain_records_flatten(self):
        sigmas = EdgeSigmas(sigma2_edge1=2.0, sigma2_edge2=0.0, truncation_bound=0.0)
        rows = report_rows(sigmas)
        assert len(rows) == 1
        assert rows[0]["sigma2_edge1"] == 2.0


class TestEmitReport:
    """Test cases for writing reports to disk."""

    def test_json_is_byte_identical(self, tmp_path):
        params = {"command": "scan-variance", "gamma": 1.0}
        first = emit_report(_slope_fit(), ReportFormat.JSON, tmp_path / "a", "fit", params, seed=7)
        second = emit_report(_slope_fit(), ReportFormat.JSON, tmp_path / "b", "fit", params, seed=7)
        assert first.read_bytes() == second.read_bytes()
        assert first.name == "fit.json"

    def test_json_metadata(self, tmp_path):
        params = {"command": "scan-variance", "gamma": 1.0}
        path = emit_report(_slope_fit(), "json", tmp_path, "fit", params, seed=7)
        data = json.loads(path.read_text())
        assert data["meta"] == {"config_hash": config_hash(params), "seed": 7, "version": __version__}
        assert data["result"]["H_hat"] == 0.1
        assert len(data["result"]["estimates"]) == 3

    def test_csv_cells(self, tmp_path):
        path = emit_report(_slope_fit(), ReportFormat.CSV, tmp_path, "fit", {"gamma": 1.0})
        rows = _read_csv(path)
        assert len(rows) == 3
        assert rows[0]["lam"] == "64"
        assert rows[0]["H_hat"] == "0.10000000000000001"
        assert rows[0]["H_theory"] == ""
        assert rows[0]["seed"] == ""
        assert rows[0]["version"] == __version__
        assert rows[0]["config_hash"] == config_hash({"gamma": 1.0})

    def test_csv_booleans(self, tmp_path):
        report = TransitionReport(points=[TransitionPoint(gamma=1.0, H_hat=0.5, stderr=0.0, flagged=True)])
        rows = _read_csv(emit_report(report, ReportFormat.CSV, tmp_path, "transition", {}))
        assert rows[0]["flagged"] == "true"
        assert rows[0]["kink_claimed"] == "false"

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report(_slope_fit(), "xml", tmp_path, "fit", {})

    def test_metadata_hash_is_stable(self):
        assert report_metadata({"b": 1, "a": 2}, 3)["config_hash"] == report_metadata({"a": 2, "b": 1}, 3)["config_hash"]
