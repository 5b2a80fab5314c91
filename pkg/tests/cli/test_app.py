"""Tests for the latticescale command line."""

import json

import pytest
from typer.testing import CliRunner

from src import __version__
from src.cli.app import app
from src.core.exceptions import ExitCode


@pytest.fixture
def runner():
    return CliRunner()


def _read_json(path):
    return json.loads(path.read_text())


class TestClassifyCommand:
    """Test cases for region classification from the command line."""

    def test_edge_region(self, runner):
        result = runner.invoke(app, ["classify", "--q1", "4", "--q2", "4"])
        assert result.exit_code == 0
        assert "R33" in result.output

    def test_boundary_exits_out_of_scope(self, runner):
        result = runner.invoke(app, ["classify", "--q1", "1", "--q2", "1"])
        assert result.exit_code == int(ExitCode.OUT_OF_SCOPE)

    def test_unknown_family(self, runner):
        result = runner.invoke(app, ["classify", "--family", "bogus"])
        assert result.exit_code == int(ExitCode.VALIDATION)

    def test_missing_model(self, runner):
        result = runner.invoke(app, ["classify"])
        assert result.exit_code == int(ExitCode.VALIDATION)


class TestReportCommands:
    """Test cases for commands that write report files."""

    def test_edge_sigma_report(self, runner, tmp_path):
        result = runner.invoke(app, ["--out", str(tmp_path), "--seed", "3", "edge-sigma", "--family", "pair-difference"])
        assert result.exit_code == 0
        data = _read_json(tmp_path / "edge_sigma.json")
        assert data["result"]["sigma2_edge1"] == 2.0
        assert data["result"]["sigma2_edge2"] == 0.0
        assert data["meta"]["seed"] == 3
        assert data["meta"]["version"] == __version__

    def test_edge_sigma_boundary_check(self, runner, tmp_path):
        result = runner.invoke(app, ["--out", str(tmp_path), "edge-sigma", "--family", "pair-difference",
                                     "--delta", "0.1", "--lambda", "50"])
        assert result.exit_code == 0
        data = _read_json(tmp_path / "boundary_sum.json")
        assert data["result"]["lam"] == 50.0
        assert data["result"]["delta"] == 0.1
        assert data["result"]["residual"] == pytest.approx(0.0, abs=1e-12)

    def test_edge_sigma_without_delta_skips_check(self, runner, tmp_path):
        result = runner.invoke(app, ["--out", str(tmp_path), "edge-sigma", "--family", "pair-difference"])
        assert result.exit_code == 0
        assert not (tmp_path / "boundary_sum.json").exists()

    def test_boundary_check_unequal_exponents(self, runner, tmp_path):
        result = runner.invoke(app, ["--out", str(tmp_path), "edge-sigma", "--family", "heat", "--d", "-0.2",
                                     "--theta", "0.5", "--R1", "4", "--delta", "0.1", "--lambda", "50"])
        assert result.exit_code == int(ExitCode.OUT_OF_SCOPE)

    def test_scan_variance_pair_difference(self, runner, tmp_path):
        result = runner.invoke(app, ["--out", str(tmp_path), "scan-variance", "--family", "pair-difference",
                                     "--gamma", "1.5", "--lambdas", "64,128,256,512"])
        assert result.exit_code == 0
        data = _read_json(tmp_path / "scan_variance.json")
        assert data["result"]["H_hat"] == pytest.approx(0.5, abs=1e-10)

    def test_fbs_covariance(self, runner, tmp_path):
        result = runner.invoke(app, ["--out", str(tmp_path), "limit", "fbs-cov", "--hurst", "0.5,0.5",
                                     "--point", "1,1", "--point2", "2,3"])
        assert result.exit_code == 0
        records = _read_json(tmp_path / "limit_fbs_cov.json")["result"]
        assert records[0]["quantity"] == "fbs_covariance"
        assert records[0]["value"] == pytest.approx(1.0)

    def test_atlas_csv(self, runner, tmp_path):
        result = runner.invoke(app, ["--out", str(tmp_path), "--format", "csv", "atlas", "--grid-n", "4"])
        assert result.exit_code == 0
        lines = (tmp_path / "atlas.csv").read_text().splitlines()
        assert len(lines) == 17

    def test_csv_format(self, runner, tmp_path):
        result = runner.invoke(app, ["--out", str(tmp_path), "--format", "csv", "edge-sigma",
                                     "--family", "pair-difference"])
        assert result.exit_code == 0
        assert (tmp_path / "edge_sigma.csv").exists()

    def test_cov_check_needs_pair(self, runner, tmp_path):
        result = runner.invoke(app, ["--out", str(tmp_path), "cov-check", "--family", "pair-difference"])
        assert result.exit_code == int(ExitCode.VALIDATION)


class TestSimulateCommand:
    """Test cases for slab simulation."""

    def _simulate(self, runner, out, seed="11"):
        return runner.invoke(app, ["--out", str(out), "--seed", seed, "simulate", "--family", "pair-difference",
                                   "--T1", "8", "--T2", "6"])

    def test_reproducible_bytes(self, runner, tmp_path):
        assert self._simulate(runner, tmp_path / "a").exit_code == 0
        assert self._simulate(runner, tmp_path / "b").exit_code == 0
        assert (tmp_path / "a" / "slab.lssb").read_bytes() == (tmp_path / "b" / "slab.lssb").read_bytes()
        sidecar = _read_json(tmp_path / "a" / "slab.lssb.json")
        assert sidecar["window"] == [8, 6]
        assert sidecar["innovation"]["base_seed"] == 11

    def test_seed_changes_bytes(self, runner, tmp_path):
        self._simulate(runner, tmp_path / "a", seed="11")
        self._simulate(runner, tmp_path / "b", seed="12")
        assert (tmp_path / "a" / "slab.lssb").read_bytes() != (tmp_path / "b" / "slab.lssb").read_bytes()

    def test_environment_output_wins(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("LATTICESCALE_OUT", str(tmp_path / "env"))
        assert self._simulate(runner, tmp_path / "flag").exit_code == 0
        assert (tmp_path / "env" / "slab.lssb").exists()
        assert not (tmp_path / "flag").exists()


class TestConfigFile:
    """Test cases for --config parameter files."""

    def test_model_from_file(self, runner, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"model": {"family": "pair_difference"}, "seed": 4}))
        result = runner.invoke(app, ["--config", str(config), "--out", str(tmp_path / "out"), "edge-sigma"])
        assert result.exit_code == 0
        assert _read_json(tmp_path / "out" / "edge_sigma.json")["meta"]["seed"] == 4

    def test_delta_from_file(self, runner, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"model": {"family": "pair_difference"}, "delta": 0.2, "lambdas": [40, 80]}))
        result = runner.invoke(app, ["--config", str(config), "--out", str(tmp_path / "out"), "edge-sigma"])
        assert result.exit_code == 0
        data = _read_json(tmp_path / "out" / "boundary_sum.json")
        assert data["result"]["delta"] == 0.2
        assert data["result"]["lam"] == 80.0
        assert data["result"]["residual"] == pytest.approx(0.0, abs=1e-12)

    def test_unknown_key_rejected(self, runner, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"bogus": 1}))
        result = runner.invoke(app, ["--config", str(config), "version"])
        assert result.exit_code == int(ExitCode.VALIDATION)

    def test_unreadable_file(self, runner, tmp_path):
        result = runner.invoke(app, ["--config", str(tmp_path / "missing.json"), "version"])
        assert result.exit_code == int(ExitCode.VALIDATION)


class TestVersionCommand:
    """Test cases for the version command."""

    def test_version(self, runner):
        result = runner.invoke(app, ["version"])
        assert result.exit_code == 0
        assert __version__ in result.output
