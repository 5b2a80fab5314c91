"""
latticescale command line.

Every command reads its parameters from flags, falling back to the JSON file given with
--config, and writes deterministic reports carrying the config hash, seed and code version.
"""

import functools
import json
import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from src import __version__
from src.cli.presenter import ResultPresenter
from src.coeff_families.families import angular_for, build_grid, decay_exponents
from src.coeff_families.grid_io import grid_sidecar, write_grid
from src.core.config import AppConfig, ConfigManager, get_config
from src.core.exceptions import (
    BoundaryRegionError,
    ExitCode,
    LatticeScaleError,
    OpenCaseError,
    ParameterValidationError,
)
from src.core.schemas import (
    BoundaryCheck,
    CliConfig,
    Family,
    FbsParams,
    InnovationFamily,
    InnovationSpec,
    LimitValue,
    ModelSpec,
    Point,
    RegionTag,
    ReportFormat,
    ScanConfig,
)
from src.experiments.reports import emit_report
from src.experiments.scans import ScalingExperiment
from src.lattice_sim.field import simulate_field
from src.limit_calc.edge import boundary_sum_identity_check, edge_sigmas
from src.limit_calc.fbs import fbs_covariance
from src.limit_calc.kernels import angular_integrals
from src.limit_calc.norms import sigma_norms
from src.limit_calc.v0 import v0_covariance
from src.region_atlas.exponents import exponents
from src.region_atlas.phase import midpoint_grid, phase_diagram, write_phase_csv
from src.region_atlas.regions import classify_exponents, critical_gamma, limit_descriptor
from src.utils.json_utils import canonical_json, config_hash

logger = logging.getLogger(__name__)

console = Console()
presenter = ResultPresenter(console)
app = typer.Typer(
    name="latticescale",
    help="Scaling limits and scaling transition of negatively dependent linear random fields on Z^2",
    rich_markup_mode="rich",
    no_args_is_help=True,
)


class LimitQuantity(str, Enum):
    FBS_COV = "fbs-cov"
    ANGULAR = "angular"
    SIGMA = "sigma"
    V0_COV = "v0-cov"


@dataclass
class RunContext:
    """Global options merged with the --config file."""
    file: CliConfig
    config: AppConfig
    out_dir: Path
    fmt: ReportFormat
    seed: int

    def pick(self, flag: Any, key: str, default: Any = None) -> Any:
        """Flag value, else the config-file value, else the default."""
        if flag is not None:
            return flag
        value = getattr(self.file, key)
        return default if value is None else value


# Shared model options
FamilyOpt = typer.Option(None, "--family", help="isotropic, heat, separable, pair-difference or synthetic")
DOpt = typer.Option(None, "--d", help="Fractional order d (isotropic, heat)")
ThetaOpt = typer.Option(None, "--theta", help="Laziness theta in (0, 1) (heat)")
D1Opt = typer.Option(None, "--d1", help="First-coordinate order (separable)")
D2Opt = typer.Option(None, "--d2", help="Second-coordinate order (separable)")
Q1Opt = typer.Option(None, "--q1", help="Decay exponent q1 (synthetic, or classify directly)")
Q2Opt = typer.Option(None, "--q2", help="Decay exponent q2 (synthetic, or classify directly)")
R1Opt = typer.Option(None, "--R1", min=1, help="Truncation radius in t")
R2Opt = typer.Option(None, "--R2", min=1, help="Truncation radius in s (defaults to R1)")
LambdasOpt = typer.Option(None, "--lambdas", help="Comma-separated scales, e.g. 64,128,256,512")
PointOpt = typer.Option(None, "--point", help="Rectangle corner x,y")
RepsOpt = typer.Option(None, "--reps", min=2, help="Monte Carlo replicates")
ExactOpt = typer.Option(None, "--exact/--mc", help="Exact G-sum variances or Monte Carlo replicates")
InnovationOpt = typer.Option(None, "--innovation", help="Innovation distribution")


def _guarded(func):
    """Map library errors to exit codes with an error panel."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except LatticeScaleError as e:
            presenter.show_error(type(e).__name__, str(e))
            raise typer.Exit(code=int(e.exit_code))
        except ValidationError as e:
            presenter.show_error("Invalid parameters", str(e))
            raise typer.Exit(code=int(ExitCode.VALIDATION))
    return wrapper


def _floats(text: str, name: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ParameterValidationError(f"--{name} expects comma-separated numbers, got '{text}'")


def _point(text: str, name: str = "point") -> Point:
    values = _floats(text, name)
    if len(values) != 2:
        raise ParameterValidationError(f"--{name} expects two numbers x,y, got '{text}'")
    return values[0], values[1]


def _pair(text: str) -> Tuple[Point, Point]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ParameterValidationError(f"--pair expects x1,y1:x2,y2, got '{text}'")
    return _point(parts[0], "pair"), _point(parts[1], "pair")


def _run(ctx: typer.Context) -> RunContext:
    return ctx.obj


def _model_spec(run: RunContext, family: Optional[str], d: Optional[float], theta: Optional[float],
                d1: Optional[float], d2: Optional[float], q1: Optional[float], q2: Optional[float],
                R1: Optional[int], R2: Optional[int]) -> ModelSpec:
    """
    Model from flags; bare --q1/--q2 mean a synthetic model. Without model flags the
    config file's model is used.
    """
    if family is None and q1 is not None and q2 is not None:
        family = Family.SYNTHETIC.value
    if family is None:
        if run.file.model is None:
            raise ParameterValidationError("no model given: pass --family (or --q1/--q2) or a config file with 'model'")
        spec = run.file.model
        overrides = {k: v for k, v in {"R1": R1, "R2": R2}.items() if v is not None}
        return spec.model_copy(update=overrides) if overrides else spec

    values = {"family": family, "d": d, "theta": theta, "d1": d1, "d2": d2, "q1": q1, "q2": q2, "R1": R1, "R2": R2}
    return ModelSpec(**{k: v for k, v in values.items() if v is not None})


def _scan_config(run: RunContext, spec: ModelSpec, gammas: List[float], lambdas: Optional[str],
                 point: Optional[str], reps: Optional[int], exact: Optional[bool],
                 innovation: Optional[InnovationFamily]) -> ScanConfig:
    lambda_grid = _floats(lambdas, "lambdas") if lambdas else run.pick(None, "lambdas", [64.0, 128.0, 256.0, 512.0])
    return ScanConfig(
        model=spec,
        innovation=InnovationSpec(family=run.pick(innovation, "innovation", InnovationFamily.GAUSSIAN),
                                  base_seed=run.seed),
        gamma_grid=gammas,
        lambda_grid=lambda_grid,
        point=_point(point) if point else run.pick(None, "point", (1.0, 1.0)),
        reps=run.pick(reps, "reps", 200),
        use_exact_variance=run.pick(exact, "exact", True),
        threads=run.config.threads,
    )


def _emit(run: RunContext, result: Any, stem: str, params: Any) -> Path:
    path = emit_report(result, run.fmt, run.out_dir, stem, params, run.seed)
    presenter.show_files([path])
    return path


@app.callback()
def main(
    ctx: typer.Context,
    config_path: Optional[Path] = typer.Option(None, "--config", help="JSON parameter file; flags take precedence"),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, max=2**64 - 1, help="Base seed of the innovation streams"),
    threads: Optional[int] = typer.Option(None, "--threads", min=1, help="Worker threads for replicates"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory (LATTICESCALE_OUT wins)"),
    fmt: Optional[ReportFormat] = typer.Option(None, "--format", help="Report format"),
    verbose: bool = typer.Option(False, "--verbose", help="Enable debug logging"),
):
    """Scaling limits and scaling transition of negatively dependent linear random fields."""
    try:
        file = CliConfig()
        if config_path is not None:
            file = CliConfig.model_validate(json.loads(Path(config_path).read_text()))
    except (OSError, json.JSONDecodeError) as e:
        presenter.show_error("Cannot read config file", str(e))
        raise typer.Exit(code=int(ExitCode.VALIDATION))
    except ValidationError as e:
        presenter.show_error("Invalid config file", str(e))
        raise typer.Exit(code=int(ExitCode.VALIDATION))

    ConfigManager.set_overrides(
        threads=threads if threads is not None else file.threads,
        memory_budget_mb=file.memory_mb,
        classify_tol=file.classify_tol,
        quad_tol=file.quad_tol,
        series_tol=file.series_tol,
    )
    try:
        config = get_config()
    except LatticeScaleError as e:
        presenter.show_error(type(e).__name__, str(e))
        raise typer.Exit(code=int(e.exit_code))

    logging.basicConfig(
        level=logging.DEBUG if verbose else config.log_level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )

    out_dir = ConfigManager.output_override() or out or (Path(file.out) if file.out else config.output_dir)
    ctx.obj = RunContext(
        file=file,
        config=config,
        out_dir=out_dir,
        fmt=fmt or file.format or ReportFormat.JSON,
        seed=seed if seed is not None else (file.seed or 0),
    )


@app.command()
@_guarded
def classify(
    ctx: typer.Context,
    family: Optional[str] = FamilyOpt,
    d: Optional[float] = DOpt,
    theta: Optional[float] = ThetaOpt,
    q1: Optional[float] = Q1Opt,
    q2: Optional[float] = Q2Opt,
    zero_sum: bool = typer.Option(True, "--zero-sum/--nonzero-sum", help="Whether the coefficients sum to zero"),
):
    """Region, exponents, critical gamma and limits at gamma0/2, gamma0 and 2 gamma0."""
    run = _run(ctx)
    spec = _model_spec(run, family, d, theta, None, None, q1, q2, None, None)
    exps = exponents(*decay_exponents(spec))
    region = classify_exponents(exps, tol=run.config.classify_tol, zero_sum=zero_sum)
    if region.tag == RegionTag.BOUNDARY:
        raise BoundaryRegionError(f"parameters lie on a region boundary: {region.boundary_detail}")

    gamma0 = None if region.tag == RegionTag.SRD_LIKE else critical_gamma(exps, region)
    limits = []
    for gamma in ([gamma0 / 2.0, gamma0, 2.0 * gamma0] if gamma0 is not None else [1.0]):
        try:
            limits.append((gamma, limit_descriptor(exps, region, gamma)))
        except OpenCaseError as e:
            limits.append((gamma, str(e)))
    presenter.show_region(exps, region, gamma0, limits)

    payload = {
        "exponents": exps,
        "region": region,
        "gamma0": gamma0,
        "limits": [{"gamma": g, "descriptor": lim if not isinstance(lim, str) else None,
                    "open": lim if isinstance(lim, str) else None} for g, lim in limits],
    }
    typer.echo(canonical_json(payload))


@app.command()
@_guarded
def atlas(
    ctx: typer.Context,
    grid_n: Optional[int] = typer.Option(None, "--grid-n", min=1, help="Cells per axis (default 200)"),
    upper: float = typer.Option(1.0, "--upper", help="Largest 1/q sampled on each axis"),
):
    """Phase diagram of the (1/q1, 1/q2) plane as plot-ready CSV."""
    run = _run(ctx)
    n = run.pick(grid_n, "grid_n", 200)
    rows = phase_diagram(midpoint_grid(n, upper), tol=run.config.classify_tol)
    counts = Counter(row.region.value for row in rows)
    presenter.show_records("Regions", [{"region": tag, "cells": count} for tag, count in sorted(counts.items())])

    if run.fmt == ReportFormat.CSV:
        path = write_phase_csv(rows, run.out_dir / "atlas.csv")
        presenter.show_files([path])
    else:
        _emit(run, rows, "atlas", {"command": "atlas", "grid_n": n, "upper": upper})


@app.command()
@_guarded
def coeffs(
    ctx: typer.Context,
    family: Optional[str] = FamilyOpt,
    d: Optional[float] = DOpt,
    theta: Optional[float] = ThetaOpt,
    d1: Optional[float] = D1Opt,
    d2: Optional[float] = D2Opt,
    q1: Optional[float] = Q1Opt,
    q2: Optional[float] = Q2Opt,
    R1: Optional[int] = R1Opt,
    R2: Optional[int] = R2Opt,
):
    """Build a coefficient grid and write it with its JSON sidecar."""
    run = _run(ctx)
    spec = _model_spec(run, family, d, theta, d1, d2, q1, q2, R1, R2)
    grid = build_grid(spec)
    paths = write_grid(grid, run.out_dir / "coeffs.lscg")
    presenter.show_records("Coefficient grid", [grid_sidecar(grid) | {"sum_of_squares": grid.sum_of_squares()}])
    presenter.show_files(paths)


@app.command()
@_guarded
def simulate(
    ctx: typer.Context,
    family: Optional[str] = FamilyOpt,
    d: Optional[float] = DOpt,
    theta: Optional[float] = ThetaOpt,
    d1: Optional[float] = D1Opt,
    d2: Optional[float] = D2Opt,
    q1: Optional[float] = Q1Opt,
    q2: Optional[float] = Q2Opt,
    R1: Optional[int] = R1Opt,
    R2: Optional[int] = R2Opt,
    T1: Optional[int] = typer.Option(None, "--T1", min=1, help="Window length in t"),
    T2: Optional[int] = typer.Option(None, "--T2", min=1, help="Window length in s"),
    replicate: Optional[int] = typer.Option(None, "--replicate", min=0, help="Replicate index"),
    innovation: Optional[InnovationFamily] = InnovationOpt,
):
    """Simulate one field slab on [1, T1] x [1, T2]."""
    run = _run(ctx)
    spec = _model_spec(run, family, d, theta, d1, d2, q1, q2, R1, R2)
    T1, T2 = run.pick(T1, "T1", 64), run.pick(T2, "T2", 64)
    replicate = run.pick(replicate, "replicate", 0)
    innov = InnovationSpec(family=run.pick(innovation, "innovation", InnovationFamily.GAUSSIAN), base_seed=run.seed)

    slab = simulate_field(build_grid(spec), T1, T2, innov, replicate)
    run.out_dir.mkdir(parents=True, exist_ok=True)
    path = run.out_dir / "slab.lssb"
    path.write_bytes(slab.to_bytes())
    meta = {"model": spec, "innovation": innov, "replicate": replicate, "window": [T1, T2]}
    sidecar = path.with_suffix(".lssb.json")
    sidecar.write_text(canonical_json({**meta, "config_hash": config_hash(meta), "version": __version__}))
    presenter.show_files([path, sidecar])


@app.command("scan-variance")
@_guarded
def scan_variance(
    ctx: typer.Context,
    family: Optional[str] = FamilyOpt,
    d: Optional[float] = DOpt,
    theta: Optional[float] = ThetaOpt,
    d1: Optional[float] = D1Opt,
    d2: Optional[float] = D2Opt,
    q1: Optional[float] = Q1Opt,
    q2: Optional[float] = Q2Opt,
    R1: Optional[int] = R1Opt,
    R2: Optional[int] = R2Opt,
    gamma: Optional[float] = typer.Option(None, "--gamma", help="Aspect-ratio exponent"),
    lambdas: Optional[str] = LambdasOpt,
    point: Optional[str] = PointOpt,
    reps: Optional[int] = RepsOpt,
    exact: Optional[bool] = ExactOpt,
    innovation: Optional[InnovationFamily] = InnovationOpt,
):
    """Slope of 1/2 log Var(S) against log lambda at one gamma."""
    run = _run(ctx)
    spec = _model_spec(run, family, d, theta, d1, d2, q1, q2, R1, R2)
    gamma = gamma if gamma is not None else (run.file.gammas or [1.0])[0]
    cfg = _scan_config(run, spec, [gamma], lambdas, point, reps, exact, innovation)
    fit = ScalingExperiment(cfg, run.config).variance_scan(gamma)
    presenter.show_slope_fit(fit)
    _emit(run, fit, "scan_variance", cfg)


@app.command("scan-transition")
@_guarded
def scan_transition(
    ctx: typer.Context,
    family: Optional[str] = FamilyOpt,
    d: Optional[float] = DOpt,
    theta: Optional[float] = ThetaOpt,
    d1: Optional[float] = D1Opt,
    d2: Optional[float] = D2Opt,
    q1: Optional[float] = Q1Opt,
    q2: Optional[float] = Q2Opt,
    R1: Optional[int] = R1Opt,
    R2: Optional[int] = R2Opt,
    gammas: Optional[str] = typer.Option(None, "--gammas", help="Comma-separated gamma grid"),
    lambdas: Optional[str] = LambdasOpt,
    point: Optional[str] = PointOpt,
    reps: Optional[int] = RepsOpt,
    exact: Optional[bool] = ExactOpt,
    innovation: Optional[InnovationFamily] = InnovationOpt,
):
    """H_hat(gamma) over a gamma grid with theory overlay and kink estimate."""
    run = _run(ctx)
    spec = _model_spec(run, family, d, theta, d1, d2, q1, q2, R1, R2)
    gamma_grid = _floats(gammas, "gammas") if gammas else run.pick(None, "gammas", [0.5, 0.75, 1.0, 1.25, 1.5, 2.0])
    cfg = _scan_config(run, spec, gamma_grid, lambdas, point, reps, exact, innovation)
    report = ScalingExperiment(cfg, run.config).transition_scan()
    presenter.show_transition(report)
    _emit(run, report, "scan_transition", cfg)


@app.command("edge-sigma")
@_guarded
def edge_sigma(
    ctx: typer.Context,
    family: Optional[str] = FamilyOpt,
    d: Optional[float] = DOpt,
    theta: Optional[float] = ThetaOpt,
    d1: Optional[float] = D1Opt,
    d2: Optional[float] = D2Opt,
    q1: Optional[float] = Q1Opt,
    q2: Optional[float] = Q2Opt,
    R1: Optional[int] = R1Opt,
    R2: Optional[int] = R2Opt,
    delta: Optional[float] = typer.Option(None, "--delta", help="Boundary band width as a fraction of lambda"),
    lam: Optional[float] = typer.Option(None, "--lambda",
                                        help="Scale of the boundary check; defaults to the largest config lambda"),
    point: Optional[str] = PointOpt,
):
    """
    Edge variances sigma^2_edge,1 and sigma^2_edge,2 of a coefficient grid; with --delta also the
    boundary-sum identity residual at gamma = 1.
    """
    run = _run(ctx)
    spec = _model_spec(run, family, d, theta, d1, d2, q1, q2, R1, R2)
    grid = build_grid(spec)
    sigmas = edge_sigmas(grid)
    presenter.show_edge_sigmas(sigmas)
    _emit(run, sigmas, "edge_sigma", {"command": "edge-sigma", "model": spec})

    delta = run.pick(delta, "delta")
    if delta is not None:
        x, y = _point(point) if point else run.pick(None, "point", (1.0, 1.0))
        lam = lam if lam is not None else max(run.pick(None, "lambdas", [256.0]))
        residual = boundary_sum_identity_check(grid, x, y, lam, delta, sigmas)
        check = BoundaryCheck(x=x, y=y, lam=lam, delta=delta, residual=residual)
        presenter.show_records("Boundary identity", [check.model_dump()])
        _emit(run, check, "boundary_sum", {"command": "edge-sigma", "model": spec, "delta": delta, "lam": lam,
                                           "point": (x, y)})


@app.command("cov-check")
@_guarded
def cov_check(
    ctx: typer.Context,
    family: Optional[str] = FamilyOpt,
    d: Optional[float] = DOpt,
    theta: Optional[float] = ThetaOpt,
    d1: Optional[float] = D1Opt,
    d2: Optional[float] = D2Opt,
    q1: Optional[float] = Q1Opt,
    q2: Optional[float] = Q2Opt,
    R1: Optional[int] = R1Opt,
    R2: Optional[int] = R2Opt,
    gamma: Optional[float] = typer.Option(None, "--gamma", help="Aspect-ratio exponent"),
    pairs: Optional[List[str]] = typer.Option(None, "--pair", help="Point pair x1,y1:x2,y2 (repeatable)"),
    lam: Optional[float] = typer.Option(None, "--lambda", help="Scale (default: largest of --lambdas)"),
    lambdas: Optional[str] = LambdasOpt,
    reps: Optional[int] = RepsOpt,
    innovation: Optional[InnovationFamily] = InnovationOpt,
):
    """Empirical covariances of normalized sums against exact and limit covariances."""
    run = _run(ctx)
    spec = _model_spec(run, family, d, theta, d1, d2, q1, q2, R1, R2)
    gamma = gamma if gamma is not None else (run.file.gammas or [1.0])[0]
    point_pairs = [_pair(p) for p in pairs] if pairs else [tuple(p) for p in (run.file.pairs or [])]
    if not point_pairs:
        raise ParameterValidationError("cov-check needs at least one --pair")
    cfg = _scan_config(run, spec, [gamma], lambdas, None, reps, False, innovation)
    report = ScalingExperiment(cfg, run.config).covariance_check(gamma, point_pairs, lam)
    presenter.show_covariance(report)
    _emit(run, report, "cov_check", {"scan": cfg, "pairs": point_pairs, "lam": report.lam})


@app.command()
@_guarded
def limit(
    ctx: typer.Context,
    quantity: LimitQuantity = typer.Argument(..., help="fbs-cov, angular, sigma or v0-cov"),
    family: Optional[str] = FamilyOpt,
    d: Optional[float] = DOpt,
    theta: Optional[float] = ThetaOpt,
    q1: Optional[float] = Q1Opt,
    q2: Optional[float] = Q2Opt,
    hurst: Optional[str] = typer.Option(None, "--hurst", help="FBS Hurst pair hx,hy (fbs-cov)"),
    point: Optional[str] = PointOpt,
    point2: Optional[str] = typer.Option(None, "--point2", help="Second point x,y (defaults to --point)"),
):
    """Limit quantities: FBS covariance, angular integrals, kernel norms, V0 covariance."""
    run = _run(ctx)
    p1 = _point(point) if point else run.pick(None, "point", (1.0, 1.0))
    p2 = _point(point2, "point2") if point2 else p1
    tol = run.config.quad_tol
    params: Dict[str, Any] = {"command": "limit", "quantity": quantity.value, "point": p1, "point2": p2}

    if quantity == LimitQuantity.FBS_COV:
        hx, hy = _point(hurst, "hurst") if hurst else run.pick(None, "hurst", None) or (0.5, 0.5)
        params["hurst"] = (hx, hy)
        values = [("fbs_covariance", fbs_covariance(FbsParams(H_x=hx, H_y=hy), p1, p2), 0.0)]
    else:
        spec = _model_spec(run, family, d, theta, None, None, q1, q2, None, None)
        q1, q2 = decay_exponents(spec)
        angular = angular_for(spec)
        params["model"] = spec
        if quantity == LimitQuantity.ANGULAR:
            names = ("L1_plus", "L1_minus", "L2_plus", "L2_minus")
            values = [(name, v, tol) for name, v in zip(names, angular_integrals(q1, q2, angular, tol))]
        elif quantity == LimitQuantity.SIGMA:
            norms = sigma_norms(q1, q2, angular, tilde=True, tol=tol)
            values = [(name, getattr(norms, name), norms.abs_error)
                      for name in ("sigma1", "sigma2", "sigma1_tilde", "sigma2_tilde") if getattr(norms, name) is not None]
            if not values:
                raise ParameterValidationError(f"no kernel norm is finite for (q1, q2) = ({q1}, {q2})")
        else:
            cov, bound = v0_covariance(q1, q2, angular, p1, p2)
            values = [("v0_covariance", cov, bound)]

    digest = config_hash(params)
    records = [LimitValue(quantity=name, value=v, abs_error_bound=err, config_hash=digest) for name, v, err in values]
    for record in records:
        presenter.show_value(record)
    _emit(run, records, f"limit_{quantity.value.replace('-', '_')}", params)


@app.command()
def version():
    """Show version information."""
    console.print(f"[bright_blue]latticescale v{__version__}[/bright_blue]")
