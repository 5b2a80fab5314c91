"""Variance-growth slope fits, scaling-transition scans and covariance checks."""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from src.coeff_families.families import build_grid, spectral_density_for
from src.coeff_families.grid import CoefficientGrid
from src.core.config import AppConfig, get_config
from src.core.exceptions import DegenerateFitError, ModelOutOfScopeError, ParameterValidationError
from src.core.schemas import (
    CovariancePair,
    CovarianceReport,
    Point,
    ScanConfig,
    SlopeFit,
    TransitionPoint,
    TransitionReport,
    VarianceEstimate,
)
from src.experiments.theory import TheoryOverlay, theory_for_model
from src.lattice_sim.partial_sums import rectangle_counts
from src.lattice_sim.spectral import spectral_rectangle_variance
from src.lattice_sim.variance import exact_covariance, exact_variance, replicate_sums, replicate_variance

logger = logging.getLogger(__name__)

CURVATURE_THRESHOLD = 0.02
FLAG_FLOOR = 1e-6
MIN_COVARIANCE_REPS = 100
MIN_SIDE_POINTS = 3


def fit_slope(estimates: Sequence[VarianceEstimate], gamma: float,
              curvature_threshold: float = CURVATURE_THRESHOLD) -> SlopeFit:
    """
    Least-squares slope of (log lambda, 1/2 log Var).

    With more than three scales and a quadratic coefficient above `curvature_threshold`,
    the fit is repeated on the three largest lambda values.

    Raises:
        DegenerateFitError: If fewer than three distinct lambdas carry a positive variance
    """
    usable = sorted((e for e in estimates if e.var > 0 and math.isfinite(e.var)), key=lambda e: e.lam)
    if len({e.lam for e in usable}) < 3:
        raise DegenerateFitError(
            f"slope fit needs at least 3 distinct lambdas with positive variance, got {len(usable)} usable estimates"
        )

    x = np.log([e.lam for e in usable])
    y = 0.5 * np.log([e.var for e in usable])
    lambdas = [e.lam for e in usable]

    if len(usable) > 3:
        curvature = float(np.polyfit(x, y, 2)[0])
        if abs(curvature) > curvature_threshold:
            logger.warning(
                f"slope fit at gamma={gamma}: curvature {curvature:.3g} exceeds {curvature_threshold}, "
                f"refitting on the largest three lambdas"
            )
            x, y, lambdas = x[-3:], y[-3:], lambdas[-3:]

    fit = linregress(x, y)
    residuals = y - (fit.intercept + fit.slope * x)
    return SlopeFit(
        gamma=gamma,
        H_hat=float(fit.slope),
        stderr=float(fit.stderr),
        r_squared=float(fit.rvalue) ** 2,
        residuals=[float(r) for r in residuals],
        lambdas_used=[float(lam) for lam in lambdas],
        estimates=list(estimates),
    )


def detect_kink(gammas: Sequence[float], values: Sequence[float]) -> Optional[float]:
    """
    Breakpoint of the best continuous two-segment linear fit, scanned over grid midpoints.

    Returns None when fewer than four points are given.
    """
    g = np.asarray(gammas, dtype=np.float64)
    h = np.asarray(values, dtype=np.float64)
    if g.size < 4:
        return None

    best, best_sse = None, math.inf
    for b in 0.5 * (g[1:] + g[:-1]):
        design = np.column_stack([np.ones_like(g), g, np.maximum(g - b, 0.0)])
        coef, *_ = np.linalg.lstsq(design, h, rcond=None)
        sse = float(np.sum((h - design @ coef) ** 2))
        if sse < best_sse - 1e-15:
            best, best_sse = float(b), sse
    return best


def _empirical_covariance(a: np.ndarray, b: np.ndarray) -> Tuple[float, float]:
    """Unbiased covariance and the standard error of the mean of centered products."""
    n = a.size
    products = (a - a.mean()) * (b - b.mean())
    cov = math.fsum(products) / (n - 1)
    stderr = float(np.std(products, ddof=1)) / math.sqrt(n)
    return cov, stderr


class ScalingExperiment:
    """
    Runs the Monte Carlo and exact-variance checks of one ScanConfig.

    The coefficient grid is built once on first use and shared by every scan. Exact variances
    of families with a closed-form spectral density come from that density, so they belong to
    the untruncated field; the others are G-sums over the truncated grid.
    """

    def __init__(self, cfg: ScanConfig, app_config: Optional[AppConfig] = None):
        self.cfg = cfg
        self.config = app_config or get_config()
        self.theory: TheoryOverlay = theory_for_model(cfg.model, tol=self.config.classify_tol)
        self.density = spectral_density_for(cfg.model)
        self._grid: Optional[CoefficientGrid] = None

    @property
    def grid(self) -> CoefficientGrid:
        if self._grid is None:
            self._grid = build_grid(self.cfg.model)
            logger.info(f"built {self._grid.family.value} grid with radii {self._grid.truncation_radii}")
        return self._grid

    def variances(self, gamma: float) -> List[VarianceEstimate]:
        """Per-lambda variance of S at cfg.point, exact or from replicates."""
        cfg = self.cfg
        if not cfg.use_exact_variance:
            return replicate_variance(self.grid, cfg.innovation, gamma, cfg.lambda_grid, cfg.point,
                                      cfg.reps, workers=cfg.threads)

        budget = self.config.memory_budget_bytes
        if self.density is not None:
            logger.info(f"exact variances of the {cfg.model.family.value} model from its spectral density")
        estimates = []
        for lam in cfg.lambda_grid:
            n1, n2 = rectangle_counts(lam, gamma, *cfg.point)
            if self.density is not None:
                var = spectral_rectangle_variance(self.density, gamma, lam, cfg.point, memory_budget=budget)
            else:
                var = exact_variance(self.grid, gamma, lam, cfg.point, memory_budget=budget)
            estimates.append(VarianceEstimate(lam=lam, gamma=gamma, x=cfg.point[0], y=cfg.point[1],
                                              n1=n1, n2=n2, var=var))
        return estimates

    def variance_scan(self, gamma: float) -> SlopeFit:
        fit = fit_slope(self.variances(gamma), gamma)
        H_theory = self.theory.hurst_or_none(gamma)
        logger.info(f"gamma={gamma}: H_hat={fit.H_hat:.6f} +/- {fit.stderr:.2g}, theory {H_theory}")
        return fit.model_copy(update={"H_theory": H_theory})

    def transition_scan(self) -> TransitionReport:
        """
        H_hat over the gamma grid with the theory overlay and a kink estimate.

        The kink is only claimed when the grid has at least three points on each side of gamma0.
        """
        points = []
        for gamma in self.cfg.gamma_grid:
            fit = self.variance_scan(gamma)
            abs_diff = None if fit.H_theory is None else abs(fit.H_hat - fit.H_theory)
            flagged = abs_diff is not None and abs_diff > max(3.0 * fit.stderr, FLAG_FLOOR)
            if flagged:
                logger.warning(f"gamma={gamma}: H_hat={fit.H_hat:.6f} disagrees with theory {fit.H_theory:.6f}")
            points.append(TransitionPoint(gamma=gamma, H_hat=fit.H_hat, stderr=fit.stderr,
                                          H_theory=fit.H_theory, abs_diff=abs_diff, flagged=flagged))

        gammas = [p.gamma for p in points]
        kink = detect_kink(gammas, [p.H_hat for p in points])
        gamma0 = self.theory.gamma0
        claimed = False
        if gamma0 is not None and kink is not None:
            below = sum(g < gamma0 for g in gammas)
            above = sum(g > gamma0 for g in gammas)
            claimed = below >= MIN_SIDE_POINTS and above >= MIN_SIDE_POINTS
            if not claimed:
                logger.info(f"gamma grid does not bracket gamma0={gamma0:.6g} with {MIN_SIDE_POINTS} points a side")

        return TransitionReport(points=points, detected_kink=kink, kink_claimed=claimed, gamma0_theory=gamma0)

    def covariance_check(self, gamma: float, pairs: Sequence[Tuple[Point, Point]],
                         lam: Optional[float] = None) -> CovarianceReport:
        """
        Empirical covariance of lambda^{-H(gamma)} S across replicates against the exact
        finite-lambda covariance and the limit covariance; a pair passes within 4 standard errors.

        Raises:
            OpenCaseError: At the transition point of R23/R32
            ParameterValidationError: If reps < 100 or no pairs are given
        """
        cfg = self.cfg
        if cfg.reps < MIN_COVARIANCE_REPS:
            raise ParameterValidationError(f"covariance checks need reps >= {MIN_COVARIANCE_REPS}, got {cfg.reps}")
        if not pairs:
            raise ParameterValidationError("covariance_check needs at least one point pair")

        descriptor = self.theory.descriptor(gamma)
        H = self.theory.hurst(gamma)
        lam = lam or max(cfg.lambda_grid)

        points: List[Point] = []
        for p1, p2 in pairs:
            for p in (tuple(p1), tuple(p2)):
                if p not in points:
                    points.append(p)
        rectangles = [rectangle_counts(lam, gamma, *p) for p in points]
        sums = replicate_sums(self.grid, cfg.innovation, rectangles, cfg.reps, workers=cfg.threads)
        scale = lam ** (-H)
        normalized = sums * scale

        results = []
        budget = self.config.memory_budget_bytes
        for p1, p2 in pairs:
            i, j = points.index(tuple(p1)), points.index(tuple(p2))
            empirical, stderr = _empirical_covariance(normalized[:, i], normalized[:, j])
            exact = exact_covariance(self.grid, gamma, lam, p1, p2, memory_budget=budget) * scale * scale
            try:
                theory = self.theory.covariance(gamma, p1, p2, self.grid)
            except ModelOutOfScopeError as e:
                logger.info(f"no limit covariance for {p1}, {p2}: {e}")
                theory = None
            passed = None if theory is None else abs(empirical - theory) <= 4.0 * stderr
            results.append(CovariancePair(point1=p1, point2=p2, empirical=empirical, stderr=stderr,
                                          exact=exact, theory=theory, passed=passed))

        return CovarianceReport(gamma=gamma, lam=lam, reps=cfg.reps, H=H, descriptor=descriptor, pairs=results)


def variance_scan(cfg: ScanConfig, gamma: float) -> SlopeFit:
    return ScalingExperiment(cfg).variance_scan(gamma)


def transition_scan(cfg: ScanConfig) -> TransitionReport:
    return ScalingExperiment(cfg).transition_scan()


def covariance_check(cfg: ScanConfig, gamma: float, pairs: Sequence[Tuple[Point, Point]],
                     lam: Optional[float] = None) -> CovarianceReport:
    return ScalingExperiment(cfg).covariance_check(gamma, pairs, lam)
