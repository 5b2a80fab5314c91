"""
Result Presenter - Rich console output for the command line.

Tables for regions, fits and covariance checks, plus error and warning panels.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from src.core.schemas import (
    CovarianceReport,
    EdgeSigmas,
    LimitDescriptor,
    LimitValue,
    ModelExponents,
    RegionId,
    SlopeFit,
    TransitionReport,
)


class Colors:
    """Centralized color scheme for consistent visual identity."""

    PRIMARY = "bright_blue"
    SUCCESS = "bright_green"
    WARNING = "bright_yellow"
    ERROR = "bright_red"
    INFO = "cyan"
    ACCENT = "magenta"
    MUTED = "dim white"

    BORDER = "bright_blue"
    TITLE = "bold bright_blue"


def _fmt(value: Optional[float], digits: int = 6) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}g}"


class ResultPresenter:
    """
    Rich console output management for latticescale commands.
    """

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console()
        self.colors = Colors()

    def _table(self, title: str, columns: Sequence[str]) -> Table:
        table = Table(title=title, border_style=self.colors.BORDER, title_style=self.colors.TITLE)
        for index, name in enumerate(columns):
            style = self.colors.INFO if index == 0 else None
            table.add_column(name, style=style, justify="left" if index == 0 else "right")
        return table

    def show_region(self, exps: ModelExponents, region: RegionId, gamma0: Optional[float],
                    descriptors: List[Tuple[float, Union[LimitDescriptor, str]]]) -> None:
        """Region, derived exponents and the limit at representative gamma values."""
        header = Text()
        header.append(f"Region {region.tag.value}", style=f"bold {self.colors.PRIMARY}")
        if region.boundary_detail:
            header.append(f"\n{region.boundary_detail}", style=self.colors.WARNING)
        header.append(f"\ngamma0 = {_fmt(gamma0, 12)}", style=self.colors.INFO)
        self.console.print(Panel(header, border_style=self.colors.BORDER, padding=(0, 1)))

        table = self._table("Exponents", ["name", "value"])
        for name, value in exps.model_dump().items():
            table.add_row(name, _fmt(value, 12))
        self.console.print(table)

        if descriptors:
            limits = self._table("Scaling limits", ["gamma", "branch", "hurst pair", "scale"])
            for gamma, descriptor in descriptors:
                if isinstance(descriptor, str):
                    limits.add_row(_fmt(gamma), f"[{self.colors.WARNING}]open[/{self.colors.WARNING}]", "-", descriptor)
                    continue
                hurst = "-" if descriptor.hurst_pair is None else f"({_fmt(descriptor.hurst_pair[0])}, {_fmt(descriptor.hurst_pair[1])})"
                scale = " + ".join(c.scale_symbol.value for c in descriptor.components) or descriptor.scale_symbol.value
                limits.add_row(_fmt(gamma), descriptor.branch.value, hurst, scale)
            self.console.print(limits)

    def show_records(self, title: str, rows: Sequence[Dict[str, Any]], limit: int = 20) -> None:
        """Generic table of flat records; long tables are cut after `limit` rows."""
        if not rows:
            self.show_warning(f"{title}: nothing to show")
            return
        columns = list(rows[0].keys())
        table = self._table(title, columns)
        for row in rows[:limit]:
            table.add_row(*[_fmt(v) if isinstance(v, float) else str(v) for v in (row.get(c) for c in columns)])
        if len(rows) > limit:
            table.add_section()
            table.add_row(f"... {len(rows) - limit} more rows", *[""] * (len(columns) - 1))
        self.console.print(table)

    def show_slope_fit(self, fit: SlopeFit) -> None:
        table = self._table(f"Variance growth at gamma = {_fmt(fit.gamma)}", ["lambda", "n1", "n2", "Var", "stderr"])
        for e in fit.estimates:
            table.add_row(_fmt(e.lam), str(e.n1), str(e.n2), _fmt(e.var, 10), _fmt(e.stderr, 3))
        self.console.print(table)

        text = Text()
        text.append(f"H_hat = {fit.H_hat:.6f} +/- {fit.stderr:.2g}", style=f"bold {self.colors.PRIMARY}")
        text.append(f"   R^2 = {fit.r_squared:.6f}", style=self.colors.MUTED)
        if fit.H_theory is not None:
            text.append(f"\nH_theory = {fit.H_theory:.6f}", style=self.colors.INFO)
        self.console.print(text)

    def show_transition(self, report: TransitionReport) -> None:
        table = self._table("Scaling transition", ["gamma", "H_hat", "stderr", "H_theory", "|diff|", ""])
        for p in report.points:
            flag = f"[{self.colors.ERROR}]flagged[/{self.colors.ERROR}]" if p.flagged else ""
            table.add_row(_fmt(p.gamma), _fmt(p.H_hat), _fmt(p.stderr, 2), _fmt(p.H_theory), _fmt(p.abs_diff, 2), flag)
        self.console.print(table)

        kink = _fmt(report.detected_kink)
        claim = "claimed" if report.kink_claimed else "not claimed"
        self.console.print(f"[{self.colors.INFO}]kink estimate {kink} ({claim}), gamma0 = {_fmt(report.gamma0_theory)}[/{self.colors.INFO}]")

    def show_covariance(self, report: CovarianceReport) -> None:
        title = f"Covariance check at gamma = {_fmt(report.gamma)}, lambda = {_fmt(report.lam)}, H = {_fmt(report.H)}"
        table = self._table(title, ["pair", "empirical", "stderr", "exact", "theory", "result"])
        for pair in report.pairs:
            if pair.passed is None:
                result = "-"
            elif pair.passed:
                result = f"[{self.colors.SUCCESS}]pass[/{self.colors.SUCCESS}]"
            else:
                result = f"[{self.colors.ERROR}]fail[/{self.colors.ERROR}]"
            table.add_row(f"{pair.point1} / {pair.point2}", _fmt(pair.empirical), _fmt(pair.stderr, 2),
                          _fmt(pair.exact), _fmt(pair.theory), result)
        self.console.print(table)

    def show_edge_sigmas(self, sigmas: EdgeSigmas) -> None:
        table = self._table("Edge variances", ["quantity", "value"])
        table.add_row("sigma2_edge1", _fmt(sigmas.sigma2_edge1, 12))
        table.add_row("sigma2_edge2", _fmt(sigmas.sigma2_edge2, 12))
        table.add_row("truncation bound", _fmt(sigmas.truncation_bound, 3))
        self.console.print(table)
        for index, ok in ((1, sigmas.converges1), (2, sigmas.converges2)):
            if not ok:
                self.show_warning(f"sigma_edge,{index} series does not converge on the full lattice")

    def show_value(self, value: LimitValue) -> None:
        self.console.print(f"[{self.colors.PRIMARY}]{value.quantity}[/{self.colors.PRIMARY}] = "
                           f"{value.value:.12g}  [{self.colors.MUTED}](abs error <= {value.abs_error_bound:.3g})[/{self.colors.MUTED}]")

    def show_files(self, paths: Sequence[Path]) -> None:
        for path in paths:
            self.console.print(f"[{self.colors.MUTED}]wrote {path}[/{self.colors.MUTED}]")

    def show_error(self, message: str, details: Optional[str] = None) -> None:
        """Display error message with optional details."""
        error_text = Text()
        error_text.append("ERROR: ", style=f"bold {self.colors.ERROR}")
        error_text.append(message, style=self.colors.ERROR)
        if details:
            error_text.append(f"\nDetails: {details}", style=self.colors.MUTED)
        self.console.print(Panel(error_text, title="Error", title_align="center",
                                 border_style=self.colors.ERROR, padding=(1, 2)))

    def show_warning(self, message: str, details: Optional[str] = None) -> None:
        warning_text = Text()
        warning_text.append("WARNING: ", style=f"bold {self.colors.WARNING}")
        warning_text.append(message, style=self.colors.WARNING)
        if details:
            warning_text.append(f"\nDetails: {details}", style=self.colors.MUTED)
        self.console.print(Panel(warning_text, title="Warning", title_align="center",
                                 border_style=self.colors.WARNING, padding=(1, 2)))
