"""Deterministic CSV and JSON reports with config hash, seed and code version embedded."""

import csv
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel

from src import __version__
from src.core.schemas import CovarianceReport, ReportFormat, SlopeFit, TransitionReport
from src.utils.json_utils import canonical_json, config_hash, format_float, to_jsonable

logger = logging.getLogger(__name__)

Result = Union[BaseModel, Sequence[BaseModel]]


def report_metadata(config: Any, seed: Optional[int]) -> Dict[str, Any]:
    return {"config_hash": config_hash(config), "seed": seed, "version": __version__}


def _flatten(record: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        elif isinstance(value, list) and all(not isinstance(v, (dict, list)) for v in value):
            for index, item in enumerate(value):
                flat[f"{name}.{index}"] = item
        elif not isinstance(value, list):
            flat[name] = value
    return flat


def report_rows(result: Result) -> List[Dict[str, Any]]:
    """
    One CSV row per estimate, scan point or point pair; summary fields repeat on every row.
    Other records become one flattened row each.
    """
    if isinstance(result, SlopeFit):
        summary = {"H_hat": result.H_hat, "fit_stderr": result.stderr, "r_squared": result.r_squared,
                   "H_theory": result.H_theory}
        return [{**to_jsonable(e), **summary} for e in result.estimates]

    if isinstance(result, TransitionReport):
        summary = {"detected_kink": result.detected_kink, "kink_claimed": result.kink_claimed,
                   "gamma0_theory": result.gamma0_theory}
        return [{**to_jsonable(p), **summary} for p in result.points]

    if isinstance(result, CovarianceReport):
        summary = {"gamma": result.gamma, "lam": result.lam, "reps": result.reps, "H": result.H,
                   "scale_symbol": result.descriptor.scale_symbol.value}
        rows = []
        for pair in result.pairs:
            record = to_jsonable(pair)
            (x1, y1), (x2, y2) = record.pop("point1"), record.pop("point2")
            rows.append({"x1": x1, "y1": y1, "x2": x2, "y2": y2, **record, **summary})
        return rows

    records = result if isinstance(result, (list, tuple)) else [result]
    return [_flatten(to_jsonable(r)) for r in records]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_csv(rows: Sequence[Dict[str, Any]], path: Path) -> Path:
    columns: List[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)

    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(name)) for name in columns])
    return path


def emit_report(result: Result, fmt: ReportFormat, out_dir: Path, stem: str, config: Any,
                seed: Optional[int] = None) -> Path:
    """
    Write `result` as <out_dir>/<stem>.<fmt>.

    JSON holds {"meta": ..., "result": ...} in canonical form; CSV repeats the metadata
    columns on every row. Floats keep 17 significant digits either way.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = report_metadata(config, seed)
    fmt = ReportFormat(fmt)
    path = out_dir / f"{stem}.{fmt.value}"

    if fmt == ReportFormat.JSON:
        path.write_text(canonical_json({"meta": meta, "result": result}))
    else:
        write_csv([{**row, **meta} for row in report_rows(result)], path)

    logger.info(f"wrote {fmt.value} report {path}")
    return path
