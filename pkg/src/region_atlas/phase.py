"""Phase diagram over the (1/q1, 1/q2) plane."""

import csv
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from src.core.schemas import PhaseRow
from src.region_atlas.exponents import exponents
from src.region_atlas.regions import classify_exponents

PHASE_COLUMNS = ["inv_q1", "inv_q2", "region", "Q", "Q_edge1", "Q_edge2", "Q_tilde1", "Q_tilde2"]


def midpoint_grid(n: int, upper: float = 1.0) -> List[Tuple[float, float]]:
    """Cell midpoints ((i + 1/2) upper / n, (j + 1/2) upper / n) of an n x n grid."""
    centers = (np.arange(n) + 0.5) * upper / n
    return [(float(a), float(b)) for a in centers for b in centers]


def phase_diagram(points: Iterable[Tuple[float, float]], tol: float = 1e-9) -> List[PhaseRow]:
    """Classify every (1/q1, 1/q2) sample point."""
    rows = []
    for inv_q1, inv_q2 in points:
        exps = exponents(1.0 / inv_q1, 1.0 / inv_q2)
        region = classify_exponents(exps, tol=tol)
        rows.append(PhaseRow(
            inv_q1=inv_q1,
            inv_q2=inv_q2,
            region=region.tag,
            Q=exps.Q,
            Q_edge1=exps.Q_edge1,
            Q_edge2=exps.Q_edge2,
            Q_tilde1=exps.Q_tilde1,
            Q_tilde2=exps.Q_tilde2,
        ))
    return rows


def write_phase_csv(rows: Sequence[PhaseRow], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(PHASE_COLUMNS)
        for row in rows:
            record = row.model_dump()
            writer.writerow([
                record[name].value if name == "region" else format(record[name], ".17g")
                for name in PHASE_COLUMNS
            ])
    return path
