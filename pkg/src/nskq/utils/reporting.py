"""CSV writers for run artifacts.

Floats are written with 17 significant digits (``%.17g``) so values
round-trip exactly; missing values are empty cells and booleans are
``true``/``false``. Column order is fixed by the ``*_COLUMNS`` constants.
"""

import csv
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path

from nskq.core.analyticity import BootstrapReport, RadiusEstimate
from nskq.core.norms import NormReport

logger = logging.getLogger(__name__)

NORMS_COLUMNS = ("t", "pm_a_low", "pm_a_high", "pm_u", "x_norm", "y_norm")
RADIUS_COLUMNS = ("t", "sigma_hat", "residual", "ratio", "H_holds")
BOOTSTRAP_COLUMNS = (
    "T",
    "lambda_T",
    "weighted_norm",
    "threshold",
    "H_holds",
    "saturated",
    "outside_window",
    "radius",
    "residual",
    "ratio",
    "estimate_lhs",
    "estimate_rhs",
    "estimate_holds",
)

Cell = float | int | bool | str | None


def format_cell(value: Cell) -> str:
    """Render one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return "%.17g" % value
    return value


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence[Cell]]) -> Path:
    """Write a header and rows with fixed column order.

    Raises:
        ValueError: If a row has the wrong number of cells

    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"Row has {len(row)} cells, expected {len(columns)} for {path.name}.")
            writer.writerow([format_cell(cell) for cell in row])
            count += 1
    logger.debug(f"Wrote {count} rows to {path}")
    return path


def write_norms_csv(path: str | Path, report: NormReport) -> Path:
    """``norms.csv``: PM values per node and running X/Y norms."""
    return write_csv(path, NORMS_COLUMNS, report.rows())


def write_radius_csv(path: str | Path, estimates: Sequence[RadiusEstimate]) -> Path:
    """``radius.csv`` for a radius series (ratio and H columns empty)."""
    rows = [
        (e.t, e.sigma_hat if e.defined else None, e.residual, None, None) for e in estimates
    ]
    return write_csv(path, RADIUS_COLUMNS, rows)


def write_bootstrap_radius_csv(path: str | Path, report: BootstrapReport) -> Path:
    """``radius.csv`` of a bootstrap run: one row per horizon."""
    rows = [(r.T, r.radius, r.residual, r.ratio, r.H_holds) for r in report.rows]
    return write_csv(path, RADIUS_COLUMNS, rows)


def write_bootstrap_csv(path: str | Path, report: BootstrapReport) -> Path:
    """``bootstrap.csv``: every bootstrap quantity per horizon."""
    rows = [tuple(getattr(r, column) for column in BOOTSTRAP_COLUMNS) for r in report.rows]
    return write_csv(path, BOOTSTRAP_COLUMNS, rows)
