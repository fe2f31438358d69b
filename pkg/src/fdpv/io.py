"""CSV ingestion and JSON output helpers."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import DomainError, ParseError, Segmentation, TimeSeries

__all__ = ["ingest_csv", "segmentation_schema", "write_costs_csv"]

SCHEMA_PATH = Path(__file__).parent / "data" / "segmentation.schema.json"


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def ingest_csv(path, mode: str = "univariate") -> TimeSeries:
    """Read a one-column (value) or two-column (x,y) CSV file.

    A first line whose fields are not all numeric is treated as a header and
    skipped; any later non-numeric row raises ``ParseError`` with its 1-based
    line number. Blank lines are ignored. In regression mode the x column
    must be equidistant.
    """
    if mode not in ("univariate", "regression"):
        raise DomainError(f"unknown mode {mode!r}")
    ncol = 1 if mode == "univariate" else 2
    rows = []
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if not all(_is_number(f) for f in fields):
                if lineno == 1:
                    continue
                raise ParseError(f"line {lineno}: non-numeric value in {line!r}", line=lineno)
            if len(fields) != ncol:
                raise ParseError(f"line {lineno}: expected {ncol} column(s), got {len(fields)}", line=lineno)
            rows.append([float(f) for f in fields])
    if not rows:
        raise ParseError("no data rows", line=None)
    data = np.asarray(rows, dtype=np.float64)
    if ncol == 1:
        return TimeSeries(data[:, 0])
    return TimeSeries.from_xy(data[:, 0], data[:, 1])


def segmentation_schema() -> dict:
    with open(SCHEMA_PATH) as fh:
        return json.load(fh)


def write_segmentation(seg: Segmentation, path) -> None:
    Path(path).write_text(seg.to_json(indent=2) + "\n")


def write_costs_csv(costs, path) -> None:
    """J(K) curve as ``K,J`` rows."""
    costs = np.asarray(costs)
    data = np.column_stack((np.arange(costs.size), costs))
    np.savetxt(path, data, delimiter=",", header="K,J", comments="", fmt=["%d", "%.17g"])
