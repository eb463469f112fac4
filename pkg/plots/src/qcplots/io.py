"""Row-file reading: '#'-prefixed metadata header, then a plain CSV table."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import EmptyInput, SchemaMismatch


def read_rows(path: Path | str) -> list[dict[str, str]]:
    """Load the data rows of a generator CSV as string dicts.

    Metadata lines (leading ``#``) are skipped. Raises EmptyInput when the
    file carries a header but no rows, and SchemaMismatch when there is not
    even a column header to read.
    """
    with open(path, newline="") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    if not lines:
        raise SchemaMismatch(f"{path}: no column header found")
    rows = list(csv.DictReader(lines))
    if not rows:
        raise EmptyInput(f"{path}: no data rows")
    return rows


def require_columns(rows: list[dict[str, str]], needed: tuple[str, ...]) -> None:
    present = rows[0].keys()
    missing = [name for name in needed if name not in present]
    if missing:
        raise SchemaMismatch(f"missing column(s): {', '.join(missing)}")


def column_floats(rows: list[dict[str, str]], name: str) -> np.ndarray:
    """One column as float64, in file order.

    Empty cells mean the rows are of a kind that never fills this column —
    the caller picked the wrong figure for the file, which is a schema
    problem, not a value problem.
    """
    require_columns(rows, (name,))
    cells = [row[name] for row in rows]
    if any(cell == "" for cell in cells):
        raise SchemaMismatch(f"column {name!r} is empty for this row kind")
    try:
        return np.array([float(cell) for cell in cells])
    except ValueError as exc:
        raise SchemaMismatch(f"column {name!r} is not numeric: {exc}") from exc
