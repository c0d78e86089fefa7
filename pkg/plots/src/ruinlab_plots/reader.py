"""Reader for the versioned result CSV (schema tag ruinlab-v1).

The header row's first cell is the schema tag; that column carries each
record's kind.  Absent fields are empty strings and parse to None.
"""

from __future__ import annotations

import csv

SCHEMA_TAG = "ruinlab-v1"

COLUMNS = (
    "kind", "h", "c", "u", "law", "delta", "p_hat", "stderr", "ci_lo",
    "ci_hi", "asympt_value", "ratio", "log_asympt", "horizon", "reps",
    "seed", "wall_time_s",
)
HEADER = (SCHEMA_TAG,) + COLUMNS[1:]
_TEXT_COLUMNS = {"kind", "law"}
_INT_COLUMNS = {"reps", "seed"}


class SchemaMismatch(Exception):
    """File does not carry the expected versioned schema."""


class EmptyInput(Exception):
    """Schema is fine but there are no data rows."""


def _parse_cell(name: str, cell: str):
    if cell == "":
        return None
    if name in _TEXT_COLUMNS:
        return cell
    if name in _INT_COLUMNS:
        return int(cell)
    return float(cell)


def read_csv(path) -> list[dict]:
    """Parse a v1 result file into a list of per-row dicts."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != HEADER:
        raise SchemaMismatch(f"{path}: header does not match the {SCHEMA_TAG} schema")
    records = []
    for line_no, cells in enumerate(rows[1:], start=2):
        if not cells:
            continue
        if len(cells) != len(COLUMNS):
            raise SchemaMismatch(f"{path}: row {line_no} has {len(cells)} cells")
        records.append(
            {name: _parse_cell(name, cell) for name, cell in zip(COLUMNS, cells)}
        )
    if not records:
        raise EmptyInput(f"{path}: no data rows")
    return records
