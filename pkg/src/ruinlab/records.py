"""Versioned result records and their CSV/JSON serialization.

The CSV schema is fixed: one header row whose first cell is the version
tag ``ruinlab-v1`` (that column carries each record's kind), followed by
the remaining fields in declared order.  Absent fields serialize as empty
strings, never as zeros.  Floats are written with ``repr`` so that a
write -> read -> write cycle is a byte-level fixed point; files are UTF-8
with LF line endings.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, dataclass, fields
from typing import Optional

from .errors import IOFailure, SchemaMismatch

SCHEMA_TAG = "ruinlab-v1"

_FLOAT_FIELDS = (
    "h", "c", "u", "delta", "p_hat", "stderr", "ci_lo", "ci_hi",
    "asympt_value", "ratio", "log_asympt", "horizon", "wall_time_s",
)
_INT_FIELDS = ("reps", "seed")


@dataclass(frozen=True)
class ResultRecord:
    """One experiment result row; every field except `kind` is optional."""

    kind: str
    h: Optional[float] = None
    c: Optional[float] = None
    u: Optional[float] = None
    law: Optional[str] = None
    delta: Optional[float] = None
    p_hat: Optional[float] = None
    stderr: Optional[float] = None
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None
    asympt_value: Optional[float] = None
    ratio: Optional[float] = None
    log_asympt: Optional[float] = None
    horizon: Optional[float] = None
    reps: Optional[int] = None
    seed: Optional[int] = None
    wall_time_s: Optional[float] = None

    def __post_init__(self):
        if self.ratio is not None and (self.p_hat is None or self.asympt_value is None):
            raise ValueError("ratio requires both p_hat and asympt_value")


FIELD_NAMES = tuple(f.name for f in fields(ResultRecord))
HEADER = (SCHEMA_TAG,) + FIELD_NAMES[1:]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row(record: ResultRecord) -> list[str]:
    d = asdict(record)
    return [_cell(d[name]) for name in FIELD_NAMES]


def _parse_row(cells: list[str], line_no: int) -> ResultRecord:
    if len(cells) != len(FIELD_NAMES):
        raise SchemaMismatch(f"row {line_no}: expected {len(FIELD_NAMES)} cells, got {len(cells)}")
    kw = {}
    for name, cell in zip(FIELD_NAMES, cells):
        if cell == "":
            kw[name] = None
        elif name in _FLOAT_FIELDS:
            kw[name] = float(cell)
        elif name in _INT_FIELDS:
            kw[name] = int(cell)
        else:
            kw[name] = cell
    if kw["kind"] is None:
        raise SchemaMismatch(f"row {line_no}: missing kind")
    return ResultRecord(**kw)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for rec in records:
        writer.writerow(_row(rec))
    return buf.getvalue()


def records_from_csv(text: str) -> list[ResultRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != HEADER:
        raise SchemaMismatch(f"header does not match the {SCHEMA_TAG} schema")
    return [_parse_row(cells, i + 2) for i, cells in enumerate(rows[1:]) if cells]


def records_to_json(records) -> str:
    payload = {"schema": SCHEMA_TAG, "records": [asdict(r) for r in records]}
    return json.dumps(payload, indent=2) + "\n"


def records_from_json(text: str) -> list[ResultRecord]:
    payload = json.loads(text)
    if not isinstance(payload, dict) or payload.get("schema") != SCHEMA_TAG:
        raise SchemaMismatch(f"JSON payload does not carry the {SCHEMA_TAG} schema")
    return [ResultRecord(**rec) for rec in payload["records"]]


def write_records(path, records, force: bool = False, fmt: str = "csv") -> None:
    """Persist records; refuses to overwrite an existing file unless forced."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    if os.path.exists(path) and not force:
        raise IOFailure(f"output path {path} exists (pass force to overwrite)")
    text = records_to_csv(records) if fmt == "csv" else records_to_json(records)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_records(path) -> list[ResultRecord]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise IOFailure(str(exc)) from None
    if str(path).endswith(".json"):
        return records_from_json(text)
    return records_from_csv(text)
