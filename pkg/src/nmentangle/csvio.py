"""CSV persistence for sweep records."""

from __future__ import annotations

import csv
import io
from typing import IO, Iterable

from .regimes import SweepRecord

HEADER = ("time", "time_axis", "Q", "R", "theta", "mode", "concurrence", "regime")


def _fmt(x: float) -> str:
    return format(x, ".9g")


def format_records(records: Iterable[SweepRecord]) -> str:
    lines = [",".join(HEADER)]
    for r in records:
        lines.append(
            ",".join(
                (_fmt(r.time), r.time_axis, _fmt(r.Q), _fmt(r.R), _fmt(r.theta), r.mode, _fmt(r.concurrence), r.regime)
            )
        )
    return "\n".join(lines) + "\n"


def emit_csv(records: Iterable[SweepRecord], sink: IO[bytes] | IO[str]) -> int:
    """Write records to a binary or text sink; returns the number of bytes."""
    data = format_records(records).encode("utf-8")
    if isinstance(sink, io.TextIOBase):
        sink.write(data.decode("utf-8"))
    else:
        sink.write(data)
    return len(data)


def read_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        for key in ("time", "Q", "R", "theta", "concurrence"):
            row[key] = float(row[key])
    return rows
