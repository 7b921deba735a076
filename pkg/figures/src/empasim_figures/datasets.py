"""Dataset loading and schema validation.

The renderers consume only exported files, never the simulator itself:
CSV datasets with a documented header row, and line-delimited JSON event
traces with the record keys time/kind/subject/object/duration.
"""

from __future__ import annotations

import csv
import json


class SchemaError(ValueError):
    """A dataset is missing a required column or record key."""


def load_csv(path, required: tuple[str, ...]) -> list[dict]:
    """Read a CSV dataset and check the required columns are present."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise SchemaError(f"dataset {path} is missing column {column!r}")
        return list(reader)


TRACE_KEYS = ("time", "kind", "subject", "object", "duration")


def load_trace(path) -> list[dict]:
    """Read a line-delimited JSON event trace."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"trace {path} line {line_no}: not a JSON record ({exc})") from None
            for key in TRACE_KEYS:
                if key not in record:
                    raise SchemaError(f"trace {path} line {line_no} is missing column {key!r}")
            records.append(record)
    return records
