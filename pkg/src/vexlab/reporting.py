"""Deterministic report serialization: JSON to stdout, CSV series to files.

Floats in CSV output carry 12 significant digits; JSON uses repr floats.
Reports embed the fully resolved configuration so a run can be audited
and replayed byte-identically.
"""

from __future__ import annotations

import json
from typing import Iterable

__all__ = ["fmt_float", "flatten_report", "report_json", "write_csv"]


def fmt_float(x: float) -> str:
    return f"{float(x):.12g}"


def _flat(obj, prefix: str, rows: list) -> None:
    if isinstance(obj, dict):
        for key in sorted(obj, key=str):
            _flat(obj[key], f"{prefix}.{key}" if prefix else str(key), rows)
    elif isinstance(obj, (list, tuple)):
        for i, item in enumerate(obj):
            _flat(item, f"{prefix}[{i}]", rows)
    elif isinstance(obj, bool):
        rows.append((prefix, "true" if obj else "false"))
    elif isinstance(obj, float):
        rows.append((prefix, fmt_float(obj)))
    elif obj is None:
        rows.append((prefix, ""))
    else:
        rows.append((prefix, str(obj)))


def flatten_report(report: dict) -> list[tuple[str, str]]:
    """Sorted (key, value) rows with 12-significant-digit floats."""
    rows: list[tuple[str, str]] = []
    _flat(report, "", rows)
    return rows


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_json_default)


def _json_default(obj):
    try:
        import numpy as np
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.bool_):
            return bool(obj)
    except ImportError:
        pass
    return str(obj)


def write_csv(path: str, rows: Iterable[Iterable]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(",".join(
                fmt_float(v) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")
