"""Report serialization: one JSON schema, plus a flat CSV rendering.

Reports are the forensic product, so serialization is deterministic:
keys are sorted, floats are rendered with repr (shortest round-trip
decimal), and the only run-varying field is runtime_ms. The CSV view is
a flattened path,value table carrying exactly the JSON's numbers.
"""

from __future__ import annotations

import json

import numpy as np

SCHEMA_VERSION = 1

__all__ = ["build_report", "render_json", "render_csv", "jsonable"]


def jsonable(obj):
    """Recursively convert report objects to plain JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) or isinstance(obj, (str, bool)) or obj is None:
        return int(obj) if isinstance(obj, np.integer) else obj
    if hasattr(obj, "__dataclass_fields__"):
        return {k: jsonable(getattr(obj, k)) for k in obj.__dataclass_fields__}
    return str(obj)


def build_report(command: str, config: dict, results, runtime_ms: float) -> dict:
    from . import __version__

    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": jsonable(config),
        "results": jsonable(results),
        "runtime_ms": round(float(runtime_ms), 3),
        "library_version": __version__,
    }


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _flatten(prefix: str, value, rows: list) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], rows)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, value))


def render_csv(report: dict) -> str:
    rows: list = []
    _flatten("", report, rows)
    lines = ["path,value"]
    for path, value in rows:
        if isinstance(value, float):
            rendered = repr(value)
        elif value is None:
            rendered = ""
        else:
            rendered = str(value)
        if "," in rendered or '"' in rendered or "," in path:
            rendered = '"' + rendered.replace('"', '""') + '"'
        lines.append(f"{path},{rendered}")
    return "\n".join(lines) + "\n"
