"""Deterministic report assembly and serialization.

Reports carry the fully resolved configuration, a content hash of every
input that influenced the run, per-item result rows, and an effort
section.  Effort is counted in deterministic units (samples drawn,
Newton iterations, nodes visited) rather than wall-clock time, so a
rerun with the same seed produces the same bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json

from .errors import ConfigurationError

__all__ = [
    "content_hash",
    "build_report",
    "report_bytes",
    "write_report",
    "verify_rows",
    "flatten",
]


def content_hash(parts: list) -> str:
    """sha256 over an ordered list of (label, bytes) input pairs."""
    acc = hashlib.sha256()
    for label, data in parts:
        acc.update(label.encode())
        acc.update(b"\x00")
        acc.update(data)
        acc.update(b"\x00")
    return acc.hexdigest()


def _canonical(value):
    """Round-trip-safe JSON atoms: floats keep repr precision via floats."""
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if hasattr(value, "item") and callable(value.item):  # numpy scalar
        return _canonical(value.item())
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def build_report(config: dict, results: list, failures: int, timing: dict) -> dict:
    """Assemble the canonical report mapping."""
    return {
        "config": _canonical(config),
        "results": _canonical(results),
        "failures": int(failures),
        "timing": _canonical(timing),
    }


def report_bytes(report: dict, fmt: str) -> bytes:
    """Serialize a report to canonical JSON or CSV bytes."""
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, separators=(",", ": "), indent=1)
        return (text + "\n").encode()
    if fmt == "csv":
        rows = report.get("results") or []
        if isinstance(rows, dict):
            rows = [rows]
        keys = []
        for row in rows:
            for key in row:
                if key not in keys:
                    keys.append(key)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row.get(k)) for k in keys})
        buf.write(f"# failures {report.get('failures', 0)}\n")
        buf.write(f"# config {json.dumps(report.get('config', {}), sort_keys=True, separators=(',', ':'))}\n")
        return buf.getvalue().encode()
    raise ConfigurationError(f"unknown report format {fmt!r}; use json or csv")


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return value


def write_report(report: dict, fmt: str, path=None) -> bytes:
    data = report_bytes(report, fmt)
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(data)
    return data


def verify_rows(results: list) -> list:
    """One row per check result, stable field order."""
    return [r.row() for r in results]


def flatten(prefix: str, mapping: dict) -> dict:
    """Flatten a nested mapping into dotted keys for config embedding."""
    out = {}
    for key, value in mapping.items():
        name = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, dict):
            out.update(flatten(name, value))
        else:
            out[name] = value
    return out
