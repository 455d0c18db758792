"""Table and report writers.

CSV is byte-deterministic: 17 significant digits, '.' decimals, '\\n' line
endings, and a ``# key = value`` comment block echoing the configuration.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = ["format_value", "write_table", "read_table", "write_json"]


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, Path):
        return str(v)
    return v


def write_table(path: Path, columns: dict, meta: dict, fmt: str = "csv") -> Path:
    """Write equal-length columns as ``<path>.csv`` or ``<path>.json``."""
    names = list(columns)
    data = [np.asarray(columns[c]) for c in names]
    if len({len(d) for d in data}) > 1:
        raise ValueError("columns have different lengths")
    path = Path(path).with_suffix("." + fmt)
    if fmt == "csv":
        # repr round-trips exactly and keeps the echo readable (1e-06, not 9.99...e-07)
        lines = [f"# {k} = {float(v)!r}" if isinstance(v, (float, np.floating))
                 else f"# {k} = {format_value(v)}" for k, v in meta.items()]
        lines.append(",".join(names))
        for row in zip(*data):
            lines.append(",".join(format_value(v) for v in row))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    elif fmt == "json":
        doc = {"metadata": _jsonable(meta), "columns": names,
               "data": {c: _jsonable(d) for c, d in zip(names, data)}}
        write_json(path, doc)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_table(path: Path) -> dict[str, np.ndarray]:
    """Read a CSV written by :func:`write_table` (comment lines skipped)."""
    rows = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
            if ln and not ln.startswith("#")]
    if not rows:
        raise ValueError(f"{path}: no header")
    names = rows[0].split(",")
    values = np.array([[float(x) for x in r.split(",")] for r in rows[1:]], dtype=float)
    values = values.reshape(-1, len(names))
    return {n: values[:, i] for i, n in enumerate(names)}


def write_json(path: Path, doc: dict) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=False)
        fh.write("\n")
    return Path(path)
