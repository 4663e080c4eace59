"""Deterministic CSV/JSON writers with a provenance header."""

import json
import math
from pathlib import Path

import numpy as np

from . import __version__


def _fmt(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.15g}"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    return obj


def header_line(digest):
    return f"# plasmonqe {__version__} config={digest}"


def write_csv(path, columns, rows, digest):
    path = Path(path)
    lines = [header_line(digest), ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path, payload, digest):
    path = Path(path)
    data = {"_meta": {"version": __version__, "config": digest}}
    data.update(_clean(payload))
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path
