# services/formatting.py
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

import numpy as np

from models.moments import MomentVector

FLOAT_FMT = "%.17g"


def _to_float(v: Any) -> float | None:
    if v is None:
        return None
    try:
        return float(v)
    except (TypeError, ValueError):
        return None


def json_safe(obj: Any) -> Any:
    """numpy scalars/arrays to plain python; non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return json_safe(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path: str | Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(json_safe(payload), indent=2, sort_keys=False) + "\n", encoding="utf-8")
    return path


def write_csv(path: str | Path, header: list[str], rows: np.ndarray,
              int_columns: Optional[Iterable[int]] = None) -> Path:
    """Comma separated, 17 significant digits; int_columns are written as integers."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.atleast_2d(np.asarray(rows, dtype=float))
    if data.size == 0:
        data = data.reshape(0, len(header))
    if data.shape[1] != len(header):
        raise ValueError(f"{len(header)} column names for {data.shape[1]} columns")
    ints = set(int_columns or ())
    fmt = ["%d" if j in ints else FLOAT_FMT for j in range(len(header))]
    np.savetxt(path, data, fmt=fmt, delimiter=",", header=",".join(header), comments="")
    return path


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        data = data.reshape(0, len(header))
    return header, data


def read_points(path: str | Path) -> np.ndarray:
    """x1..xn columns of a point-cloud or grid CSV."""
    header, data = read_csv(path)
    cols = [j for j, name in enumerate(header) if name.startswith("x") and name[1:].isdigit()]
    if not cols:
        raise ValueError(f"{path}: no x1..xn columns in header {header}")
    return data[:, cols]


def moment_table(y: MomentVector, exact: Optional[Callable[[tuple[int, ...]], float]] = None) -> tuple[list[str], np.ndarray]:
    """One row per multi-index: exponents, value and (optionally) the exact moment."""
    exps = y.basis.exponents
    header = [f"a{i + 1}" for i in range(y.n)] + ["value"]
    cols = [exps.astype(float), y.values[:, None]]
    if exact is not None:
        header.append("exact")
        ex = [_to_float(exact(tuple(int(v) for v in e))) for e in exps]
        cols.append(np.array([np.nan if v is None else v for v in ex])[:, None])
    return header, np.hstack(cols)


def write_moments_csv(path: str | Path, y: MomentVector,
                      exact: Optional[Callable[[tuple[int, ...]], float]] = None) -> Path:
    header, rows = moment_table(y, exact)
    return write_csv(path, header, rows, int_columns=range(y.n))


def format_moments(y: MomentVector, max_rows: int = 12) -> str:
    lines = []
    for e, v in zip(y.basis.exponents[:max_rows], y.values[:max_rows]):
        lines.append(f"  y{tuple(int(a) for a in e)} = {v:.6g}")
    if len(y.values) > max_rows:
        lines.append(f"  ... ({len(y.values) - max_rows} more)")
    return "\n".join(lines)
