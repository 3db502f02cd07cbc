# services/compare_service.py
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict

import numpy as np

from services.christoffel import GridSet, coverage, support_distance
from services.formatting import read_csv, read_points

logger = logging.getLogger(__name__)


def load_grid(path: str | Path) -> GridSet:
    """Rebuild a GridSet from support_grid.csv (x1..xn, p_value, in_set)."""
    header, data = read_csv(path)
    if "in_set" not in header:
        raise ValueError(f"{path}: missing in_set column")
    cols = [j for j, name in enumerate(header) if name.startswith("x") and name[1:].isdigit()]
    pts = data[:, cols]
    axes = [np.unique(pts[:, j]) for j in range(len(cols))]
    shape = tuple(a.shape[0] for a in axes)
    if int(np.prod(shape)) != pts.shape[0]:
        raise ValueError(f"{path}: {pts.shape[0]} rows do not form a tensor grid of shape {shape}")
    # rows are written in C order over the axes
    mask = data[:, header.index("in_set")].astype(bool).reshape(shape)
    values = data[:, header.index("p_value")].reshape(shape) if "p_value" in header else None
    cell = float(np.prod([(a[-1] - a[0]) / max(a.shape[0] - 1, 1) for a in axes]))
    return GridSet(axes, mask, cell, values)


def compare_support(grid: GridSet, cloud: np.ndarray) -> Dict[str, Any]:
    if cloud.shape[1] != grid.n:
        raise ValueError(f"attractor has dimension {cloud.shape[1]}, grid has {grid.n}")
    dist = support_distance(grid, cloud)
    cov = coverage(grid, cloud)
    notes = []
    if dist.degenerate:
        notes.append("support grid has no in-set points; distance reported as 0")
        logger.warning("empty support mask; comparison is degenerate")
    return {
        "support_distance": dist.distance,
        "coverage": cov,
        "grid_points_in_set": int(grid.mask.sum()),
        "attractor_points": int(cloud.shape[0]),
        "grid_spacing": grid.spacing,
        "degenerate": dist.degenerate,
        "notes": notes,
    }


def compare_files(grid_path: str | Path, attractor_path: str | Path) -> Dict[str, Any]:
    return compare_support(load_grid(grid_path), read_points(attractor_path))
