# benchmarks/circle_rotation.py
"""Circle rotation z -> z + w (mod 1) seen through the change of variable z = x^(3/4).

The invariant density of x is (3/4) x^(-1/4). Lifting variables y = x^+ and
z = x^(3/4) make each branch polynomial:
  X1: z (1 - w - z) >= 0,       z^4 = x^3, (z + w)^4 = y^3
  X2: (1 - z)(z + w - 1) >= 0,  z^4 = x^3, (z + w - 1)^4 = y^3
"""
from __future__ import annotations

from math import sqrt

import numpy as np

from models.polynomial import PolynomialMap
from models.semialgebraic import Box
from models.system import Cell, DynamicalSystem

from .base import BenchmarkSpec, finalize, interval_set, variables

DEFAULT_ROTATION = sqrt(99.0) / 10.0


def rotation_map(w: float):
    def step(points: np.ndarray) -> np.ndarray:
        x = np.clip(np.atleast_2d(points)[:, 0], 0.0, None)
        z = np.mod(x**0.75 + w, 1.0)
        return (z ** (4.0 / 3.0))[:, None]

    return step


def lift_point(x: float, w: float) -> tuple[float, float, float]:
    """(x, y, z) on the cell containing x, with y = x^+."""
    z = x**0.75
    shifted = z + w if z + w <= 1.0 else z + w - 1.0
    return x, shifted ** (4.0 / 3.0), z


def make_circle_rotation(w: float = DEFAULT_ROTATION) -> BenchmarkSpec:
    if not 0.0 < w < 1.0:
        raise ValueError(f"rotation number must lie in (0, 1), got {w}")
    x, y, z = variables(3)
    lift = x**3 - z**4
    box = Box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
    f = PolynomialMap((y,))
    cells = (
        Cell(interval_set(box, inequalities=(z * (1.0 - w - z),), equalities=(lift, (z + w) ** 4 - y**3)),
             f, "circle_rotation:X1"),
        Cell(interval_set(box, inequalities=((1.0 - z) * (z + w - 1.0),), equalities=(lift, (z + w - 1.0) ** 4 - y**3)),
             f, "circle_rotation:X2"),
    )
    original = DynamicalSystem("discrete", cells, box, name="circle_rotation")

    def density(pts):
        t = np.atleast_2d(pts)[:, 0]
        with np.errstate(divide="ignore"):
            return 0.75 * t ** (-0.25)

    def moment(alpha: tuple[int, ...]) -> float:
        return 3.0 / (4.0 * alpha[0] + 3.0)

    return finalize(
        "circle_rotation",
        original,
        rotation_map(w),
        exact_density=density,
        exact_moment=moment,
        description=f"conjugated circle rotation, w = {w:.6f}",
    )
