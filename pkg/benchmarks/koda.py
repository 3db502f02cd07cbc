# benchmarks/koda.py
"""Piecewise interval maps on [0, 1] with known absolutely continuous invariant densities.

Rational and fractional branches are lifted with one extra variable w = x^+
tied to x by a polynomial equality on each cell.
"""
from __future__ import annotations

from math import comb, sqrt

import numpy as np
from scipy.integrate import quad

from models.polynomial import Polynomial, PolynomialMap
from models.semialgebraic import Box
from models.system import Cell, DynamicalSystem

from .base import BenchmarkSpec, finalize, interval_set, variables

KODA_VARIANTS = (3, 4, 5)

UNIT = Box((0.0,), (1.0,))
LIFTED = Box((0.0, 0.0), (1.0, 1.0))


def _interval_moments(density):
    def moment(alpha: tuple[int, ...]) -> float:
        k = alpha[0]
        val, _ = quad(lambda t: t**k * density(np.array([t]))[0], 0.0, 1.0, limit=200)
        return val

    return moment


def _lifted_system(name: str, split: float, eq1: Polynomial, eq2: Polynomial) -> DynamicalSystem:
    x, w = variables(2)
    f = PolynomialMap((w,))
    cells = (
        Cell(interval_set(Box((0.0, 0.0), (split, 1.0)), equalities=(eq1,)), f, f"{name}:X1"),
        Cell(interval_set(Box((split, 0.0), (1.0, 1.0)), equalities=(eq2,)), f, f"{name}:X2"),
    )
    return DynamicalSystem("discrete", cells, LIFTED, name=name)


def _piecewise(split: float, left, right):
    def step(points: np.ndarray) -> np.ndarray:
        t = np.atleast_2d(points)[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(t <= split, left(t), right(t))
        return out[:, None]

    return step


def make_koda(which: int) -> BenchmarkSpec:
    if which not in KODA_VARIANTS:
        raise ValueError(f"unknown Koda variant {which!r}; choose one of {KODA_VARIANTS}")
    x, w = variables(2)

    if which == 3:
        split = sqrt(2.0) - 1.0
        original = _lifted_system(
            "koda3", split,
            w * (1.0 - x * x) - 2.0 * x,
            2.0 * x * w - (1.0 - x * x),
        )
        dynamics = _piecewise(split, lambda t: 2 * t / (1 - t * t), lambda t: (1 - t * t) / (2 * t))

        def density(pts):
            t = np.atleast_2d(pts)[:, 0]
            return (4.0 / np.pi) / (1.0 + t * t)

    elif which == 4:
        split = 1.0 / 3.0
        original = _lifted_system(
            "koda4", split,
            w * (1.0 - x) - 2.0 * x,
            2.0 * x * w - (1.0 - x),
        )
        dynamics = _piecewise(split, lambda t: 2 * t / (1 - t), lambda t: (1 - t) / (2 * t))

        def density(pts):
            t = np.atleast_2d(pts)[:, 0]
            return 2.0 / (1.0 + t) ** 2

    else:
        split = 0.5
        a = w - 0.5
        b = x - 0.5
        original = _lifted_system(
            "koda5", split,
            a**3 - 2.0 * b**3 - 0.125,
            a**3 + 2.0 * b**3 - 0.125,
        )
        dynamics = _piecewise(
            split,
            lambda t: 0.5 + np.cbrt(2 * (t - 0.5) ** 3 + 0.125),
            lambda t: 0.5 + np.cbrt(0.125 - 2 * (t - 0.5) ** 3),
        )

        def density(pts):
            t = np.atleast_2d(pts)[:, 0]
            return 12.0 * (t - 0.5) ** 2

    return finalize(
        f"koda{which}",
        original,
        dynamics,
        exact_density=density,
        exact_moment=_interval_moments(density),
        description=f"two-branch interval map (variant {which}) lifted with w = x+",
    )


def make_koda2() -> BenchmarkSpec:
    """Piecewise affine map f1 = 2x on [0, 1/2], f2 = 1 + 3/2 (1/2 - x) on [1/2, 1]."""
    (x,) = variables(1)
    cells = (
        Cell(interval_set(Box((0.0,), (0.5,))), PolynomialMap((2.0 * x,)), "koda2:X1"),
        Cell(interval_set(Box((0.5,), (1.0,))), PolynomialMap((1.75 - 1.5 * x,)), "koda2:X2"),
    )
    original = DynamicalSystem("discrete", cells, UNIT, name="koda2")

    def density(pts):
        t = np.atleast_2d(pts)[:, 0]
        return np.where((t >= 0.25) & (t < 0.5), 1.0, np.where((t >= 0.5) & (t <= 1.0), 1.5, 0.0))

    def moment(alpha: tuple[int, ...]) -> float:
        k = alpha[0] + 1
        return (0.5**k - 0.25**k) / k + 1.5 * (1.0 - 0.5**k) / k

    return finalize(
        "koda2",
        original,
        _piecewise(0.5, lambda t: 2 * t, lambda t: 1.75 - 1.5 * t),
        exact_density=density,
        exact_moment=moment,
        description="piecewise affine interval map with a step invariant density",
    )


def make_logistic() -> BenchmarkSpec:
    (x,) = variables(1)
    cell = Cell(interval_set(UNIT), PolynomialMap((4.0 * x * (1.0 - x),)), "logistic")
    original = DynamicalSystem("discrete", (cell,), UNIT, name="logistic")

    def density(pts):
        t = np.atleast_2d(pts)[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / (np.pi * np.sqrt(t * (1.0 - t)))

    def moment(alpha: tuple[int, ...]) -> float:
        k = alpha[0]
        return comb(2 * k, k) / 4.0**k

    return finalize(
        "logistic",
        original,
        lambda pts: 4.0 * np.atleast_2d(pts) * (1.0 - np.atleast_2d(pts)),
        exact_density=density,
        exact_moment=moment,
        description="full logistic map; arcsine invariant density (not square integrable)",
    )
