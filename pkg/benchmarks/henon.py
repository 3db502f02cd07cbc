# benchmarks/henon.py
from __future__ import annotations

from models.semialgebraic import Box

from .base import AttractorSeed, BenchmarkSpec, finalize, polynomial_dynamics, single_cell, variables

HENON_BOX = Box((-3.0, -0.6), (1.5, 0.4))


def make_henon(a: float = 1.4, b: float = 0.3) -> BenchmarkSpec:
    """x1+ = 1 - a x1^2 + x2, x2+ = b x1 on [-3, 1.5] x [-0.6, 0.4]."""
    x1, x2 = variables(2)
    original = single_cell("henon", "discrete", HENON_BOX, (1.0 - a * x1 * x1 + x2, b * x1))
    return finalize(
        "henon",
        original,
        polynomial_dynamics(original),
        attractor=AttractorSeed(center=(-1.0, 0.4), radius=0.1, count=10_000, horizon=100, burn_in=100),
        description=f"Henon map, a = {a}, b = {b}",
    )
