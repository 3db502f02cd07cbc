# benchmarks/flows.py
from __future__ import annotations

import numpy as np

from models.semialgebraic import Box, unit_disk_set
from models.system import AffineScaling
from services.moment_algebra import ball_lebesgue_moments

from .base import AttractorSeed, BenchmarkSpec, finalize, polynomial_dynamics, single_cell, variables


def make_rotational_flow() -> BenchmarkSpec:
    """x1' = x2, x2' = -x1 on the unit disk; Lebesgue measure is invariant."""
    x1, x2 = variables(2)
    box = Box.symmetric(2)
    original = single_cell("rotational_flow", "continuous", box, (x2, -x1), domain=unit_disk_set(2), reference="ball")
    disk = ball_lebesgue_moments(2, 16).scaled(1.0 / np.pi)

    def moment(alpha: tuple[int, ...]) -> float:
        return disk[alpha]

    return finalize(
        "rotational_flow",
        original,
        polynomial_dynamics(original),
        scaling=AffineScaling.identity(2),
        ball_radius_sq=1.0,
        exact_density=lambda pts: np.ones(np.atleast_2d(pts).shape[0]),
        exact_moment=moment,
        attractor=AttractorSeed(center=(0.0, 0.0), radius=1.0, count=200, horizon=2 * np.pi, sample_every=50),
        description="harmonic oscillator on the unit disk",
    )


def make_vanderpol(a: float = 0.5) -> BenchmarkSpec:
    x1, x2 = variables(2)
    box = Box((-3.0, -4.0), (3.0, 4.0))
    original = single_cell("vanderpol", "continuous", box, (x2, a * (1.0 - x1 * x1) * x2 - x1))
    return finalize(
        "vanderpol",
        original,
        polynomial_dynamics(original),
        attractor=AttractorSeed(center=(0.5, 0.0), radius=0.1, count=10, horizon=20.0, burn_in=10.0,
                                sample_every=10),
        description=f"Van der Pol oscillator, a = {a}",
    )


def make_arneodo(a: float = -5.5, b: float = 3.5, c: float = -1.0) -> BenchmarkSpec:
    x1, x2, x3 = variables(3)
    box = Box((-4.0, -8.0, -12.0), (4.0, 8.0, 12.0))
    original = single_cell("arneodo", "continuous", box, (x2, x3, -a * x1 - b * x2 - x3 + c * x1**3))
    return finalize(
        "arneodo",
        original,
        polynomial_dynamics(original),
        attractor=AttractorSeed(center=(0.1, 0.1, 0.1), radius=0.05, count=4, horizon=1000.0, burn_in=100.0,
                                sample_every=20),
        description=f"Arneodo-Coullet system, a = {a}, b = {b}, c = {c}",
    )
