# benchmarks/base.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from models.polynomial import Polynomial, PolynomialMap
from models.semialgebraic import Box, SemialgebraicSet
from models.system import AffineScaling, Cell, DynamicalSystem, ReferenceKind, TimeKind

StateMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AttractorSeed:
    """Random initial points in a ball plus the simulation horizon.

    horizon counts iterations for maps and time units for flows; only
    states reached after burn_in are kept.
    """

    center: tuple[float, ...]
    radius: float
    count: int
    horizon: float
    burn_in: float = 0.0
    dt: float = 1e-3
    sample_every: int = 1


@dataclass(eq=False)
class BenchmarkSpec:
    name: str
    original: DynamicalSystem
    system: DynamicalSystem
    scaling: AffineScaling
    dynamics: Optional[StateMap]
    exact_density: Optional[StateMap] = None
    exact_moment: Optional[Callable[[tuple[int, ...]], float]] = None
    attractor: Optional[AttractorSeed] = None
    description: str = ""

    @property
    def time_kind(self) -> TimeKind:
        return self.system.time_kind

    @property
    def state_dim(self) -> int:
        return self.system.state_dim

    @property
    def state_box(self) -> Box:
        """State box in original coordinates."""
        return self.original.state_box

    @property
    def state_scaling(self) -> AffineScaling:
        return self.scaling.restrict(self.state_dim)


def variables(n: int) -> list[Polynomial]:
    return [Polynomial.variable(n, i) for i in range(n)]


def interval_set(box: Box, inequalities: Sequence[Polynomial] = (), equalities: Sequence[Polynomial] = ()) -> SemialgebraicSet:
    """Box sides as explicit inequalities, then the extra constraints."""
    return SemialgebraicSet(
        box=box,
        inequalities=tuple(box.side_constraints()) + tuple(inequalities),
        equalities=tuple(equalities),
    )


def finalize(name: str, original: DynamicalSystem, dynamics: Optional[StateMap], *,
             scaling: AffineScaling | None = None, ball_radius_sq: float | None = None,
             exact_density: Optional[StateMap] = None,
             exact_moment: Optional[Callable[[tuple[int, ...]], float]] = None,
             attractor: Optional[AttractorSeed] = None, description: str = "") -> BenchmarkSpec:
    """Scale the original system onto [-1, 1]^n and attach the ball constraint ||u||^2 <= n."""
    scaling = scaling or AffineScaling.for_box(original.global_box)
    radius_sq = float(original.n) if ball_radius_sq is None else ball_radius_sq
    system = scaling.scale_system(original, ball_radius_sq=radius_sq)
    return BenchmarkSpec(
        name=name,
        original=original,
        system=system,
        scaling=scaling,
        dynamics=dynamics,
        exact_density=exact_density,
        exact_moment=exact_moment,
        attractor=attractor,
        description=description,
    )


def single_cell(name: str, time_kind: TimeKind, box: Box, components: Sequence[Polynomial],
                domain: SemialgebraicSet | None = None, reference: ReferenceKind = "box") -> DynamicalSystem:
    domain = domain or interval_set(box)
    cell = Cell(domain, PolynomialMap(tuple(components)), name)
    return DynamicalSystem(time_kind, (cell,), box, reference=reference, name=name)


def polynomial_dynamics(system: DynamicalSystem) -> StateMap:
    def step(points: np.ndarray) -> np.ndarray:
        return system.vector_field(points)

    return step
