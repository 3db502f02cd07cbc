# schemas/system_definition.py
from __future__ import annotations

import json
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from benchmarks.base import BenchmarkSpec, finalize, polynomial_dynamics
from models.polynomial import Polynomial, PolynomialMap
from models.semialgebraic import Box, SemialgebraicSet
from models.system import AffineScaling, Cell, DynamicalSystem
from services.poly_parser import parse_polynomial


class BoxDefinition(BaseModel):
    lower: List[float] = Field(..., min_length=1)
    upper: List[float] = Field(..., min_length=1)

    def to_box(self) -> Box:
        return Box(tuple(self.lower), tuple(self.upper))


class CellDefinition(BaseModel):
    name: str = ""
    inequalities: List[str] = []
    equalities: List[str] = []
    map: List[str] = Field(..., min_length=1, description="x+ (discrete) or x' (continuous) per state variable")
    box: Optional[BoxDefinition] = Field(default=None, description="Cell bounding box; defaults to the system box")


class ScalingDefinition(BaseModel):
    center: List[float]
    half_widths: List[float]


class SystemDefinition(BaseModel):
    """Declarative polynomial system; polynomials are strings over x1..xn."""

    name: str = "custom"
    dimension: int = Field(..., ge=1)
    state_dim: Optional[int] = Field(default=None, ge=1, description="Defaults to the length of the cell maps")
    time_kind: Literal["discrete", "continuous"]
    box: BoxDefinition
    cells: List[CellDefinition] = Field(..., min_length=1)
    reference: Literal["box", "ball"] = "box"
    scaling: Literal["auto", "explicit"] = "auto"
    explicit_scaling: Optional[ScalingDefinition] = None
    ball_radius_sq: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "SystemDefinition":
        for part in [self.box] + [c.box for c in self.cells if c.box is not None]:
            if len(part.lower) != self.dimension or len(part.upper) != self.dimension:
                raise ValueError(f"box bounds must have {self.dimension} entries")
        k = self.state_dim or len(self.cells[0].map)
        if k > self.dimension:
            raise ValueError(f"state dimension {k} exceeds dimension {self.dimension}")
        for c in self.cells:
            if len(c.map) != k:
                raise ValueError(f"cell {c.name!r} map has {len(c.map)} components, expected {k}")
        if self.scaling == "explicit" and self.explicit_scaling is None:
            raise ValueError("scaling 'explicit' needs explicit_scaling.center and explicit_scaling.half_widths")
        return self

    # ---- conversion ----
    def _parse(self, text: str) -> Polynomial:
        return parse_polynomial(text, self.dimension)

    def to_system(self) -> DynamicalSystem:
        global_box = self.box.to_box()
        cells = []
        for i, c in enumerate(self.cells):
            box = c.box.to_box() if c.box is not None else global_box
            domain = SemialgebraicSet(
                box=box,
                inequalities=tuple(box.side_constraints()) + tuple(self._parse(g) for g in c.inequalities),
                equalities=tuple(self._parse(h) for h in c.equalities),
            )
            f = PolynomialMap(tuple(self._parse(m) for m in c.map))
            cells.append(Cell(domain, f, c.name or f"{self.name}:X{i + 1}"))
        return DynamicalSystem(self.time_kind, tuple(cells), global_box, reference=self.reference, name=self.name)

    def to_benchmark(self) -> BenchmarkSpec:
        original = self.to_system()
        scaling = None
        if self.scaling == "explicit":
            scaling = AffineScaling(self.explicit_scaling.center, self.explicit_scaling.half_widths)
        dynamics = None if original.is_lifted else polynomial_dynamics(original)
        return finalize(self.name, original, dynamics, scaling=scaling, ball_radius_sq=self.ball_radius_sq,
                        description="user-defined system")

    @classmethod
    def from_system(cls, sys: DynamicalSystem) -> "SystemDefinition":
        """Definition of an (unscaled) system; box side inequalities are left implicit."""
        cells = []
        for c in sys.cells:
            sides = {str(g) for g in c.domain.box.side_constraints()}
            cells.append(CellDefinition(
                name=c.name,
                inequalities=[str(g) for g in c.domain.inequalities if str(g) not in sides],
                equalities=[str(h) for h in c.domain.equalities],
                map=[str(p) for p in c.f.components],
                box=BoxDefinition(lower=list(c.domain.box.lower), upper=list(c.domain.box.upper)),
            ))
        ball = sys.cells[0].domain.ball_radius_sq
        return cls(
            name=sys.name or "custom",
            dimension=sys.n,
            state_dim=sys.state_dim,
            time_kind=sys.time_kind,
            box=BoxDefinition(lower=list(sys.global_box.lower), upper=list(sys.global_box.upper)),
            cells=cells,
            reference=sys.reference,
            ball_radius_sq=ball,
        )


def load_system_definition(path: str | Path) -> SystemDefinition:
    path = Path(path)
    return SystemDefinition.model_validate(json.loads(path.read_text(encoding="utf-8")))
