# schemas/reports.py
from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

SCHEMA_VERSION = "1.0"


class SolverReport(BaseModel):
    status: str
    objective: float
    dual_objective: Optional[float] = None
    duality_gap: float
    max_eq_residual: float
    min_block_eigenvalue: float
    iterations: int = 0
    message: str = ""


class DensityReport(BaseModel):
    degree: int
    sup_error: Optional[float] = None
    l2_error: Optional[float] = None
    grid_points: int = 0


class ThresholdReport(BaseModel):
    d: int
    alpha: float
    delta: float
    threshold: float
    floored_eigs: int = 0
    in_set_points: int = 0
    rule: str = "assumption"
    floor: Optional[float] = None
    below_floor: bool = False


class RunReport(BaseModel):
    """report.json of the ac and singular commands."""

    schema_version: str = SCHEMA_VERSION
    command: str
    system: str
    status: str
    config: Dict[str, Any]
    solver: Optional[SolverReport] = None
    problem: Optional[str] = None
    moments: List[Dict[str, Any]] = []
    exact_moments: List[Dict[str, Any]] = []
    density: Optional[DensityReport] = None
    verdict: Optional[str] = None
    v_mass: Optional[float] = None
    v_norm: Optional[float] = None
    decomposition_residuals: Optional[Dict[str, float]] = None
    support: Optional[ThresholdReport] = None
    degenerate: bool = False
    error: Optional[str] = None
    artifacts: List[str] = []


class CompareReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    support_grid: str
    attractor: str
    support_distance: Optional[float] = None
    coverage: Optional[float] = None
    grid_points_in_set: int = 0
    attractor_points: int = 0
    grid_spacing: Optional[float] = None
    degenerate: bool = False
    status: str = "ok"
    error: Optional[str] = None
    notes: List[str] = Field(default_factory=list)
