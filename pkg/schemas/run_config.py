# schemas/run_config.py
from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from sdp import SolverOptions

Mode = Literal["ac", "singular", "simulate", "compare"]


class SolverSettings(BaseModel):
    gap_tol: float = Field(default=1e-7, gt=0)
    feas_tol: float = Field(default=1e-7, gt=0)
    max_iter: int = Field(default=200, ge=1)

    def to_options(self) -> SolverOptions:
        return SolverOptions(gap_tol=self.gap_tol, feas_tol=self.feas_tol, max_iter=self.max_iter)


class RunConfig(BaseModel):
    system: str = Field(..., min_length=1, description="Built-in name or path to a system-definition JSON file")
    mode: Mode
    order: Optional[int] = Field(default=None, ge=1)
    norm: Literal["2", "inf"] = "inf"
    grid: int = Field(default=101, ge=2, description="Grid points per axis")
    out: Path = Path("out")
    seed: int = 42
    solver: SolverSettings = SolverSettings()
    diam: float = Field(default=1.0, gt=0, le=1)
    vol: float = Field(default=1.0, gt=0, le=1)
    threshold_rule: Literal["assumption", "mass"] = "assumption"
    mass_level: float = Field(default=0.95, gt=0, lt=1, description="Share of u kept by the mass threshold rule")
    extraction_degree: Literal["r", "2r"] = "r"
    support_grid: Optional[Path] = None
    attractor: Optional[Path] = None

    @model_validator(mode="after")
    def _mode_fields(self) -> "RunConfig":
        if self.mode in ("ac", "singular") and self.order is None:
            raise ValueError(f"mode {self.mode!r} needs an order (--order)")
        if self.mode == "compare" and (self.support_grid is None or self.attractor is None):
            raise ValueError("mode 'compare' needs both a support grid and an attractor file")
        return self

    @property
    def is_file_system(self) -> bool:
        return self.system.endswith(".json")
