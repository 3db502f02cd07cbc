# commands/common.py
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from benchmarks import BenchmarkSpec, get_benchmark
from models.moments import MomentVector
from models.semialgebraic import Box
from schemas.reports import RunReport, SolverReport
from schemas.run_config import RunConfig
from schemas.system_definition import load_system_definition
from sdp import SdpSolution
from services.christoffel import grid_axes
from services.formatting import write_json
from services.moment_algebra import affine_pushforward_moments

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_THRESHOLD = 4
EXIT_DEGENERATE = 5


class UsageError(ValueError):
    pass


def resolve_system(config: RunConfig) -> BenchmarkSpec:
    path = Path(config.system)
    if config.is_file_system or path.is_file():
        if not path.is_file():
            raise UsageError(f"system definition file not found: {path}")
        return load_system_definition(path).to_benchmark()
    return get_benchmark(config.system)


def prepare_out(config: RunConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def solver_report(sol: SdpSolution) -> SolverReport:
    return SolverReport(
        status=sol.status,
        objective=sol.objective_value,
        dual_objective=sol.dual_objective,
        duality_gap=sol.duality_gap,
        max_eq_residual=sol.max_eq_residual,
        min_block_eigenvalue=sol.min_block_eigenvalue,
        iterations=sol.iterations,
        message=sol.message,
    )


def to_original(y: MomentVector, spec: BenchmarkSpec) -> MomentVector:
    """Moments of the state measure in original coordinates."""
    A, b = spec.state_scaling.matrix()
    return affine_pushforward_moments(y, A, b)


def moment_rows(y: MomentVector, exact: Optional[Callable[[tuple[int, ...]], float]] = None) -> List[Dict[str, Any]]:
    rows = []
    for e, v in zip(y.basis.exponents, y.values):
        alpha = tuple(int(a) for a in e)
        row: Dict[str, Any] = {"alpha": list(alpha), "value": float(v)}
        if exact is not None:
            row["exact"] = float(exact(alpha))
        rows.append(row)
    return rows


def write_report(out: Path, report: RunReport) -> Path:
    path = out / "report.json"
    write_json(path, report.model_dump(mode="python"))
    return path


def failure_report(command: str, config: RunConfig, status: str, error: str, **extra: Any) -> RunReport:
    return RunReport(
        command=command,
        system=config.system,
        status=status,
        config=config.model_dump(mode="json"),
        error=error,
        **extra,
    )


def grid_points(box: Box, resolution: int) -> tuple[list[np.ndarray], np.ndarray]:
    axes = grid_axes(box, resolution)
    mesh = np.meshgrid(*axes, indexing="ij")
    return axes, np.stack([m.ravel() for m in mesh], axis=1)
