from .reports import SCHEMA_VERSION, CompareReport, DensityReport, RunReport, SolverReport, ThresholdReport
from .run_config import Mode, RunConfig, SolverSettings
from .system_definition import BoxDefinition, CellDefinition, SystemDefinition, load_system_definition

__all__ = [
    "SCHEMA_VERSION",
    "CompareReport",
    "DensityReport",
    "RunReport",
    "SolverReport",
    "ThresholdReport",
    "Mode",
    "RunConfig",
    "SolverSettings",
    "BoxDefinition",
    "CellDefinition",
    "SystemDefinition",
    "load_system_definition",
]
