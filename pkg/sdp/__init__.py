# sdp/__init__.py
from .problem import (
    AffineBlock,
    BlockBuilder,
    SdpProblem,
    SdpProblemError,
    SdpSolution,
    SolverOptions,
    block_min_eigenvalues,
    psd_project_check,
)
from .solver import solve
from .sdpa_format import format_sdpa, write_sdpa

__all__ = [
    "AffineBlock",
    "BlockBuilder",
    "SdpProblem",
    "SdpProblemError",
    "SdpSolution",
    "SolverOptions",
    "block_min_eigenvalues",
    "psd_project_check",
    "solve",
    "format_sdpa",
    "write_sdpa",
]
