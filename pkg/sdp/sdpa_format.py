# sdp/sdpa_format.py
"""Plain-text dump of an SdpProblem in SDPA sparse format.

SDPA solves   min  c^T x  s.t.  sum_i F_i x_i - F_0  PSD.
Our problems are   max c^T x  s.t.  C + sum_k x_k F_k  PSD,  A x = b,
so the objective is negated, F_0 = -C, and the equalities become one
diagonal block holding both A x - b >= 0 and b - A x >= 0.
"""
from __future__ import annotations

import io
import logging
from pathlib import Path

import numpy as np

from .problem import AffineBlock, SdpProblem

logger = logging.getLogger(__name__)


def _block_matrices(blk: AffineBlock) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    s = blk.full_size
    F0 = -blk.reduced_constant()
    mats: dict[int, np.ndarray] = {}
    B = blk.basis
    for k in np.flatnonzero(np.diff(B.indptr)):
        col = B[:, k].toarray().reshape(s, s)
        mats[int(k)] = blk.reduce(0.5 * (col + col.T))
    return F0, mats


def _entries(out: io.StringIO, matno: int, blkno: int, mat: np.ndarray) -> None:
    rows, cols = np.triu_indices(mat.shape[0])
    for i, j in zip(rows, cols):
        v = mat[i, j]
        if v != 0.0:
            out.write(f"{matno} {blkno} {i + 1} {j + 1} {v:.17g}\n")


def format_sdpa(problem: SdpProblem, comment: str = "") -> str:
    out = io.StringIO()
    out.write(f'"{comment or "invmeas problem"}\n')
    A = problem.eq_matrix.toarray()
    b = problem.eq_rhs
    p = A.shape[0]
    struct = [blk.size for blk in problem.blocks]
    if p:
        struct.append(-2 * p)
    out.write(f"{problem.num_vars}\n{len(struct)}\n")
    out.write(" ".join(str(s) for s in struct) + "\n")
    out.write(" ".join(f"{-v:.17g}" for v in problem.objective) + "\n")

    for blkno, blk in enumerate(problem.blocks, start=1):
        F0, mats = _block_matrices(blk)
        _entries(out, 0, blkno, F0)
        for k, mat in mats.items():
            _entries(out, k + 1, blkno, mat)

    if p:
        eq_blk = len(problem.blocks) + 1
        for i in range(p):
            if b[i] != 0.0:
                out.write(f"0 {eq_blk} {i + 1} {i + 1} {b[i]:.17g}\n")
                out.write(f"0 {eq_blk} {p + i + 1} {p + i + 1} {-b[i]:.17g}\n")
        rows, cols = np.nonzero(A)
        for i, k in zip(rows, cols):
            v = A[i, k]
            out.write(f"{k + 1} {eq_blk} {i + 1} {i + 1} {v:.17g}\n")
            out.write(f"{k + 1} {eq_blk} {p + i + 1} {p + i + 1} {-v:.17g}\n")
    return out.getvalue()


def write_sdpa(problem: SdpProblem, path: str | Path, comment: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_sdpa(problem, comment), encoding="utf-8")
    logger.info("wrote SDPA dump %s (%s)", path, problem.describe())
    return path
