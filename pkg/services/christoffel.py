# services/christoffel.py
"""Christoffel polynomial of a moment sequence and its sublevel-set support estimate.

p_{u,d}(x) = v_d(x)^T M_d(u)^{-1} v_d(x); the support estimate is
{x : p(x) <= binom(d+n, n) / alpha}.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb, exp, log, pi
from pathlib import Path
from typing import Literal, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.spatial import cKDTree
from scipy.special import gammaln

from models.moments import MomentVector
from models.polynomial import DimensionMismatchError, get_basis
from models.semialgebraic import Box
from models.system import AffineScaling
from services.moment_algebra import affine_pushforward_moments, moment_matrix
from services.formatting import write_csv, write_json

logger = logging.getLogger(__name__)

EIG_FLOOR = 1e-10

ThresholdRule = Literal["assumption", "mass"]


class ThresholdUnreachableError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


# -----------------------------
# Model
# -----------------------------
@dataclass(eq=False)
class ChristoffelModel:
    """Lower-triangular factor L with M_d(u) ~ L L^T plus the sublevel threshold."""

    d: int
    n: int
    factor: np.ndarray
    threshold: float = float("inf")
    alpha: float = float("nan")
    delta: float = float("nan")
    floored_eigs: int = 0
    rule: str = "assumption"

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return christoffel_eval(self, points)

    def with_threshold(self, alpha: float, delta: float, rule: str = "assumption") -> "ChristoffelModel":
        return ChristoffelModel(self.d, self.n, self.factor, comb(self.d + self.n, self.n) / alpha,
                                alpha, delta, self.floored_eigs, rule)

    def sidecar(self) -> dict:
        return {
            "d": self.d,
            "alpha": self.alpha,
            "delta": self.delta,
            "threshold": self.threshold,
            "floored_eigs": self.floored_eigs,
            "rule": self.rule,
        }


def build_christoffel(u: MomentVector, d: int, floor: float = EIG_FLOOR) -> ChristoffelModel:
    """Factor M_d(u), flooring eigenvalues below floor * lambda_max first."""
    M = moment_matrix(u, d).to_dense()
    try:
        L = np.linalg.cholesky(M)
        lam = np.linalg.eigvalsh(M)
        if lam[0] >= floor * lam[-1]:
            return ChristoffelModel(d, u.n, L)
    except np.linalg.LinAlgError:
        pass

    lam, V = np.linalg.eigh(M)
    if lam[-1] <= 0:
        raise ValueError(f"moment matrix of order {d} has no positive eigenvalue")
    eps = floor * lam[-1]
    floored = int(np.sum(lam < eps))
    lam = np.maximum(lam, eps)
    # M = R^T R with R from the QR of Lambda^{1/2} V^T
    R = sla.qr(np.sqrt(lam)[:, None] * V.T, mode="r")[0]
    L = R.T * np.sign(np.diag(R))[None, :]
    if floored:
        logger.warning("floored %d of %d eigenvalues of M_%d(u) at %.3e", floored, lam.shape[0], d, eps)
    return ChristoffelModel(d, u.n, L, floored_eigs=floored)


def christoffel_eval(model: ChristoffelModel, points: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != model.n:
        raise DimensionMismatchError(f"points have shape {pts.shape}, expected (k, {model.n})")
    V = get_basis(model.n, model.d).vandermonde(pts)
    W = sla.solve_triangular(model.factor, V.T, lower=True, check_finite=False)
    return np.sum(W * W, axis=0)


# -----------------------------
# Threshold
# -----------------------------
@dataclass(frozen=True)
class ThresholdParameters:
    alpha: float
    delta: float
    d: int


def sphere_surface(n: int) -> float:
    """Surface of the unit sphere in R^{n+1}."""
    return float(exp(log(2.0) + (n + 1) / 2 * log(pi) - gammaln((n + 1) / 2)))


def delta_schedule(linear_steps: int = 100, bound: float = 1e6) -> list[float]:
    out = [float(k) for k in range(1, linear_steps + 1)]
    while out[-1] * 2 <= bound:
        out.append(out[-1] * 2)
    return out


def _log_lhs(n: int, d: int, delta: float, diam: float) -> float:
    return ((3 - delta * d / (delta + diam)) * log(2.0) + n * log(d) + n * (1 - log(n)) + n * n / d)


def _log_alpha(n: int, d: int, delta: float, vol: float) -> float:
    ratio = (d + 1) * (d + 2) * (d + 3) / ((d + n + 1) * (d + n + 2) * (2 * d + n + 6))
    return n * log(delta) + log(sphere_surface(n)) - log(vol) + log(ratio)


def threshold_alpha(n: int, r: int, diam: float = 1.0, vol: float = 1.0,
                    schedule: Sequence[float] | None = None) -> ThresholdParameters:
    """Smallest scheduled delta satisfying the threshold inequality with d = r."""
    if n < 1 or r < 1:
        raise ValueError(f"need n >= 1 and r >= 1, got n={n}, r={r}")
    if not (0 < diam <= 1 and 0 < vol <= 1):
        raise ValueError(f"diam and vol must lie in (0, 1], got diam={diam}, vol={vol}")
    d = r
    residual = float("inf")
    for delta in schedule or delta_schedule():
        gap = _log_lhs(n, d, delta, diam) - _log_alpha(n, d, delta, vol)
        residual = gap
        if gap <= 0:
            alpha = exp(_log_alpha(n, d, delta, vol))
            logger.debug("threshold: n=%d d=%d delta=%g alpha=%.6g", n, d, delta, alpha)
            return ThresholdParameters(alpha, delta, d)
    raise ThresholdUnreachableError(
        f"no delta in the schedule satisfies the threshold inequality for n={n}, d={d} "
        f"(log residual {residual:.3e})",
        residual,
    )


def mass_alpha(mass: float, level: float) -> float:
    """alpha with u({p > binom(d+n, n) / alpha}) <= (1 - level) * u0.

    Markov's inequality on the trace identity: the integral of p against u
    is binom(d+n, n), so the level binom / ((1 - level) * u0) leaves at most
    a (1 - level) share of the mass outside.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"mass level must lie in (0, 1), got {level}")
    if not mass > 0.0:
        raise ValueError(f"moment sequence has nonpositive mass {mass}")
    return (1.0 - level) * mass


def threshold_floor(u: MomentVector) -> float:
    """Lower bound 1/u0 of the Christoffel polynomial; thresholds below it select nothing."""
    if not u.mass > 0.0:
        raise ValueError(f"moment sequence has nonpositive mass {u.mass}")
    return 1.0 / u.mass


def below_floor(model: ChristoffelModel, u: MomentVector) -> bool:
    return model.threshold < threshold_floor(u)


def support_model(u: MomentVector, r: int, diam: float = 1.0, vol: float = 1.0,
                  rule: ThresholdRule = "assumption", level: float = 0.95) -> ChristoffelModel:
    """Christoffel model of degree r with its sublevel threshold.

    rule "assumption" iterates delta until the threshold inequality holds;
    rule "mass" picks the level that keeps a `level` share of the mass of u.
    """
    if rule == "mass":
        if r < 1:
            raise ValueError(f"need r >= 1, got r={r}")
        return build_christoffel(u, r).with_threshold(mass_alpha(u.mass, level), float("nan"), rule)
    if rule != "assumption":
        raise ValueError(f"unknown threshold rule {rule!r}")
    params = threshold_alpha(u.n, r, diam, vol)
    return build_christoffel(u, params.d).with_threshold(params.alpha, params.delta)


# -----------------------------
# Grids
# -----------------------------
@dataclass(eq=False)
class GridSet:
    """Tensor grid in original coordinates with a membership mask (axis 0 = x1)."""

    axes: list[np.ndarray]
    mask: np.ndarray
    cell_volume: float
    values: np.ndarray | None = None

    def __post_init__(self) -> None:
        shape = tuple(a.shape[0] for a in self.axes)
        if self.mask.shape != shape:
            raise ValueError(f"mask shape {self.mask.shape} does not match grid {shape}")

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @property
    def inside(self) -> np.ndarray:
        return self.points[self.mask.ravel()]

    @property
    def spacing(self) -> float:
        """Grid diagonal."""
        return float(np.sqrt(sum((a[1] - a[0]) ** 2 for a in self.axes if a.shape[0] > 1)))


def grid_axes(box: Box, resolution: int | Sequence[int]) -> list[np.ndarray]:
    res = [resolution] * box.n if isinstance(resolution, int) else list(resolution)
    if len(res) != box.n or min(res) < 2:
        raise ValueError(f"resolution must be >= 2 on each of {box.n} axes, got {res}")
    return [np.linspace(lo, hi, m) for lo, hi, m in zip(box.lower, box.upper, res)]


def sublevel_grid(model: ChristoffelModel, box: Box, resolution: int | Sequence[int],
                  scaling: AffineScaling | None = None, chunk: int = 50_000) -> GridSet:
    """Evaluate p on a grid over box (original coordinates) and mark p <= threshold.

    The model lives in scaled coordinates when scaling is given.
    """
    axes = grid_axes(box, resolution)
    shape = tuple(a.shape[0] for a in axes)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    if scaling is not None:
        pts = scaling.scale(pts)
    vals = np.empty(pts.shape[0])
    for start in range(0, pts.shape[0], chunk):
        vals[start : start + chunk] = christoffel_eval(model, pts[start : start + chunk])
    mask = (vals <= model.threshold).reshape(shape)
    cell = float(np.prod([(a[-1] - a[0]) / (a.shape[0] - 1) for a in axes]))
    return GridSet(axes, mask, cell, vals.reshape(shape))


@dataclass
class SupportDistance:
    distance: float
    degenerate: bool = False


def support_distance(gridset: GridSet, samples: np.ndarray) -> SupportDistance:
    """max over in-set grid points of the distance to the nearest sample."""
    cloud = np.atleast_2d(np.asarray(samples, dtype=float))
    if cloud.shape[0] == 0:
        raise ValueError("support_distance needs a nonempty sample cloud")
    inside = gridset.inside
    if inside.shape[0] == 0:
        return SupportDistance(0.0, degenerate=True)
    dist, _ = cKDTree(cloud).query(inside)
    return SupportDistance(float(np.max(dist)))


def coverage(gridset: GridSet, samples: np.ndarray) -> float:
    """Share of samples whose nearest grid point is in the set."""
    cloud = np.atleast_2d(np.asarray(samples, dtype=float))
    if cloud.shape[0] == 0:
        raise ValueError("coverage needs a nonempty sample cloud")
    _, idx = cKDTree(gridset.points).query(cloud)
    return float(np.mean(gridset.mask.ravel()[idx]))


# -----------------------------
# Affine invariance
# -----------------------------
def affine_invariance_check(u: MomentVector, d: int, A: np.ndarray, b: np.ndarray,
                            test_points: np.ndarray) -> float:
    """max |p_u(x) - p_{g#u}(A x + b)| over test points."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    pushed = affine_pushforward_moments(u.truncate(2 * d), A, b)
    before = build_christoffel(u, d)
    after = build_christoffel(pushed, d)
    pts = np.atleast_2d(np.asarray(test_points, dtype=float))
    return float(np.max(np.abs(christoffel_eval(before, pts) - christoffel_eval(after, pts @ A.T + b))))


# -----------------------------
# Export
# -----------------------------
def write_grid(gridset: GridSet, model: ChristoffelModel, path: str | Path) -> Path:
    """support_grid.csv (x1..xn, p_value, in_set) plus a JSON sidecar next to it."""
    path = Path(path)
    pts = gridset.points
    vals = gridset.values.ravel() if gridset.values is not None else np.full(pts.shape[0], np.nan)
    header = [f"x{i + 1}" for i in range(gridset.n)] + ["p_value", "in_set"]
    rows = np.column_stack([pts, vals, gridset.mask.ravel().astype(float)])
    write_csv(path, header, rows, int_columns={len(header) - 1})
    sidecar = path.with_suffix(".json")
    write_json(sidecar, model.sidecar())
    return path
