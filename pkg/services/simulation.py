# services/simulation.py
"""Reference point clouds: map iteration and fixed-step RK4 integration.

All functions work in original coordinates on batches of points (m, k).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from benchmarks.base import AttractorSeed, BenchmarkSpec
from models.semialgebraic import Box

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
OVERFLOW_NORM = 1e12


class DivergenceError(RuntimeError):
    pass


@dataclass(eq=False)
class PointCloud:
    points: np.ndarray
    dropped: int = 0

    @property
    def size(self) -> int:
        return self.points.shape[0]


def initial_ball(center, radius: float, count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """count points drawn uniformly in the ball of the given center and radius."""
    c = np.asarray(center, dtype=float)
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal((count, c.shape[0]))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    rad = radius * rng.random(count) ** (1.0 / c.shape[0])
    return c + direction * rad[:, None]


def _alive(x: np.ndarray, box: Box | None, tol: float) -> np.ndarray:
    ok = np.all(np.isfinite(x), axis=1)
    if box is not None:
        ok &= box.contains(np.where(np.isfinite(x), x, 0.0), tol)
    return ok


def iterate_map(step: Callable[[np.ndarray], np.ndarray], x0: np.ndarray, n_steps: int, burn_in: int = 0,
                box: Box | None = None, tol: float = 1e-9) -> PointCloud:
    """Iterates x_t for burn_in <= t <= n_steps; points leaving box are dropped."""
    if n_steps < 0 or burn_in < 0:
        raise ValueError("n_steps and burn_in must be nonnegative")
    x = np.atleast_2d(np.asarray(x0, dtype=float))
    keep: list[np.ndarray] = [x] if burn_in == 0 else []
    dropped = 0
    for t in range(1, n_steps + 1):
        x = np.atleast_2d(step(x))
        ok = _alive(x, box, tol)
        if not np.all(ok):
            dropped += int(np.sum(~ok))
            x = x[ok]
        if x.shape[0] == 0:
            raise DivergenceError(f"every trajectory left the state set by iteration {t}")
        if t >= burn_in:
            keep.append(x)
    if dropped:
        logger.warning("dropped %d trajectories that left the state set", dropped)
    return PointCloud(np.vstack(keep), dropped)


def rk4_step(field: Callable[[np.ndarray], np.ndarray], x: np.ndarray, dt: float) -> np.ndarray:
    k1 = field(x)
    k2 = field(x + 0.5 * dt * k1)
    k3 = field(x + 0.5 * dt * k2)
    k4 = field(x + dt * k3)
    return x + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def integrate_ode(field: Callable[[np.ndarray], np.ndarray], x0: np.ndarray, t_end: float, dt: float = 1e-3,
                  burn_in: float = 0.0, sample_every: int = 1, box: Box | None = None) -> PointCloud:
    """Classical RK4 with fixed step; states sampled every sample_every steps after burn_in."""
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    if sample_every < 1:
        raise ValueError("sample_every must be positive")
    x = np.atleast_2d(np.asarray(x0, dtype=float))
    n_steps = int(round(t_end / dt))
    first = int(round(burn_in / dt))
    keep: list[np.ndarray] = [x] if first == 0 else []
    dropped = 0
    for t in range(1, n_steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            x = rk4_step(field, x, dt)
        ok = np.all(np.isfinite(x), axis=1) & (np.linalg.norm(np.nan_to_num(x, nan=np.inf), axis=1) < OVERFLOW_NORM)
        if not np.all(ok):
            dropped += int(np.sum(~ok))
            x = x[ok]
            if x.shape[0] == 0:
                raise DivergenceError(f"state norm overflow at t = {t * dt:.6g}")
        if t >= first and (t - first) % sample_every == 0:
            keep.append(x)
    cloud = np.vstack(keep) if keep else np.zeros((0, x.shape[1]))
    if box is not None and cloud.shape[0]:
        inside = box.contains(cloud, 1e-9)
        if not np.all(inside):
            dropped += int(np.sum(~inside))
            cloud = cloud[inside]
    if dropped:
        logger.warning("dropped %d states (divergence or leaving the state set)", dropped)
    return PointCloud(cloud, dropped)


def simulate(spec: BenchmarkSpec, seed: int = DEFAULT_SEED, seed_region: AttractorSeed | None = None) -> PointCloud:
    """Attractor cloud of a benchmark from its seeded initial region."""
    region = seed_region or spec.attractor
    if region is None:
        raise ValueError(f"benchmark {spec.name!r} has no attractor seed")
    if spec.dynamics is None:
        raise ValueError(f"benchmark {spec.name!r} has no numerical dynamics to simulate")
    x0 = initial_ball(region.center, region.radius, region.count, seed)
    if spec.time_kind == "discrete":
        cloud = iterate_map(spec.dynamics, x0, int(region.horizon), int(region.burn_in), spec.state_box)
    else:
        cloud = integrate_ode(spec.dynamics, x0, region.horizon, region.dt, region.burn_in,
                              region.sample_every, spec.state_box)
    logger.info("simulated %s: %d points (%d dropped)", spec.name, cloud.size, cloud.dropped)
    return cloud
