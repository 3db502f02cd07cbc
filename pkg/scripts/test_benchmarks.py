#!/usr/bin/env python3
"""
Benchmark catalogue and reference simulation: scaling conjugacy, lifting
consistency, exact moments, seeded point clouds.
Run: python scripts/test_benchmarks.py
"""
import os
import sys

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import numpy as np
from scipy.integrate import quad

from benchmarks import BENCHMARKS, UnknownBenchmarkError, get_benchmark, make_circle_rotation
from benchmarks.circle_rotation import DEFAULT_ROTATION, lift_point, rotation_map
from models.semialgebraic import Box
from services.invariance import piecewise_invariance_rows
from services.simulation import DivergenceError, initial_ball, integrate_ode, iterate_map, simulate

UNLIFTED = ["henon", "vanderpol", "arneodo", "logistic", "koda2", "rotational_flow"]


def test_catalogue_builds():
    for name in BENCHMARKS:
        spec = get_benchmark(name)
        assert spec.name == name
        assert spec.system.n == spec.original.n
        assert spec.state_dim <= spec.system.n
    assert get_benchmark("Rotational-Flow").name == "rotational_flow"
    try:
        get_benchmark("lorenz")
    except UnknownBenchmarkError:
        return
    raise AssertionError("expected UnknownBenchmarkError")


def test_scaling_roundtrip_and_ball():
    spec = get_benchmark("henon")
    rng = np.random.default_rng(0)
    u = rng.uniform(-1.0, 1.0, size=(20, 2))
    np.testing.assert_allclose(spec.scaling.scale(spec.scaling.unscale(u)), u, atol=1e-14)
    assert spec.system.cells[0].domain.ball_radius_sq == 2.0
    np.testing.assert_allclose(spec.system.global_box.lower, [-1.0, -1.0])
    np.testing.assert_allclose(spec.system.global_box.upper, [1.0, 1.0])


def test_scaled_systems_are_conjugate():
    rng = np.random.default_rng(1)
    for name in UNLIFTED:
        spec = get_benchmark(name)
        sc = spec.scaling
        n = spec.system.n
        u = rng.uniform(-0.9, 0.9, size=(25, n))
        x = sc.unscale(u)
        if name == "rotational_flow":
            u = u[np.sum(u**2, axis=1) <= 1.0]
            x = sc.unscale(u)
        fx = spec.original.vector_field(x)
        fu = spec.system.vector_field(u)
        if spec.time_kind == "discrete":
            want = sc.scale(fx)
        else:
            want = fx / sc.half_widths
        np.testing.assert_allclose(fu, want, rtol=1e-10, atol=1e-10, err_msg=name)


def test_henon_step():
    spec = get_benchmark("henon")
    np.testing.assert_allclose(spec.dynamics(np.array([[0.0, 0.0]])), [[1.0, 0.0]])
    np.testing.assert_allclose(spec.dynamics(np.array([[1.0, 1.0]])), [[0.6, 0.3]])


def test_koda_lifting_equalities_hold():
    rng = np.random.default_rng(2)
    for which in (3, 4, 5):
        spec = get_benchmark(f"koda{which}")
        t = rng.uniform(0.01, 0.99, size=40)
        w = spec.dynamics(t[:, None])[:, 0]
        pts = np.column_stack([t, w])
        idx = spec.original.cell_index(pts, tol=1e-8)
        assert np.all(idx >= 0), f"koda{which}: lifted point outside every cell"
        for i, cell in enumerate(spec.original.cells):
            sel = idx == i
            for h in cell.domain.equalities:
                assert np.max(np.abs(h.evaluate(pts[sel])), initial=0.0) < 1e-9


def test_koda_exact_moments():
    spec = get_benchmark("koda5")
    assert np.isclose(spec.exact_moment((0,)), 1.0)
    assert np.isclose(spec.exact_moment((1,)), 0.5)
    assert np.isclose(spec.exact_moment((2,)), 0.4)
    for which in (3, 4):
        assert np.isclose(get_benchmark(f"koda{which}").exact_moment((0,)), 1.0)
    logistic = get_benchmark("logistic")
    assert np.isclose(logistic.exact_moment((1,)), 0.5)
    assert np.isclose(logistic.exact_moment((2,)), 0.375)


def test_koda2_density_is_invariant():
    spec = get_benchmark("koda2")
    k = np.arange(7)
    left = (0.5 ** (k + 1) - 0.25 ** (k + 1)) / (k + 1)
    right = 1.5 * (1.0 - 0.5 ** (k + 1)) / (k + 1)
    for row in piecewise_invariance_rows(spec.original, 3):
        assert abs(row.evaluate([left, right])) < 1e-12
    total = left + right
    for j in range(7):
        assert np.isclose(total[j], spec.exact_moment((j,)))
        quad_val, _ = quad(lambda t: t**j * spec.exact_density(np.array([t]))[0], 0.0, 1.0, points=[0.25, 0.5])
        assert np.isclose(total[j], quad_val, rtol=1e-8)


def test_circle_rotation_lift():
    spec = make_circle_rotation()
    step = rotation_map(DEFAULT_ROTATION)
    for x in np.linspace(0.05, 0.95, 19):
        _, y, _ = lift_point(x, DEFAULT_ROTATION)
        assert np.isclose(step(np.array([[x]]))[0, 0], y)
        idx = spec.original.cell_index(np.array([lift_point(x, DEFAULT_ROTATION)]), tol=1e-9)
        assert idx[0] >= 0
    assert np.isclose(spec.exact_moment((0,)), 1.0)
    assert np.isclose(spec.exact_moment((1,)), 3.0 / 7.0)
    try:
        make_circle_rotation(1.5)
    except ValueError:
        return
    raise AssertionError("expected ValueError")


def test_initial_ball_is_seeded():
    a = initial_ball((0.0, 0.0), 0.5, 100, seed=7)
    b = initial_ball((0.0, 0.0), 0.5, 100, seed=7)
    np.testing.assert_array_equal(a, b)
    assert np.all(np.linalg.norm(a, axis=1) <= 0.5)


def test_iterate_map_drops_escapes():
    def double(x):
        return 2.0 * x

    cloud = iterate_map(double, np.array([[0.1], [0.4]]), 2, box=Box((0.0,), (1.0,)))
    assert cloud.dropped == 1
    np.testing.assert_allclose(cloud.points[:, 0], [0.1, 0.4, 0.2, 0.8, 0.4])
    try:
        iterate_map(double, np.array([[0.9]]), 3, box=Box((0.0,), (1.0,)))
    except DivergenceError:
        return
    raise AssertionError("expected DivergenceError")


def test_rk4_rotation_returns_after_one_period():
    spec = get_benchmark("rotational_flow")
    x0 = np.array([[0.6, 0.0], [0.0, -0.3]])
    dt = 2 * np.pi / 4000
    cloud = integrate_ode(spec.dynamics, x0, 2 * np.pi, dt=dt)
    final = cloud.points[-2:]
    np.testing.assert_allclose(final, x0, atol=1e-8)
    radii = np.linalg.norm(cloud.points, axis=1)
    assert np.all(np.abs(radii[::2] - 0.6) < 1e-8)


def test_henon_simulation_is_deterministic():
    spec = get_benchmark("henon")
    a = simulate(spec, seed=3)
    b = simulate(spec, seed=3)
    np.testing.assert_array_equal(a.points, b.points)
    assert a.size + a.dropped == spec.attractor.count
    assert np.all(spec.state_box.contains(a.points, 1e-9))


def test_benchmarks_without_seed_cannot_simulate():
    try:
        simulate(get_benchmark("koda3"))
    except ValueError:
        return
    raise AssertionError("expected ValueError")


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"✅ {name}")
            except Exception as exc:
                failed += 1
                print(f"❌ {name}: {exc!r}")
    sys.exit(1 if failed else 0)
