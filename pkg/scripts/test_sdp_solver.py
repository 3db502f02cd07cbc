#!/usr/bin/env python3
"""
SDP interior-point solver: small closed-form problems, planted random
instances, equality preprocessing, SDPA dump.
Run: python scripts/test_sdp_solver.py
"""
import os
import sys

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import numpy as np
import scipy.sparse as sp

from sdp import AffineBlock, BlockBuilder, SdpProblem, SolverOptions, format_sdpa, solve


def _no_equalities(m):
    return sp.csr_matrix((0, m)), np.zeros(0)


def _two_by_two():
    """max x s.t. [[1, x], [x, 1]] PSD, optimum x = 1."""
    blk = BlockBuilder(2, 1, "unit").add_constant(np.eye(2)).add_entries([0, 1], [1, 0], [0, 0]).build()
    A, b = _no_equalities(1)
    return SdpProblem(1, [blk], A, b, np.array([1.0]))


def _planted(seed: int, m: int = 5, s: int = 4, rank: int = 2):
    """Random problem with a known strictly complementary optimum x*."""
    rng = np.random.default_rng(seed)
    F = []
    for _ in range(m):
        G = rng.standard_normal((s, s))
        F.append(G + G.T)
    V, _ = np.linalg.qr(rng.standard_normal((s, s)))
    S_star = V[:, :rank] @ np.diag(rng.uniform(0.5, 2.0, rank)) @ V[:, :rank].T
    Z_star = V[:, rank:] @ np.diag(rng.uniform(0.5, 2.0, s - rank)) @ V[:, rank:].T
    x_star = rng.standard_normal(m)
    C = S_star - sum(xk * Fk for xk, Fk in zip(x_star, F))
    A = rng.standard_normal((1, m))
    b = A @ x_star
    lam = rng.standard_normal(1)
    c = A.T @ lam - np.array([np.sum(Fk * Z_star) for Fk in F])
    basis = sp.csc_matrix(np.column_stack([Fk.ravel() for Fk in F]))
    block = AffineBlock(0.5 * (C + C.T), basis, name="planted")
    return SdpProblem(m, [block], sp.csr_matrix(A), b, c), x_star


def test_two_by_two_optimum():
    sol = solve(_two_by_two())
    assert sol.ok, sol.message
    assert abs(sol.objective_value - 1.0) < 1e-6
    assert sol.min_block_eigenvalue > -1e-7
    assert sol.iterations > 0


def test_planted_instances_recovered():
    for seed in range(20):
        problem, x_star = _planted(seed)
        sol = solve(problem)
        want = float(problem.objective @ x_star)
        assert sol.ok, f"seed {seed}: {sol.status} {sol.message}"
        assert abs(sol.objective_value - want) <= 1e-6 * (1.0 + abs(want)), f"seed {seed}"
        np.testing.assert_allclose(sol.x, x_star, atol=1e-6, err_msg=f"seed {seed}")
        assert sol.max_eq_residual < 1e-7


def test_rescaled_planted_instance():
    problem, x_star = _planted(3)
    blk = problem.blocks[0]
    big = AffineBlock(1e2 * blk.constant, sp.csc_matrix(1e2 * blk.basis), name="big")
    scaled = SdpProblem(problem.num_vars, [big], problem.eq_matrix * 1e3, problem.eq_rhs * 1e3,
                        problem.objective * 1e3)
    sol = solve(scaled)
    assert sol.ok, sol.message
    np.testing.assert_allclose(sol.x, x_star, atol=1e-6)


def _interval_moments():
    """max E[x^2] over probability measures on [-1, 1]; optimum 1 (atoms at +-1)."""
    m = 4  # y1..y4, y0 = 1
    moment = BlockBuilder(3, m, "moment").add_constant(np.diag([1.0, 0.0, 0.0]))
    local = BlockBuilder(2, m, "localizing").add_constant(np.diag([1.0, 0.0]))
    for a in range(3):
        for b in range(3):
            if a + b:
                moment.add_entries([a], [b], [a + b - 1])
    for a in range(2):
        for b in range(2):
            k = a + b
            if k:
                local.add_entries([a], [b], [k - 1])
            local.add_entries([a], [b], [k + 1], -1.0)
    A, b = _no_equalities(m)
    return SdpProblem(m, [moment.build(), local.build()], A, b, np.array([0.0, 1.0, 0.0, 0.0]))


def test_boundary_moment_problem():
    sol = solve(_interval_moments())
    assert sol.ok, f"{sol.status} {sol.message}"
    assert abs(sol.objective_value - 1.0) < 1e-6
    assert sol.min_block_eigenvalue > -1e-7
    assert sol.duality_gap <= 1e-7


def test_status_invariant_holds():
    opts = SolverOptions()
    for problem in (_two_by_two(), _interval_moments(), _planted(7)[0]):
        sol = solve(problem, opts)
        assert sol.ok
        assert sol.duality_gap <= opts.gap_tol
        assert sol.max_eq_residual <= opts.feas_tol
        assert sol.min_block_eigenvalue >= -opts.feas_tol


def test_duplicate_equalities_are_dropped():
    blk = BlockBuilder(2, 2, "pair").add_constant(np.eye(2)).add_entries([0, 1], [1, 0], [0, 0]).build()
    A = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 2.0]]))
    problem = SdpProblem(2, [blk], A, np.array([0.5, 1.0]), np.array([1.0, 0.0]))
    sol = solve(problem)
    assert sol.ok, sol.message
    assert abs(sol.objective_value - 1.0) < 1e-6
    assert abs(sol.x[1] - 0.5) < 1e-7


def test_inconsistent_zero_row_is_infeasible():
    blk = BlockBuilder(1, 1, "scalar").add_constant(np.eye(1)).add_entries([0], [0], [0], -1.0).build()
    A = sp.csr_matrix(np.zeros((1, 1)))
    sol = solve(SdpProblem(1, [blk], A, np.array([1.0]), np.array([1.0])))
    assert sol.status == "infeasible"
    assert not sol.ok


def test_projected_block():
    # third row and column are identically zero; Q keeps the first two
    blk = (BlockBuilder(3, 1, "padded")
           .add_constant(np.diag([1.0, 1.0, 0.0]))
           .add_entries([0, 1], [1, 0], [0, 0])
           .build(projection=np.eye(3)[:, :2]))
    assert blk.size == 2 and blk.full_size == 3
    A, b = _no_equalities(1)
    sol = solve(SdpProblem(1, [blk], A, b, np.array([1.0])))
    assert sol.ok, sol.message
    assert abs(sol.objective_value - 1.0) < 1e-6


def test_options_validation():
    for bad in ({"step": 0.0}, {"gap_tol": -1.0}, {"max_iter": 0}):
        try:
            SolverOptions(**bad)
        except ValueError:
            continue
        raise AssertionError(f"accepted {bad}")


def test_sdpa_format_two_by_two():
    text = format_sdpa(_two_by_two(), comment="unit")
    lines = text.splitlines()
    assert lines[0] == '"unit'
    assert lines[1:5] == ["1", "1", "2", "-1"]
    assert "0 1 1 1 -1" in lines
    assert "0 1 2 2 -1" in lines
    assert "1 1 1 2 1" in lines
    assert len(lines) == 8


def test_sdpa_format_with_equalities():
    problem, _ = _planted(0)
    lines = format_sdpa(problem).splitlines()
    assert lines[2] == "2"
    assert lines[3] == "4 -2"
    assert any(line.startswith("0 2 1 1 ") for line in lines)


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
