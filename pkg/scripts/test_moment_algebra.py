#!/usr/bin/env python3
"""
Moment algebra: Lebesgue moments, Riesz functional, moment and localizing
matrices, affine pushforward.
Run: python scripts/test_moment_algebra.py
"""
import os
import sys

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from math import comb, pi

import numpy as np
from numpy.polynomial.legendre import leggauss

from models.moments import MomentVector
from models.polynomial import DegreeOverflowError, Polynomial, get_basis
from models.semialgebraic import Box
from services.moment_algebra import (
    SingularPushforwardError,
    affine_pushforward_moments,
    ball_lebesgue_moments,
    box_lebesgue_moments,
    localizing_matrix,
    moment_matrix,
    riesz,
)


def _gauss_box_moments(box: Box, order: int, nodes: int = 12) -> np.ndarray:
    t, w = leggauss(nodes)
    grids, weights = [], []
    for a, b in zip(box.lower, box.upper):
        grids.append((b - a) / 2 * t + (b + a) / 2)
        weights.append((b - a) / 2 * w)
    pts = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, box.n)
    wts = np.prod(np.stack(np.meshgrid(*weights, indexing="ij"), axis=-1).reshape(-1, box.n), axis=1)
    vand = get_basis(box.n, order).vandermonde(pts)
    return wts @ vand


def test_box_moments_unit_interval():
    z = box_lebesgue_moments(Box((0.0,), (1.0,)), 1, 4)
    np.testing.assert_allclose(z.values, [1, 1 / 2, 1 / 3, 1 / 4, 1 / 5])


def test_box_moments_against_quadrature():
    box = Box((-1.0, 0.5), (2.0, 1.5))
    z = box_lebesgue_moments(box, 2, 6)
    np.testing.assert_allclose(z.values, _gauss_box_moments(box, 6), rtol=1e-12)
    assert np.isclose(z.mass, box.volume)


def test_ball_moments():
    z = ball_lebesgue_moments(2, 4)
    assert np.isclose(z[(0, 0)], pi)
    assert np.isclose(z[(2, 0)], pi / 4)
    assert np.isclose(z[(4, 0)], pi / 8)
    assert np.isclose(z[(2, 2)], pi / 24)
    assert z[(1, 0)] == 0.0 and z[(3, 1)] == 0.0
    z3 = ball_lebesgue_moments(3, 2)
    assert np.isclose(z3.mass, 4 * pi / 3)


def test_riesz():
    z = box_lebesgue_moments(Box((0.0,), (1.0,)), 1, 4)
    x = Polynomial.variable(1, 0)
    assert np.isclose(riesz(z, x * x), 1 / 3)
    assert riesz(z, Polynomial.zero(1)) == 0.0
    try:
        riesz(z, x**5)
    except DegreeOverflowError:
        pass
    else:
        raise AssertionError("expected DegreeOverflowError")


def test_moment_matrix_is_hilbert():
    z = box_lebesgue_moments(Box((0.0,), (1.0,)), 1, 4)
    M = np.asarray(moment_matrix(z, 2))
    hilbert = np.array([[1.0 / (i + j + 1) for j in range(3)] for i in range(3)])
    np.testing.assert_allclose(M, hilbert)
    assert np.linalg.eigvalsh(M).min() > 0


def test_moment_matrix_of_dirac_is_rank_one():
    y = MomentVector.dirac([0.3, -0.7], 4)
    M = np.asarray(moment_matrix(y, 2))
    assert M.shape == (6, 6)
    assert np.linalg.matrix_rank(M, tol=1e-10) == 1


def test_localizing_matrix_interval():
    z = box_lebesgue_moments(Box((-1.0,), (1.0,)), 1, 2)
    x = Polynomial.variable(1, 0)
    L = np.asarray(localizing_matrix(1.0 - x * x, z, 1))
    assert L.shape == (1, 1)
    assert np.isclose(L[0, 0], 2.0 - 2.0 / 3.0)


def test_localizing_matrix_ball_is_psd():
    z = ball_lebesgue_moments(2, 6)
    g = 1.0 - Polynomial.variable(2, 0) ** 2 - Polynomial.variable(2, 1) ** 2
    L = np.asarray(localizing_matrix(g, z, 3))
    assert L.shape == (comb(4, 2), comb(4, 2))
    assert np.linalg.eigvalsh(L).min() > -1e-12


def test_affine_pushforward_doubling():
    z = box_lebesgue_moments(Box((0.0,), (1.0,)), 1, 5)
    pushed = affine_pushforward_moments(z, np.array([[2.0]]), np.array([0.0]))
    k = np.arange(6)
    np.testing.assert_allclose(pushed.values, 2.0**k / (k + 1))


def test_affine_pushforward_matches_box_moments():
    z = box_lebesgue_moments(Box((-1.0, -1.0), (1.0, 1.0)), 2, 4)
    A = np.diag([2.0, 0.5])
    b = np.array([1.0, -0.5])
    pushed = affine_pushforward_moments(z, A, b)
    # det A = 1, so the image measure is Lebesgue on [-1, 3] x [-1, 0]
    target = box_lebesgue_moments(Box((-1.0, -1.0), (3.0, 0.0)), 2, 4)
    np.testing.assert_allclose(pushed.values, target.values, rtol=1e-12)


def test_affine_pushforward_rejects_singular():
    z = box_lebesgue_moments(Box((0.0, 0.0), (1.0, 1.0)), 2, 2)
    try:
        affine_pushforward_moments(z, np.array([[1.0, 2.0], [2.0, 4.0]]), np.zeros(2))
    except SingularPushforwardError:
        return
    raise AssertionError("expected SingularPushforwardError")


def test_marginal_and_truncate():
    z = box_lebesgue_moments(Box((0.0, 0.0), (1.0, 2.0)), 2, 4)
    m = z.marginal(1)
    np.testing.assert_allclose(m.values, 2.0 * np.array([1, 1 / 2, 1 / 3, 1 / 4, 1 / 5]))
    assert z.truncate(2).values.shape == (6,)


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
