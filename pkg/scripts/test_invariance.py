#!/usr/bin/env python3
"""
Invariance rows: discrete, continuous, piecewise, and lifting equalities.
Run: python scripts/test_invariance.py
"""
import os
import sys

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import numpy as np

from models.polynomial import Polynomial, PolynomialMap, get_basis
from models.semialgebraic import Box, SemialgebraicSet
from models.system import Cell, DynamicalSystem
from services.invariance import (
    cont_invariance_rows,
    disc_invariance_rows,
    equality_rows,
    expected_row_count,
    piecewise_invariance_rows,
)
from services.moment_algebra import ball_lebesgue_moments, box_lebesgue_moments


def _x(n, i):
    return Polynomial.variable(n, i)


def _interval(a, b):
    x = _x(1, 0)
    return SemialgebraicSet(box=Box((a,), (b,)), inequalities=((x - a) * (b - x),))


def test_square_map_rows():
    x = _x(1, 0)
    rows = disc_invariance_rows(PolynomialMap((x * x,)), 2)
    assert [r.alpha for r in rows] == [(1,), (2,)]
    np.testing.assert_array_equal(rows[0].coefficients[0], [0, -1, 1, 0, 0])
    np.testing.assert_array_equal(rows[1].coefficients[0], [0, 0, -1, 0, 1])
    assert all(r.rhs == 0.0 for r in rows)


def test_henon_first_row():
    x1, x2 = _x(2, 0), _x(2, 1)
    f = PolynomialMap((1.0 - 1.4 * x1 * x1 + x2, 0.3 * x1))
    rows = disc_invariance_rows(f, 2)
    basis = get_basis(2, 4)
    first = rows[0].coefficients[0]
    assert rows[0].alpha == (1, 0)
    assert first[basis.rank((0, 0))] == 1.0
    assert first[basis.rank((1, 0))] == -1.0
    assert first[basis.rank((0, 1))] == 1.0
    assert np.isclose(first[basis.rank((2, 0))], -1.4)
    second = rows[1].coefficients[0]
    assert np.isclose(second[basis.rank((1, 0))], 0.3)
    assert second[basis.rank((0, 1))] == -1.0


def test_row_counts():
    assert expected_row_count("discrete", 2, 2, 4) == 14
    assert expected_row_count("continuous", 2, 1, 2) == 14
    assert expected_row_count("continuous", 3, 2, 1) == 3
    x1, x2 = _x(2, 0), _x(2, 1)
    f = PolynomialMap((1.0 - 1.4 * x1 * x1 + x2, 0.3 * x1))
    assert len(disc_invariance_rows(f, 4)) == expected_row_count("discrete", 2, 2, 4)


def test_rotation_rows_vanish_on_disk():
    x1, x2 = _x(2, 0), _x(2, 1)
    rows = cont_invariance_rows(PolynomialMap((x2, -x1)), 2)
    assert len(rows) == 14
    z = ball_lebesgue_moments(2, 4)
    for row in rows:
        assert abs(row.evaluate([z.values])) < 1e-12
    # d/dt x1 = x2
    basis = get_basis(2, 4)
    assert rows[0].coefficients[0][basis.rank((0, 1))] == 1.0


def test_rotation_rows_reject_offcenter_dirac():
    x1, x2 = _x(2, 0), _x(2, 1)
    rows = cont_invariance_rows(PolynomialMap((x2, -x1)), 2)
    basis = get_basis(2, 4)
    y = basis.vandermonde(np.array([[0.5, 0.0]]))[0]
    assert max(abs(r.evaluate([y])) for r in rows) > 0.1


def test_tent_map_piecewise_rows_vanish_on_lebesgue():
    x = _x(1, 0)
    tent = DynamicalSystem(
        time_kind="discrete",
        cells=(
            Cell(_interval(0.0, 0.5), PolynomialMap((2.0 * x,)), name="left"),
            Cell(_interval(0.5, 1.0), PolynomialMap((2.0 - 2.0 * x,)), name="right"),
        ),
        global_box=Box((0.0,), (1.0,)),
        name="tent",
    )
    rows = piecewise_invariance_rows(tent, 3)
    assert len(rows) == 6
    y_left = box_lebesgue_moments(Box((0.0,), (0.5,)), 1, 6).values
    y_right = box_lebesgue_moments(Box((0.5,), (1.0,)), 1, 6).values
    for row in rows:
        assert len(row.coefficients) == 2
        assert abs(row.evaluate([y_left, y_right])) < 1e-12
    # a single cell alone does not satisfy the summed rows
    assert abs(rows[0].evaluate([y_left, np.zeros_like(y_right)])) > 1e-3


def test_equality_rows_for_lifting():
    x, w = _x(2, 0), _x(2, 1)
    h = w - x * x
    domain = SemialgebraicSet(box=Box((-1.0, 0.0), (1.0, 1.0)), equalities=(h,))
    lifted = DynamicalSystem(
        time_kind="discrete",
        cells=(Cell(domain, PolynomialMap((w,))),),
        global_box=domain.box,
        name="lifted",
    )
    rows = equality_rows(lifted, 1)
    assert len(rows) == 1
    basis = get_basis(2, 2)
    coefs = rows[0].coefficients[0]
    assert coefs[basis.rank((0, 1))] == 1.0
    assert coefs[basis.rank((2, 0))] == -1.0
    assert len(equality_rows(lifted, 2)) == len(get_basis(2, 2))


def test_order_must_be_positive():
    x = _x(1, 0)
    try:
        disc_invariance_rows(PolynomialMap((x,)), 0)
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
