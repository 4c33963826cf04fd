import math

import pytest

from rdcba.cba import solve_rd
from rdcba.errors import OutOfRange, TooLarge
from rdcba.model import make_instance
from rdcba.oracle import (
    OracleMethod,
    analytic_binary_rd,
    analytic_gaussian_rd,
    binary_entropy,
    grid_search_rd,
    simplex_grid,
)


def test_binary_closed_form():
    # ln 2 - H_b(1/4) = ln 2 - 2 ln 2 / 4 - (3/4) ln(4/3)
    assert analytic_binary_rd(0.5, 0.25) == pytest.approx(0.75 * math.log(3) - math.log(2), abs=1e-15)
    assert analytic_binary_rd(0.5, 0.25) == pytest.approx(0.1308120, abs=1e-7)
    assert analytic_binary_rd(0.5, 0.0) == pytest.approx(math.log(2))
    assert analytic_binary_rd(0.5, 0.5) == 0.0
    assert analytic_binary_rd(0.3, 0.1) == pytest.approx(binary_entropy(0.3) - binary_entropy(0.1))
    with pytest.raises(OutOfRange):
        analytic_binary_rd(1.0, 0.1)
    with pytest.raises(OutOfRange):
        analytic_binary_rd(0.5, -0.1)


def test_gaussian_closed_form():
    assert analytic_gaussian_rd(1, 0.5) == pytest.approx(0.3465736, abs=1e-7)
    assert analytic_gaussian_rd(1, 1) == 0.0
    assert analytic_gaussian_rd(2, 1) == pytest.approx(0.6931472, abs=1e-7)
    with pytest.raises(OutOfRange):
        analytic_gaussian_rd(1, 0)
    with pytest.raises(OutOfRange):
        analytic_gaussian_rd(-1, 0.5)


def test_simplex_grid():
    pts = simplex_grid(3, 4)
    assert len(pts) == 15
    assert pts.sum(axis=1) == pytest.approx(1.0)


def test_grid_search_binary(binary):
    res = grid_search_rd(binary, 0.25, 200)
    assert res.method is OracleMethod.GRID_SEARCH
    assert res.rate == pytest.approx(analytic_binary_rd(0.5, 0.25), abs=1e-3)
    assert res.distortion <= 0.25 + 1e-12


def test_grid_search_is_upper_bound_and_tightens(binary):
    exact = analytic_binary_rd(0.5, 0.23)
    rates = [grid_search_rd(binary, 0.23, n).rate for n in (25, 50, 100, 200)]
    assert all(r >= exact - 1e-12 for r in rates)
    assert all(b <= a + 1e-12 for a, b in zip(rates, rates[1:]))


def test_grid_search_berger(berger):
    res = grid_search_rd(berger, 0.2, 100)
    assert res.rate == pytest.approx(solve_rd(berger, 0.2).rate, abs=2e-3)


def test_grid_search_three_rows():
    inst = make_instance([0.2, 0.3, 0.5], [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    res = grid_search_rd(inst, 0.3, 12)
    assert res.rate == pytest.approx(solve_rd(inst, 0.3).rate, abs=5e-2)
    assert res.rate >= solve_rd(inst, 0.3).rate - 1e-9


def test_grid_search_zero_rate(berger):
    assert grid_search_rd(berger, 0.3, 10).rate == 0.0


def test_grid_search_cost_guard(binary):
    with pytest.raises(TooLarge):
        grid_search_rd(binary, 0.2, 201)
    with pytest.raises(TooLarge):
        grid_search_rd(make_instance([0.25] * 4, [[0, 1, 1, 1]] * 4), 0.2, 10)
    with pytest.raises(TooLarge):
        grid_search_rd(make_instance([0.2, 0.3, 0.5], [[0, 1, 1]] * 3), 0.2, 200)
