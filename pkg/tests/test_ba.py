import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdcba.ba import BaConfig, ba_fixed_lambda, ba_search_dr, ba_search_rd
from rdcba.cba import StopCriterion, solve_rd
from rdcba.errors import InfeasibleTarget, MaxOuterTrials, NonPositiveRate
from rdcba.model import make_instance
from rdcba.oracle import analytic_binary_rd


def test_zero_slope_gives_zero_rate(berger):
    tp = ba_fixed_lambda(berger, 0.0)
    assert tp.rate == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(tp.w, np.tile(tp.r, (2, 1)))


def test_binary_tangent_point(binary):
    tp = ba_fixed_lambda(binary, math.log(3), StopCriterion(1e-14), record=True)
    assert tp.distortion == pytest.approx(0.25, abs=1e-8)
    assert tp.rate == pytest.approx(analytic_binary_rd(0.5, 0.25), abs=1e-8)
    assert np.all(np.diff(tp.lagrangian) <= 1e-12)


def test_gaussian_tangent_point(gaussian):
    tp = ba_fixed_lambda(gaussian, 1.0, record=True)
    assert tp.distortion == pytest.approx(0.5, abs=1e-3)
    assert tp.rate == pytest.approx(0.3466, abs=1e-3)
    assert np.all(np.diff(tp.lagrangian) <= 1e-12)


def test_search_binary(binary):
    rep = ba_search_rd(binary, 0.25, BaConfig(outer_tolerance=1e-6))
    assert rep.lam == pytest.approx(math.log(3), abs=1e-4)
    assert abs(rep.distortion - 0.25) <= 1e-6
    # the rate misses the target by about slope * distortion miss
    assert rep.rate == pytest.approx(analytic_binary_rd(0.5, rep.distortion), abs=1e-9)
    assert rep.rate == pytest.approx(analytic_binary_rd(0.5, 0.25), abs=1e-6 * rep.lam + 1e-9)
    assert rep.outer_trials == len(rep.trials)


def test_search_gaussian_agrees_with_cba(gaussian):
    rep = ba_search_rd(gaussian, 0.5)
    cba = solve_rd(gaussian, 0.5)
    assert rep.rate == pytest.approx(0.3466, abs=1e-3)
    assert rep.rate == pytest.approx(cba.rate, abs=1e-5)
    assert rep.total_inner_iterations > cba.iterations
    assert rep.last_inner_iterations <= rep.total_inner_iterations


def test_search_dr_binary(binary):
    R = analytic_binary_rd(0.5, 0.1)
    rep = ba_search_dr(binary, R, BaConfig(outer_tolerance=1e-7))
    assert rep.distortion == pytest.approx(0.1, abs=1e-6)


def test_trial_budget(gaussian):
    with pytest.raises(MaxOuterTrials):
        ba_search_rd(gaussian, 0.5, BaConfig(outer_tolerance=1e-12, max_outer_trials=4))


def test_classification(binary):
    assert ba_search_rd(binary, 0.6).rate == 0.0
    with pytest.raises(InfeasibleTarget):
        ba_search_rd(binary, -0.1)
    with pytest.raises(NonPositiveRate):
        ba_search_dr(binary, 0.0)
    with pytest.raises(ValueError):
        BaConfig(outer_tolerance=0)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 10), st.floats(0.05, 10))
def test_tangent_distortion_non_increasing(seed, a, b):
    g = np.random.default_rng(seed)
    M, N = g.integers(1, 5, size=2)
    inst = make_instance(g.dirichlet(np.ones(M)), g.uniform(0, 1, (M, N)))
    lo, hi = sorted((a, b))
    stop = StopCriterion(1e-13, 20000)
    d_lo = ba_fixed_lambda(inst, lo, stop).distortion
    d_hi = ba_fixed_lambda(inst, hi, stop).distortion
    assert d_hi <= d_lo + 1e-5
