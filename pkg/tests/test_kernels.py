import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from rdcba.errors import DegenerateRow, SupportViolation
from rdcba.kernels import (
    KernelWorkspace,
    eval_G_D,
    eval_G_R,
    kl_divergence,
    objective_distortion,
    objective_rate,
    tilted_rate,
    update_r,
    update_w,
)
from rdcba.model import make_instance

from . import reference as ref


@st.composite
def instances(draw, max_m=8, max_n=8, scale=1.0):
    M = draw(st.integers(1, max_m))
    N = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    g = np.random.default_rng(seed)
    inst = make_instance(g.dirichlet(np.ones(M)), scale * g.uniform(0, 1, (M, N)))
    return inst, g.dirichlet(np.ones(N))


lams = st.floats(1e-3, 50.0)


@given(instances(), lams, lams)
def test_G_R_non_increasing(case, a, b):
    inst, r = case
    lo, hi = sorted((a, b))
    assert eval_G_R(inst, r, hi, 0.0)[0] <= eval_G_R(inst, r, lo, 0.0)[0] + 1e-13
    assert eval_G_R(inst, r, lo, 0.0)[1] <= 0.0


@given(instances(), lams, lams)
def test_G_D_non_decreasing(case, a, b):
    inst, r = case
    lo, hi = sorted((a, b))
    assert eval_G_D(inst, r, hi, 0.0)[0] >= eval_G_D(inst, r, lo, 0.0)[0] - 1e-13
    assert eval_G_D(inst, r, lo, 0.0)[1] >= 0.0


@given(instances(max_m=4, max_n=4), st.floats(0.01, 30.0))
def test_values_and_derivatives_match_high_precision(case, lam):
    inst, r = case
    p, d = inst.p.tolist(), inst.d.tolist()
    v, dv = eval_G_R(inst, r, lam, 0.3)
    assert v == pytest.approx(float(ref.G_R(p, d, r, lam, 0.3)), abs=1e-12)
    assert dv == pytest.approx(float(ref.dG_R(p, d, r, lam)), rel=1e-8, abs=1e-14)
    v, dv = eval_G_D(inst, r, lam, 0.2)
    assert v == pytest.approx(float(ref.G_D(p, d, r, lam, 0.2)), abs=1e-11)
    assert dv == pytest.approx(float(ref.dG_D(p, d, r, lam)), rel=1e-8, abs=1e-14)


@given(instances(), st.floats(0.01, 30.0), hnp.arrays(np.float64, 8, elements=st.floats(0, 100)))
def test_row_shift_invariance(case, lam, c):
    # adding a constant to a row of d leaves the tilted conditional unchanged
    inst, r = case
    shifted = make_instance(inst.p, inst.d + c[: inst.M, None])
    w1 = update_w(inst, r, lam)
    w2 = update_w(shifted, r, lam)
    np.testing.assert_allclose(w1, w2, rtol=1e-9, atol=1e-300)
    g1 = eval_G_R(inst, r, lam, 0.0)
    g2 = eval_G_R(shifted, r, lam, 0.0)
    assert g2[0] == pytest.approx(g1[0] + inst.p @ c[: inst.M], abs=1e-9)
    assert g2[1] == pytest.approx(g1[1], rel=1e-6, abs=1e-12)


@given(instances(scale=1000.0), st.floats(1e-3, 1e4))
def test_updates_stay_on_simplex(case, lam):
    inst, r = case
    w = update_w(inst, r, lam)
    assert np.all(np.isfinite(w)) and np.all(w >= 0)
    np.testing.assert_allclose(w.sum(axis=1), 1.0, atol=1e-12)
    r2 = update_r(inst, w)
    assert r2.sum() == pytest.approx(1.0, abs=1e-12)
    g, dg = eval_G_R(inst, r, lam, 0.0)
    assert np.isfinite(g) and np.isfinite(dg)


@given(instances(), st.floats(0.01, 30.0))
def test_tilted_rate_matches_direct_formula(case, lam):
    inst, r = case
    ws = KernelWorkspace.for_instance(inst)
    w = update_w(inst, r, lam, ws)
    r2 = update_r(inst, w)
    assert tilted_rate(inst, ws, w, r2) == pytest.approx(objective_rate(inst, w, r2), abs=1e-12)
    assert objective_rate(inst, w, r2) >= -1e-12


def test_extreme_multiplier_does_not_overflow(gaussian):
    r = np.full(gaussian.N, 1 / gaussian.N)
    for lam in (1e-8, 1e3, 1e8):
        w = update_w(gaussian, r, lam)
        assert np.all(np.isfinite(w))
        v, dv = eval_G_R(gaussian, r, lam, 0.5)
        assert np.isfinite(v) and np.isfinite(dv)


def test_zero_marginal_entries(binary):
    r = np.array([1.0, 0.0])
    w = update_w(binary, r, 2.0)
    np.testing.assert_array_equal(w, [[1.0, 0.0], [1.0, 0.0]])
    assert eval_G_R(binary, r, 2.0, 0.0)[0] == pytest.approx(0.5)


def test_degenerate_row():
    inst = make_instance([1.0], [[0.0, 1.0]])
    with pytest.raises(DegenerateRow):
        update_w(inst, np.zeros(2), 1.0)


def test_support_violation(binary):
    with pytest.raises(SupportViolation):
        objective_rate(binary, np.array([[0.5, 0.5], [0.5, 0.5]]), np.array([1.0, 0.0]))


def test_objectives_on_known_point(binary):
    w = np.array([[0.75, 0.25], [0.25, 0.75]])
    r = np.array([0.5, 0.5])
    assert objective_distortion(binary, w) == pytest.approx(0.25)
    assert objective_rate(binary, w, r) == pytest.approx(np.log(2) + 0.75 * np.log(0.75) + 0.25 * np.log(0.25))


def test_kl():
    assert kl_divergence(np.array([0.5, 0.5]), np.array([0.5, 0.5])) == 0.0
    assert kl_divergence(np.array([0.5, 0.5]), np.array([1.0, 0.0])) == np.inf
    assert kl_divergence(np.array([1.0, 0.0]), np.array([0.5, 0.5])) == pytest.approx(np.log(2))
