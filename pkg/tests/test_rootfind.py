import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdcba.errors import BracketFailed
from rdcba.kernels import KernelWorkspace, eval_G_R
from rdcba.model import make_instance
from rdcba.rootfind import Direction, RootConfig, RootStatus, solve_monotone


def hamming_G(D):
    def G(lam):
        e = math.exp(-lam)
        return e / (1 + e) - D, -e / (1 + e) ** 2
    return G


def test_binary_hamming_root():
    res = solve_monotone(hamming_G(0.25), Direction.DECREASING, RootConfig(tolerance=1e-12))
    assert res.status is RootStatus.CONVERGED
    assert res.lambda_star == pytest.approx(math.log(3), abs=1e-10)
    assert abs(res.residual) <= 1e-12


def test_affine_exact_in_few_steps():
    res = solve_monotone(lambda x: (1.0 - x, -1.0), Direction.DECREASING, guess=0.0)
    assert res.lambda_star == pytest.approx(1.0, abs=1e-15)
    assert res.newton_steps <= 2


def test_root_near_zero_rate_boundary():
    res = solve_monotone(hamming_G(0.499), Direction.DECREASING)
    assert res.lambda_star == pytest.approx(math.log(0.501 / 0.499), abs=1e-10)


@pytest.mark.parametrize("guess", [1e-9, 1e-3, 1.0, 50.0, 1e6])
def test_far_guesses_recover(guess):
    res = solve_monotone(hamming_G(0.1), Direction.DECREASING, guess=guess)
    assert res.status is RootStatus.CONVERGED
    assert res.lambda_star == pytest.approx(math.log(9), abs=1e-9)


def test_increasing_direction():
    res = solve_monotone(lambda x: (math.tanh(x - 3.0), 1 / math.cosh(x - 3.0) ** 2), Direction.INCREASING)
    assert res.lambda_star == pytest.approx(3.0, abs=1e-12)


def test_flat_tail_uses_bracketing():
    # Newton from far right sees a nearly flat function and would overshoot
    res = solve_monotone(lambda x: (math.atan(x - 2.0), 1 / (1 + (x - 2.0) ** 2)), Direction.INCREASING, guess=40.0)
    assert res.status is RootStatus.CONVERGED
    assert res.lambda_star == pytest.approx(2.0, abs=1e-12)


def test_no_sign_change():
    with pytest.raises(BracketFailed):
        solve_monotone(lambda x: (1.0 + math.exp(-x), -math.exp(-x)), Direction.DECREASING)
    with pytest.raises(BracketFailed):
        solve_monotone(lambda x: (-1.0 - math.exp(-x), math.exp(-x)), Direction.INCREASING)


def test_root_at_domain_edge():
    res = solve_monotone(lambda x: (-x, -1.0), Direction.DECREASING, guess=5.0)
    assert res.lambda_star == 0.0 and res.status is RootStatus.CONVERGED


def test_step_budget_is_reported():
    res = solve_monotone(hamming_G(0.25), Direction.DECREASING, RootConfig(tolerance=1e-300, max_newton_steps=3))
    assert res.status is RootStatus.MAX_STEPS
    assert res.lambda_star == pytest.approx(math.log(3), abs=1e-3)


def test_config_validation():
    for bad in (dict(tolerance=0), dict(max_newton_steps=0), dict(bracket_growth=1.0), dict(initial_guess=-1)):
        with pytest.raises(ValueError):
            RootConfig(**bad)


@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95), st.floats(1e-6, 1e3))
def test_kernel_roots(seed, frac, guess):
    g = np.random.default_rng(seed)
    M, N = g.integers(1, 9, size=2)
    inst = make_instance(g.dirichlet(np.ones(M)), g.uniform(0, 1, (M, N)))
    r = g.dirichlet(np.ones(N))
    ws = KernelWorkspace.for_instance(inst)
    hi = float(inst.p @ (inst.d @ r))  # G_R + D at lambda = 0
    lo = float(inst.p @ inst.d.min(axis=1))  # limit as lambda -> inf
    if hi - lo < 1e-6:
        return
    D = lo + frac * (hi - lo)
    res = solve_monotone(lambda x: eval_G_R(inst, r, x, D, ws), Direction.DECREASING, guess=guess)
    assert res.status is RootStatus.CONVERGED
    assert abs(eval_G_R(inst, r, res.lambda_star, D)[0]) <= 1e-12
    lo_b, hi_b = res.bracket
    assert lo_b <= res.lambda_star <= hi_b


def test_warm_start_needs_fewer_steps(gaussian):
    r = np.full(gaussian.N, 1 / gaussian.N)
    ws = KernelWorkspace.for_instance(gaussian)
    G = lambda x: eval_G_R(gaussian, r, x, 0.1, ws)  # noqa: E731
    cold = solve_monotone(G, Direction.DECREASING, guess=1.0)
    warm = solve_monotone(G, Direction.DECREASING, guess=cold.lambda_star * 1.01)
    assert warm.newton_steps + warm.bisection_steps <= cold.newton_steps + cold.bisection_steps
