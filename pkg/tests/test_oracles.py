import numpy as np
import pytest

from conftest import game, scalar_problem
from pbssp.accounting import CallCounter
from pbssp.core import PrimalDualPair, SaddleData, SspProblem, eval_gap, linear_saddle
from pbssp.domains import Reals, Simplex
from pbssp.errors import CapabilityError, ConvergenceError
from pbssp.oracles import (EmpiricalProblem, SolveInfo, extragradient_solve,
                           gradient_mapping_norm, kl_prox_step, mogda_solve, robust_saa,
                           saa_solve, speg_solve)
from pbssp.problems import make_matrix_game


def sqdist(z, s):
    return float(np.sum((z.x - s.x) ** 2) + np.sum((z.y - s.y) ** 2))


def test_extragradient_scalar_to_origin():
    prob = scalar_problem(B=0.0)
    info = SolveInfo()
    z = extragradient_solve(prob, tol=1e-10, z0=PrimalDualPair(np.ones(1), np.ones(1)), info=info)
    assert abs(z.x[0]) < 1e-9 and abs(z.y[0]) < 1e-9
    assert info.residual <= 1e-10


def test_extragradient_matches_linear_solve():
    data = SaddleData([[1.0, -0.5], [0.3, 2.0]], [1.0, -1.0], [0.5, 0.2],
                      Q=[[2.0, 0.5], [0.5, 1.0]], R=[[1.5, 0.0], [0.0, 1.0]])
    prob = SspProblem(data, Reals(2), Reals(2))
    z = extragradient_solve(prob, tol=1e-11)
    ref = linear_saddle(prob)
    assert np.allclose(z.x, ref.x, atol=1e-10) and np.allclose(z.y, ref.y, atol=1e-10)


def test_entropy_game_residual_at_exit():
    g = make_matrix_game(8, 12, seed=1, regularization="entropy", epsilon=0.05)
    info = SolveInfo()
    z = extragradient_solve(g, tol=1e-9, info=info)
    assert gradient_mapping_norm(g, z, info.eta) <= 1e-9 * 1.0001
    assert abs(z.x.sum() - 1) < 1e-12 and z.x.min() >= 0


def test_extragradient_reports_nonconvergence(small_quad):
    with pytest.raises(ConvergenceError) as exc:
        extragradient_solve(small_quad, tol=1e-14, max_iters=3)
    assert exc.value.last is not None


def test_empirical_gradient_is_mean_of_samples(small_quad):
    rng = np.random.default_rng(0)
    samples = [small_quad.sample(rng) for _ in range(30)]
    emp = EmpiricalProblem.from_samples(small_quad, samples)
    x, y = rng.normal(size=5), rng.normal(size=4)
    gx = np.mean([small_quad.sample_grad(s, x, y)[0] for s in samples], axis=0)
    assert np.allclose(emp.grad(x, y)[0], gx, atol=1e-12)


def test_saa_matches_empirical_linear_solve(small_quad):
    z = saa_solve(small_quad, 500, rng=np.random.default_rng(3), method="extragradient",
                  inner_tol=1e-11)
    emp = EmpiricalProblem.draw(small_quad, 500, np.random.default_rng(3))
    ref = linear_saddle(emp)
    assert np.allclose(z.x, ref.x, atol=1e-9) and np.allclose(z.y, ref.y, atol=1e-9)


def test_saa_counts_samples(small_quad):
    cnt = CallCounter()
    saa_solve(small_quad, 123, rng=np.random.default_rng(0), counter=cnt)
    assert cnt.oracle_calls == 1 and cnt.oracle_samples == 123


def test_saa_reproducible(small_quad):
    a = saa_solve(small_quad, 50, 1.0, np.ones(5), rng=np.random.default_rng(9))
    b = saa_solve(small_quad, 50, 1.0, np.ones(5), rng=np.random.default_rng(9))
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)


def test_robust_saa_single_trial_equals_saa(small_quad):
    a = robust_saa(small_quad, 40, 1, rng=np.random.default_rng(2))
    b = saa_solve(small_quad, 40, rng=np.random.default_rng(2).spawn(1)[0])
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)


def test_robust_saa_noiseless():
    prob = scalar_problem(a=1.0, saddle=None)
    z = robust_saa(prob, 10, 5, rng=np.random.default_rng(0))
    ref = linear_saddle(prob)
    assert np.allclose(z.x, ref.x, atol=1e-12)


def test_robust_saa_markov_radius(small_quad):
    s = small_quad.saddle
    n = 200
    rng = np.random.default_rng(4)
    mean_sq = np.mean([np.sum((saa_solve(small_quad, n, rng=r).x - s.x) ** 2)
                       for r in rng.spawn(400)])
    radius = np.sqrt(3 * mean_sq)
    bad = sum(np.linalg.norm(robust_saa(small_quad, n, 45, rng=r).x - s.x) > 3 * radius
              for r in rng.spawn(1000))
    assert bad / 1000 <= np.exp(-45 / 18) + 0.01


def test_kl_prox_step_example():
    y = kl_prox_step(np.array([0.5, 0.5]), np.array([0.0, np.log(4.0)]), 1.0)
    assert np.allclose(y, [0.8, 0.2], atol=1e-15)


def test_speg_zero_payoff_stays_put():
    z0 = PrimalDualPair(np.array([0.2, 0.8]), np.array([0.1, 0.3, 0.6]))
    z = speg_solve(game(np.zeros((2, 3))), 50, 1, 0.5, np.random.default_rng(0), z0=z0)
    assert np.allclose(z.x, z0.x, atol=1e-14) and np.allclose(z.y, z0.y, atol=1e-14)


def test_speg_gap_shrinks_with_iterations():
    g = game([[0, 1], [1, 0]])
    z0 = PrimalDualPair(np.array([0.9, 0.1]), np.array([0.2, 0.8]))
    gaps = [eval_gap(g, speg_solve(g, 10 * 2**k, 1, 0.5, np.random.default_rng(0), z0=z0)).gap
            for k in range(10)]
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


def test_speg_rejects_box(box_quad):
    with pytest.raises(CapabilityError):
        speg_solve(box_quad, 10, 1)


def test_speg_counts_samples_and_stays_on_simplex():
    g = make_matrix_game(4, 5, seed=0)
    cnt = CallCounter()
    z = speg_solve(g, 30, 7, 0.3, np.random.default_rng(0), counter=cnt)
    assert cnt.oracle_samples == 2 * 7 * 30
    assert abs(z.x.sum() - 1) < 1e-12 and abs(z.y.sum() - 1) < 1e-12


def test_mogda_noiseless_converges():
    prob = scalar_problem(a=1.0, b=-0.5, saddle=None)
    star = linear_saddle(prob)
    z = mogda_solve(prob, 1e-10, PrimalDualPair(np.ones(1) * 3, np.ones(1)), np.random.default_rng(0))
    assert sqdist(z, star) <= 1e-10


def test_mogda_rejects_constraints(box_quad):
    with pytest.raises(CapabilityError):
        mogda_solve(box_quad, 0.1, None, np.random.default_rng(0))


def test_mogda_mean_distance_within_target(quad):
    target = 0.05
    d = [sqdist(mogda_solve(quad, target, None, np.random.default_rng(r)), quad.saddle)
         for r in range(200)]
    assert np.mean(d) <= 1.5 * target


def test_mogda_budget_scaling(quad):
    used = []
    for target in (0.04, 0.02):
        cnt = CallCounter()
        mogda_solve(quad, target, None, np.random.default_rng(0), counter=cnt)
        used.append(cnt.samples)
    assert used[1] <= 4 * used[0]
