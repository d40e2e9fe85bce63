import math

import numpy as np
import pytest

from conftest import scalar_problem
from pbssp.accounting import CallCounter
from pbssp.boost import (CONSTRAINED, UNCONSTRAINED, boost_mogda, boost_saa, boost_saa_c,
                         gap_multiplier, pb_ssp_generic, plan_geometric, proposition_ledger,
                         rde_baseline, rde_settings, rounds_for, saa_c_round_size,
                         saa_round_size, total_samples_closed_form, trial_count)
from pbssp.constants import ProblemConstants
from pbssp.core import PrimalDualPair, eval_gap, linear_saddle
from pbssp.errors import CapabilityError
from pbssp.oracles import solve_exact

BASE = ProblemConstants(mu_x=1, mu_y=1, L_x=4, L_y=4, L_xy=2, C=1, sigma_x=1, sigma_y=1)
BOXED = BASE.with_values(ell_x=1, ell_y=1, D_x=2, D_y=2)


def test_rounds_example():
    plan = plan_geometric(BASE, 0.5, 0.01)
    assert plan.T == 3
    assert plan.delta == pytest.approx(0.5 / 16)
    assert plan.m == 125


def test_trial_counts():
    assert trial_count(3, 0.01) == 125
    assert trial_count(3, 0.01, constrained=True) == 129  # 18 ln 1200 = 127.6, forced odd
    assert rounds_for(8.0, 2.0) == 3
    assert rounds_for(8.000001, 2.0) == 4


def test_sample_size_examples():
    assert saa_round_size(1.0, 2.0, 1.0, 1.0, 0.0, 0.1) == 17280
    assert saa_c_round_size(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.1) == 1080


def test_rde_settings_examples():
    c = ProblemConstants(mu_x=1, mu_y=1, L_x=1, L_y=1, L_xy=1, C=1)
    s = rde_settings(c, 0.108, 0.01, UNCONSTRAINED)
    assert s.delta == pytest.approx(0.001)
    assert s.m == 83


def test_multiplier_bound_under_schedule():
    plan = plan_geometric(BOXED, 0.5, 0.01, CONSTRAINED)
    lam = plan.lambda_x[-1]
    assert lam >= BOXED.L_x and BOXED.L_xy**2 <= (BOXED.mu_x + lam) * BOXED.mu_y
    bound = 138 + 36 * math.sqrt(2)
    assert plan.M_x <= bound and plan.M_y <= bound
    assert gap_multiplier(4.0, 2.0, 1.0, 1.0, 1e9) <= bound


@pytest.mark.parametrize("mode,consts", [(UNCONSTRAINED, BASE), (CONSTRAINED, BOXED)])
@pytest.mark.parametrize("nu", [2.0, 4.0])
def test_plan_budget_and_schedule(mode, consts, nu):
    plan = plan_geometric(consts, 0.3, 0.05, mode, nu)
    assert plan.budget() <= plan.epsilon * (1 + 1e-12)
    assert plan.lambda_x[0] == 0 and all(b > a for a, b in zip(plan.lambda_x, plan.lambda_x[1:]))
    for i in range(1, plan.T + 2):
        assert plan.radii_x[i - 1] == pytest.approx(
            math.sqrt(2 * plan.delta / (consts.mu_x + plan.lambda_x[i - 1])))


def test_condition_number_collapse():
    plan = plan_geometric(BASE, 0.3, 0.05)
    lam_x, lam_y = plan.lambda_x[-1], plan.lambda_y[-1]
    assert (BASE.L_f + lam_x) / (BASE.mu_x + lam_x) <= 2
    assert (BASE.L_g + lam_y) / (BASE.mu_y + lam_y) <= 2


def test_plan_needs_strong_convexity():
    with pytest.raises(CapabilityError):
        plan_geometric(BASE.with_values(mu_x=0.0), 0.3, 0.05)


def test_noiseless_boost_saa_reaches_saddle():
    prob = scalar_problem(a=1.0, b=0.5, saddle=None)
    prob = prob.with_saddle(linear_saddle(prob))
    plan = plan_geometric(prob.constants.with_values(C=1.0), 0.1, 0.1)
    z = boost_saa(prob, plan, np.random.default_rng(0), inner_tol=1e-12)
    assert eval_gap(prob, z).gap < 1e-12


def test_sample_accounting_identity(quad):
    plan = plan_geometric(quad.constants, 2.0, 0.2, T=1, m=3, n=200)
    cnt = CallCounter()
    boost_saa(quad, plan, np.random.default_rng(0), counter=cnt)
    assert cnt.samples == total_samples_closed_form(plan)
    assert cnt.oracle_calls == plan.m * 2 * (plan.T + 2)


def test_degenerate_single_round(quad):
    plan = plan_geometric(quad.constants, 2.0, 0.2, T=0, m=3, n=200)
    telemetry = []
    boost_saa(quad, plan, np.random.default_rng(0), telemetry=telemetry)
    assert sorted({(r.stream, r.round) for r in telemetry}) == [("x", 0), ("x", 1), ("y", 0), ("y", 1)]


def test_exact_oracle_leaves_only_final_error(quad):
    plan = plan_geometric(quad.constants, 1.0, 0.1, T=2, m=1, n=1)

    def exact(ctx, rng):
        return solve_exact(ctx.problem)

    z = pb_ssp_generic(quad, plan, exact, exact, np.random.default_rng(0))
    assert eval_gap(quad, z).gap < 1e-10


def test_proposition_ledger_on_quadratic(quad):
    plan = plan_geometric(quad.constants, 1.0, 0.1, T=3, m=3, n=300)
    telemetry = []
    boost_saa(quad, plan, np.random.default_rng(1), telemetry=telemetry, track=True)
    for which in ("x", "y"):
        lhs, rhs = proposition_ledger(quad, plan, telemetry, which)
        assert lhs <= rhs + 1e-8


def test_boost_mogda_noiseless_chain():
    prob = scalar_problem(a=1.0, b=-1.0, saddle=None)
    prob = prob.with_saddle(linear_saddle(prob))
    plan = plan_geometric(prob.constants, 1e-6, 0.1, scheme="mogda", T=2, m=3)
    z = boost_mogda(prob, plan, PrimalDualPair(np.ones(1), np.ones(1)), np.random.default_rng(0))
    assert eval_gap(prob, z).gap < 1e-6


def test_boost_mogda_warm_starts_bounded(quad):
    plan = plan_geometric(quad.constants, 1.0, 0.1, scheme="mogda", T=2, m=3)
    log = []
    boost_mogda(quad, plan, None, np.random.default_rng(2), warm_log=log)
    assert len(log) == 2 * (plan.T + 2)
    first = log[0][2]
    assert all(np.isfinite(d) and d <= max(first, 1.0) * 10 for _, _, d in log)


def test_boost_mogda_success_rate(quad):
    eps = 3.0
    plan = plan_geometric(quad.constants, eps, 0.1, scheme="mogda", T=2, m=3)
    fails = sum(eval_gap(quad, boost_mogda(quad, plan, None, np.random.default_rng(r))).gap > eps
                for r in range(10))
    assert fails <= 1


def test_boost_saa_c_small_box(box_quad):
    plan = plan_geometric(box_quad.constants, 0.5, 0.1, CONSTRAINED, T=1, m=3, n=400,
                          grad_batch=100)
    cnt = CallCounter()
    z = boost_saa_c(box_quad, plan, np.random.default_rng(0), counter=cnt)
    assert eval_gap(box_quad, z).gap < 0.5
    assert cnt.grad_calls == 2 * plan.m


def test_rde_needs_more_samples_than_boost(quad):
    eps, p = 0.5, 0.1
    cb, cr = CallCounter(), CallCounter()
    plan = plan_geometric(quad.constants, eps, p)
    assert total_samples_closed_form(plan) < rde_settings(quad.constants, eps, p, UNCONSTRAINED).n * \
        rde_settings(quad.constants, eps, p, UNCONSTRAINED).m * 2
    boost_saa(quad, plan_geometric(quad.constants, eps, p, T=1, m=3, n=100),
              np.random.default_rng(0), counter=cb)
    rde_baseline(quad, eps, p, UNCONSTRAINED, np.random.default_rng(0), m=3, n=100, counter=cr)
    assert cr.oracle_calls == 3


def test_boost_mogda_rejects_saa_plan(quad):
    with pytest.raises(CapabilityError):
        boost_mogda(quad, plan_geometric(quad.constants, 1.0, 0.1, T=1, m=3, n=10), None,
                    np.random.default_rng(0))
