import math

import numpy as np
import pytest

from conftest import scalar_problem
from pbssp.accounting import CallCounter
from pbssp.core import PrimalDualPair, perturb
from pbssp.oracles import solve_exact
from pbssp.errors import CapabilityError, DomainError
from pbssp.robust import (DirectionalMetric, EuclideanMetric, ceil_safe, extract,
                          function_gap_select, gradient_batch_size, robust_gradient, robust_select)


def brute_extract(points, dist):
    """Scan every candidate radius from below; literal reading of the majority ball rule."""
    m = len(points)
    radii = []
    for j in range(m):
        d = [dist(points[j], points[t]) for t in range(m)]
        for r in sorted(set(d)):
            if sum(1 for v in d if v <= r) > m / 2:
                radii.append(r)
                break
    med = sorted(radii)[math.ceil(m / 2) - 1]
    return radii, med, [k for k in range(m) if radii[k] <= med]


def test_line_example():
    res = extract([0.0, 0.1, 10.0])
    assert np.allclose(res.radii, [0.1, 0.1, 9.9])
    assert res.median_radius == pytest.approx(0.1)
    assert list(res.indices) == [0, 1]


def test_identical_points():
    res = extract([np.ones(3)] * 5)
    assert np.all(res.radii == 0) and list(res.indices) == [0, 1, 2, 3, 4]
    point, idx = robust_select([np.ones(3)] * 5)
    assert idx == 0


def test_single_point():
    res = extract([np.array([4.0, 2.0])])
    assert res.radii[0] == 0 and list(res.indices) == [0]


def test_empty_input_rejected():
    with pytest.raises(DomainError):
        extract([])


def test_select_smallest_index():
    point, idx = robust_select([0.0, 0.1, 10.0])
    assert point == 0.0 and idx == 0


@pytest.mark.parametrize("seed", range(20))
def test_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 26))
    pts = list(rng.normal(size=(m, 3)).round(1))
    g = rng.normal(size=3)
    for metric in (EuclideanMetric(), DirectionalMetric(g)):
        res = extract(pts, metric)
        radii, med, idx = brute_extract(pts, metric)
        assert np.allclose(res.radii, radii, rtol=0, atol=1e-12)
        assert res.median_radius == pytest.approx(med, abs=1e-12)
        assert list(res.indices) == idx


def test_batch_size_arithmetic():
    assert gradient_batch_size(1.0, 0.1) == 300
    assert ceil_safe(3.0000000000000004) == 3
    assert ceil_safe(2.5) == 3


def test_noiseless_gradient_is_exact():
    prob = scalar_problem()
    z = PrimalDualPair(np.array([0.3]), np.array([-0.2]))
    g = robust_gradient(prob, z, 0.1, 5, "x", np.random.default_rng(0), n=10)
    assert g[0] == pytest.approx(prob.grad(z.x, z.y)[0], abs=1e-15)


def test_gradient_needs_sigma():
    prob = scalar_problem().with_constants(scalar_problem().constants.with_values(sigma_x=None))
    with pytest.raises(CapabilityError):
        robust_gradient(prob, PrimalDualPair(np.zeros(1), np.zeros(1)), 0.1, 3, "x",
                        np.random.default_rng(0))


def test_gradient_counter(small_quad):
    cnt = CallCounter()
    robust_gradient(small_quad, small_quad.saddle, 0.5, 7, "y", np.random.default_rng(0),
                    counter=cnt)
    assert cnt.grad_calls == 7 and cnt.grad_samples == 7 * gradient_batch_size(small_quad.constants.sigma_y, 0.5)


def test_robust_gradient_failure_rate(small_quad):
    rng = np.random.default_rng(1)
    z = PrimalDualPair(np.ones(5), np.zeros(4))
    exact = small_quad.grad(z.x, z.y)[0]
    dG = 0.2
    bad = sum(np.linalg.norm(robust_gradient(small_quad, z, dG, 45, "x", rng) - exact) > 3 * dG
              for _ in range(1000))
    assert bad / 1000 <= 0.09


def test_function_gap_select_rejects_even_m(small_quad):
    ctx = perturb(small_quad, 1.0, np.zeros(5), 0.0, None)
    with pytest.raises(DomainError):
        function_gap_select(lambda *a: None, ctx, 0.1, 4, "x", np.random.default_rng(0))


def test_function_gap_select_exact_oracle(box_quad):
    ctx = perturb(box_quad, 2.0, np.zeros(6), 0.0, None)
    star = solve_exact(ctx)
    x = function_gap_select(lambda c, target, rng: star, ctx, 1e-3, 5, "x",
                            np.random.default_rng(0), grad_batch=100)
    assert np.array_equal(x, star.x)
