"""Stochastic saddle-point oracles.

SAA builds the empirical problem from n samples and solves it with a
deterministic extragradient method; SPEG runs stochastic extragradient with
KL proximity on simplices; MOGDA runs multistage optimistic gradient steps
on unconstrained problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .accounting import CallCounter
from .core import (PrimalDualPair, SaddleData, SspProblem, aggregate_terms, auto_prox_kind,
                   linear_saddle, mean_data, perturb)
from .domains import Box, Reals, Simplex
from .errors import CapabilityError, ConvergenceError, DomainError
from .robust import extract


@dataclass
class OracleSpec:
    """Which oracle to run and its tuning.

    kind is ``saa``, ``speg`` or ``mogda``. For SAA, ``inner_tol`` of None
    means "one hundredth of the accuracy the caller asks for".
    """

    kind: str = "saa"
    n: int = 1000
    inner_tol: float | None = None
    inner_max_iters: int = 200_000
    method: str = "auto"
    iters: int = 500
    batch: int = 10
    eta: float | None = None
    target_sq_dist: float | None = None
    c_decay: float = 1.0
    c_noise: float = 0.1

    def __post_init__(self):
        if self.kind not in ("saa", "speg", "mogda"):
            raise DomainError(f"unknown oracle kind {self.kind!r}")
        if self.n < 1 or self.iters < 1 or self.batch < 1:
            raise DomainError("sample counts and iterations must be positive")
        if self.eta is not None and self.eta <= 0:
            raise DomainError("eta must be positive")
        if self.target_sq_dist is not None and self.target_sq_dist <= 0:
            raise DomainError("target_sq_dist must be positive")


class EmpiricalProblem(SspProblem):
    """The finite-sum problem (1/n) sum Phi_xi_i with the parent's deterministic terms."""

    def __init__(self, parent: SspProblem, data: SaddleData, n: int):
        super().__init__(data, parent.xdom, parent.ydom, parent.xterms, parent.yterms,
                         parent.constants, None, None, parent.name + "/empirical",
                         parent.gap_inflation, parent.original)
        self.parent = parent
        self.n = int(n)

    @classmethod
    def from_samples(cls, parent: SspProblem, samples) -> EmpiricalProblem:
        samples = list(samples)
        return cls(parent, mean_data(samples), len(samples))

    @classmethod
    def draw(cls, parent: SspProblem, n: int, rng) -> EmpiricalProblem:
        return cls(parent, parent.sample_mean(n, rng), n)


# ---------------------------------------------------------------- extragradient

def _geometry(dom, bt) -> int:
    if isinstance(dom, Simplex) and bt.wq == 0:
        return kernels.ENTROPIC
    if isinstance(dom, Simplex) and bt.W > 0:
        raise CapabilityError("mixed quadratic and entropic terms on one block")
    if bt.W > 0:
        raise CapabilityError("entropic terms need a simplex block")
    return kernels.EUCLID


def _block_norm(M, geom_in, geom_out):
    """Operator norm of M from the input block's norm to the output block's dual norm."""
    if M is None:
        return 0.0
    M = np.diag(M) if M.ndim == 1 else M
    ent_in = geom_in == kernels.ENTROPIC
    ent_out = geom_out == kernels.ENTROPIC
    if ent_in and ent_out:
        return float(np.max(np.abs(M)))
    if ent_in:  # l1 -> l2: largest column norm
        return float(np.max(np.sqrt(np.sum(M**2, axis=0))))
    if ent_out:  # l2 -> l_inf: largest row norm
        return float(np.max(np.sqrt(np.sum(M**2, axis=1))))
    return float(np.linalg.norm(M, 2))


def operator_lipschitz(problem: SspProblem) -> float:
    """Lipschitz constant of the smooth part of (grad_x, -grad_y) in the mixed geometry.

    Euclidean blocks use the l2 norm, entropic simplex blocks the l1 norm,
    matching the strong convexity of their proximal maps.
    """
    dx, dy = problem.dims
    gx = _geometry(problem.xdom, aggregate_terms(problem.xterms, dx))
    gy = _geometry(problem.ydom, aggregate_terms(problem.yterms, dy))
    d = problem.data
    return (_block_norm(d.Q, gx, gx) + _block_norm(d.R, gy, gy)
            + _block_norm(d.B, gy, gx))


def _kernel_block(dom, bt, geom):
    lo, hi = dom.bounds()
    return (geom, dom.code, np.ascontiguousarray(lo, float), np.ascontiguousarray(hi, float),
            bt.wq, bt.s, bt.W, bt.l)


def _dense_or_empty(M, d):
    if M is None or not np.any(M):
        return np.zeros((0, 0))
    return np.diag(M) if M.ndim == 1 else np.ascontiguousarray(M, float)


def default_start(problem: SspProblem) -> PrimalDualPair:
    return PrimalDualPair(problem.xdom.center(), problem.ydom.center())


@dataclass
class SolveInfo:
    iterations: int = 0
    residual: float = 0.0
    eta: float = 0.0
    method: str = "extragradient"


def extragradient_solve(emp: SspProblem, tol: float = 1e-8, max_iters: int = 200_000,
                        z0: PrimalDualPair | None = None, info: SolveInfo | None = None) -> PrimalDualPair:
    """Deterministic (mirror-)extragradient to a gradient-mapping norm of ``tol``.

    Euclidean blocks take exact quadratic-prox steps followed by a projection;
    entropic simplex blocks take multiplicative steps in log space. The step
    size is 1/(2L) with L from :func:`operator_lipschitz`.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    dx, dy = emp.dims
    bx = aggregate_terms(emp.xterms, dx)
    by = aggregate_terms(emp.yterms, dy)
    gx, gy = _geometry(emp.xdom, bx), _geometry(emp.ydom, by)
    L = operator_lipschitz(emp)
    eta = 1.0 / (2.0 * L) if L > 0 else 1.0
    z0 = default_start(emp) if z0 is None else z0
    x0 = emp.xdom.project(z0.x)
    y0 = emp.ydom.project(z0.y)
    d = emp.data
    x, y, it, res, ok = kernels.eg_solve(
        _dense_or_empty(d.Q, dx), _dense_or_empty(d.R, dy), np.ascontiguousarray(d.B, float),
        d.a, d.b, *_kernel_block(emp.xdom, bx, gx), *_kernel_block(emp.ydom, by, gy),
        x0, y0, eta, tol, int(max_iters))
    if info is not None:
        info.iterations, info.residual, info.eta = int(it), float(res), eta
    if not ok:
        raise ConvergenceError(f"extragradient stopped at residual {res:.3e} after {it} iterations",
                               last=PrimalDualPair(x, y), residual=res, iterations=it)
    return PrimalDualPair(x, y)


def gradient_mapping_norm(problem: SspProblem, z: PrimalDualPair, eta: float | None = None) -> float:
    """|z - T(z)| / eta for one extragradient half-step T; zero exactly at the saddle."""
    dx, dy = problem.dims
    bx = aggregate_terms(problem.xterms, dx)
    by = aggregate_terms(problem.yterms, dy)
    gx, gy = _geometry(problem.xdom, bx), _geometry(problem.ydom, by)
    if eta is None:
        L = operator_lipschitz(problem)
        eta = 1.0 / (2.0 * L) if L > 0 else 1.0
    d = problem.data
    _, _, _, res, _ = kernels.eg_solve(
        _dense_or_empty(d.Q, dx), _dense_or_empty(d.R, dy), np.ascontiguousarray(d.B, float),
        d.a, d.b, *_kernel_block(problem.xdom, bx, gx), *_kernel_block(problem.ydom, by, gy),
        np.asarray(z.x, float), np.asarray(z.y, float), eta, 0.0, 1)
    return float(res)


def solve_exact(problem: SspProblem, tol: float = 1e-11, max_iters: int = 2_000_000,
                z0: PrimalDualPair | None = None) -> PrimalDualPair:
    """Saddle of the deterministic problem: linear solve when possible, else tight extragradient."""
    if _linear_ok(problem):
        return linear_saddle(problem)
    return extragradient_solve(problem, tol, max_iters, z0)


def _linear_ok(problem: SspProblem) -> bool:
    if problem.constrained:
        return False
    dx, dy = problem.dims
    return aggregate_terms(problem.xterms, dx).W == 0 and aggregate_terms(problem.yterms, dy).W == 0


# ---------------------------------------------------------------- SAA

def saa_solve(problem: SspProblem, n: int, lambda_x: float = 0.0, center_x=None,
              lambda_y: float = 0.0, center_y=None, rng=None, *, inner_tol: float = 1e-8,
              inner_max_iters: int = 200_000, method: str = "auto",
              z0: PrimalDualPair | None = None, prox_kind_x: str | None = None,
              prox_kind_y: str | None = None, counter: CallCounter | None = None,
              info: SolveInfo | None = None) -> PrimalDualPair:
    """Empirical saddle of n samples with optional proximal terms.

    ``method`` is ``extragradient``, ``linear`` (unconstrained problems with
    quadratic terms only) or ``auto``, which prefers the linear solve.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    rng = np.random.default_rng() if rng is None else rng
    ctx = problem
    if lambda_x or lambda_y:
        ctx = perturb(problem, lambda_x, center_x, lambda_y, center_y,
                      prox_kind_y or auto_prox_kind(problem, "y"),
                      prox_kind_x or auto_prox_kind(problem, "x"))
    emp = EmpiricalProblem.draw(ctx, n, rng)
    if counter is not None:
        counter.add_oracle(n)
    use_linear = method == "linear" or (method == "auto" and _linear_ok(emp))
    if use_linear:
        if info is not None:
            info.method = "linear"
        return linear_saddle(emp)
    if method not in ("auto", "extragradient"):
        raise DomainError(f"unknown method {method!r}")
    return extragradient_solve(emp, inner_tol, inner_max_iters, z0, info)


def robust_saa(problem: SspProblem, n: int, m: int, lambda_x: float = 0.0, center_x=None,
               lambda_y: float = 0.0, center_y=None, rng=None, **kw) -> PrimalDualPair:
    """m independent SAA solves; x and y are selected by separate Euclidean extracts."""
    if m < 1:
        raise DomainError("m must be at least 1")
    rng = np.random.default_rng() if rng is None else rng
    sols = [saa_solve(problem, n, lambda_x, center_x, lambda_y, center_y, child, **kw)
            for child in rng.spawn(m)]
    return select_separately(sols)


def select_separately(sols) -> PrimalDualPair:
    xs = np.stack([s.x for s in sols])
    ys = np.stack([s.y for s in sols])
    return PrimalDualPair(xs[extract(xs).indices[0]].copy(), ys[extract(ys).indices[0]].copy())


def select_jointly(sols) -> PrimalDualPair:
    Z = np.stack([np.concatenate([s.x, s.y]) for s in sols])
    k = extract(Z).indices[0]
    return sols[k].copy()


# ---------------------------------------------------------------- SPEG

def kl_prox_step(center, grad, weight: float = 1.0) -> np.ndarray:
    """argmin_y <grad, y> + weight * KL(y | center) over the simplex."""
    c = np.asarray(center, dtype=float)
    t = np.log(np.maximum(c, 1e-300)) - np.asarray(grad, dtype=float) / weight
    t -= t.max()
    e = np.exp(t)
    return e / e.sum()


def default_speg_eta(problem: SspProblem, iters: int) -> float:
    scale = float(np.max(np.abs(problem.data.B)))
    return 1.0 / (2.0 * max(scale, 1e-12) * math.sqrt(iters))


def speg_solve(problem: SspProblem, iters: int, batch: int, eta: float | None = None, rng=None,
               z0: PrimalDualPair | None = None, counter: CallCounter | None = None,
               chunk: int = 256) -> PrimalDualPair:
    """Stochastic mirror-prox with KL steps on two simplices; returns the iterate average.

    Each iteration draws two independent mini-batch payoff means, one for
    the extrapolation step and one for the update. ``eta`` is the step size.
    """
    if not (isinstance(problem.xdom, Simplex) and isinstance(problem.ydom, Simplex)):
        raise CapabilityError("SPEG needs simplex domains on both blocks")
    d = problem.data
    if d.Q is not None or d.R is not None or np.any(d.a) or np.any(d.b):
        raise CapabilityError("SPEG needs a purely bilinear random part")
    if iters < 1 or batch < 1:
        raise DomainError("iters and batch must be positive")
    dx, dy = problem.dims
    bx = aggregate_terms(problem.xterms, dx)
    by = aggregate_terms(problem.yterms, dy)
    if bx.wq > 0 or by.wq > 0:
        raise CapabilityError("SPEG supports entropy and KL terms only")
    eta = default_speg_eta(problem, iters) if eta is None else float(eta)
    rng = np.random.default_rng() if rng is None else rng
    z0 = default_start(problem) if z0 is None else z0
    x, y = z0.x.copy(), z0.y.copy()
    sx = np.zeros(dx)
    sy = np.zeros(dy)
    done = 0
    while done < iters:
        k = min(chunk, iters - done)
        B1, B2 = _payoff_batches(problem, batch, k, rng)
        x, y = kernels.speg_run(B1, B2, x, y, bx.W, bx.l, by.W, by.l, eta, sx, sy)
        done += k
    if counter is not None:
        counter.add_oracle(2 * batch * iters)
    return PrimalDualPair(sx / iters, sy / iters)


def _payoff_batches(problem, batch, count, rng):
    noise = problem.noise
    if noise is None:
        B = np.broadcast_to(problem.data.B, (count,) + problem.data.B.shape)
        return np.ascontiguousarray(B), np.ascontiguousarray(B)
    if hasattr(noise, "mean_matrix"):
        return noise.mean_matrix(batch, rng, count), noise.mean_matrix(batch, rng, count)
    B1 = np.stack([noise.draw_mean(batch, rng).B for _ in range(count)])
    B2 = np.stack([noise.draw_mean(batch, rng).B for _ in range(count)])
    return B1, B2


# ---------------------------------------------------------------- MOGDA

@dataclass
class MogdaStage:
    eta: float
    length: int


@dataclass
class MogdaPlan:
    stages: list = field(default_factory=list)

    @property
    def samples(self) -> int:
        return sum(s.length for s in self.stages)


def mogda_schedule(L: float, mu: float, sigma2: float, init_sq_dist: float, target: float,
                   c_decay: float = 1.0, c_noise: float = 0.1, eta0: float | None = None,
                   max_stages: int = 60) -> MogdaPlan:
    """A-priori stage plan whose modelled error E|z - z*|^2 falls below ``target``.

    The error model is exp(-c_decay eta mu K) * start + c_noise eta sigma2 / mu.
    Stage 0 uses eta0 = 1/(4L) long enough to shrink the initial distance to
    target/2; each later stage halves the step, doubles the length, and the
    plan stops once the noise floor is at most target/2.
    """
    if target <= 0 or mu <= 0 or L <= 0:
        raise DomainError("need positive target, mu and L")
    eta_max = 1.0 / (4.0 * L)
    eta0 = eta_max if eta0 is None else eta0
    plan = MogdaPlan()
    eta = min(eta_max, eta0)
    K0 = math.ceil(math.log(max(2.0 * init_sq_dist / target, 1.0)) / (c_decay * eta * mu))
    plan.stages.append(MogdaStage(eta, max(K0, 1)))
    s = 0
    while c_noise * eta * sigma2 / mu > target / 2:
        s += 1
        if s > max_stages:
            raise DomainError("stage limit reached; target too small")
        eta = min(eta_max, eta0 * 2.0**-s)
        plan.stages.append(MogdaStage(eta, max(1, math.ceil(math.log(4.0) / (c_decay * eta * mu)))))
    return plan


def _mean_operator(problem):
    dx, dy = problem.dims
    bx = aggregate_terms(problem.xterms, dx)
    by = aggregate_terms(problem.yterms, dy)
    d = problem.data
    M = np.zeros((dx + dy, dx + dy))
    M[:dx, :dx] = d.dense_Q() + bx.wq * np.eye(dx)
    M[:dx, dx:] = d.B
    M[dx:, :dx] = -d.B.T
    M[dx:, dx:] = d.dense_R() + by.wq * np.eye(dy)
    return M, bx, by


def mogda_solve(problem: SspProblem, target_sq_dist: float, z0: PrimalDualPair | None = None,
                rng=None, *, init_sq_dist: float | None = None, c_decay: float = 1.0,
                c_noise: float = 0.1, counter: CallCounter | None = None,
                plan_out: list | None = None) -> PrimalDualPair:
    """Multistage stochastic optimistic GDA with one sample per step.

    ``init_sq_dist`` bounds |z0 - z*|^2; when omitted it is estimated from a
    100-sample gradient at z0 as (|F| + sigma/10)^2 / mu^2.
    """
    if problem.constrained:
        raise CapabilityError("MOGDA runs on unconstrained problems only")
    noise = problem.noise
    if noise is not None and not hasattr(noise, "linear_noise"):
        raise CapabilityError("MOGDA needs additive noise on the linear coefficients")
    rng = np.random.default_rng() if rng is None else rng
    M, bx, by = _mean_operator(problem)
    if bx.W > 0 or by.W > 0:
        raise CapabilityError("entropic terms need simplex domains")
    sym = 0.5 * (M + M.T)
    mu = float(np.linalg.eigvalsh(sym).min())
    if mu <= 0:
        raise CapabilityError("MOGDA needs a strongly monotone problem")
    L = float(np.linalg.norm(M, 2))
    cst = problem.constants
    sigma2 = 0.0 if noise is None else sum(cst.require("sigma_x", "sigma_y")[i] ** 2 for i in (0, 1))
    z0 = default_start(problem) if z0 is None else z0
    x, y = z0.x.copy(), z0.y.copy()
    used = 0
    if init_sq_dist is None:
        nb = 100
        xi = problem.sample_mean(nb, rng)
        gx, gy = problem.sample_grad(xi, x, y)
        F = math.sqrt(float(gx @ gx + gy @ gy))
        init_sq_dist = (F + math.sqrt(sigma2 / nb)) ** 2 / mu**2
        used += nb if noise is not None else 0
    plan = mogda_schedule(L, mu, sigma2, init_sq_dist, target_sq_dist, c_decay, c_noise)
    if plan_out is not None:
        plan_out.append(plan)
    d = problem.data
    dx, dy = problem.dims
    Q, R = _dense_or_empty(d.Q, dx), _dense_or_empty(d.R, dy)
    B = np.ascontiguousarray(d.B, float)
    for st in plan.stages:
        if noise is None:
            nx, ny = np.zeros((st.length, dx)), np.zeros((st.length, dy))
        else:
            nx, ny = noise.linear_noise(st.length, rng)
            used += st.length
        x, y = kernels.ogda_run(Q, R, B, d.a, d.b, bx.wq, bx.s, by.wq, by.s, nx, ny, x, y, st.eta)
    if counter is not None:
        counter.add_oracle(used)
    return PrimalDualPair(x, y)
