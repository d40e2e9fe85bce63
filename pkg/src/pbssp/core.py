"""Saddle functions, candidate solutions, exact gaps and proximal wrappers.

Every problem in this package shares one structure::

    Phi(x, y) = 1/2 x'Qx + x'By - 1/2 y'Ry + a'x + b'y + c + h_x(x) - h_y(y)

where (Q, R, B, a, b, c) is the *data* part, which may be random, and
h_x, h_y are sums of deterministic separable terms (quadratic, entropy or
KL). Because Phi_xi is affine in the random data, the mean of n sampled
objectives is again of this form, and best responses have closed forms on
the supported domains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, xlogy

from .constants import ProblemConstants
from .domains import FEAS_TOL, Box, Reals, Simplex, proj_simplex
from .errors import CapabilityError, DomainError

QUADRATIC = "quadratic"
ENTROPY = "entropy"
KL = "kl"


@dataclass(frozen=True)
class Term:
    """A separable regularizer ``weight * D(z, center)`` on one block.

    quadratic: (w/2)|z - c|^2 (c defaults to 0); entropy: w sum z log z;
    kl: w sum z log(z/c).
    """

    kind: str
    weight: float
    center: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (QUADRATIC, ENTROPY, KL):
            raise DomainError(f"unknown term kind {self.kind!r}")
        if self.weight < 0:
            raise DomainError("term weight must be nonnegative")
        if self.kind == KL:
            if self.center is None:
                raise DomainError("KL term needs a center")
            if np.any(np.asarray(self.center) <= 0):
                raise DomainError("KL center must be strictly positive")

    def value(self, z):
        w = self.weight
        if self.kind == QUADRATIC:
            d = z if self.center is None else z - self.center
            return 0.5 * w * float(d @ d)
        if self.kind == ENTROPY:
            return w * float(np.sum(xlogy(z, z)))
        return w * float(np.sum(xlogy(z, z) - xlogy(z, self.center)))

    def grad(self, z):
        w = self.weight
        if self.kind == QUADRATIC:
            return w * (z if self.center is None else z - self.center)
        with np.errstate(divide="ignore"):
            lz = np.log(z)
        if self.kind == ENTROPY:
            return w * (1.0 + lz)
        return w * (1.0 + lz - np.log(self.center))


@dataclass(frozen=True)
class BlockTerms:
    """Aggregated view of a block's terms used by solvers.

    sum_k terms_k(z) = (wq/2)|z|^2 - <s, z> + W sum z log z - <l, z> + const.
    """

    wq: float
    s: np.ndarray
    W: float
    l: np.ndarray

    @property
    def entropic(self) -> bool:
        return self.W > 0


def aggregate_terms(terms, dim: int) -> BlockTerms:
    wq, W = 0.0, 0.0
    s = np.zeros(dim)
    l = np.zeros(dim)
    for t in terms:
        if t.kind == QUADRATIC:
            wq += t.weight
            if t.center is not None:
                s += t.weight * t.center
        else:
            W += t.weight
            if t.kind == KL:
                l += t.weight * np.log(t.center)
    return BlockTerms(wq, s, W, l)


class SaddleData:
    """The random part of Phi: quadratic, bilinear and linear coefficients.

    ``Q`` and ``R`` may be None (zero), a 1-d array (diagonal) or a dense
    matrix.
    """

    __slots__ = ("Q", "R", "B", "a", "b", "c")

    def __init__(self, B, a=None, b=None, Q=None, R=None, c: float = 0.0):
        self.B = np.asarray(B, dtype=float)
        dx, dy = self.B.shape
        self.a = np.zeros(dx) if a is None else np.asarray(a, dtype=float)
        self.b = np.zeros(dy) if b is None else np.asarray(b, dtype=float)
        self.Q = None if Q is None else np.asarray(Q, dtype=float)
        self.R = None if R is None else np.asarray(R, dtype=float)
        self.c = float(c)

    @staticmethod
    def _quad(M, z):
        if M is None:
            return 0.0
        if M.ndim == 1:
            return float(np.dot(M * z, z))
        return float(z @ (M @ z))

    @staticmethod
    def _mv(M, z):
        if M is None:
            return np.zeros_like(z)
        return M * z if M.ndim == 1 else M @ z

    def value(self, x, y):
        return (0.5 * self._quad(self.Q, x) + float(x @ (self.B @ y))
                - 0.5 * self._quad(self.R, y) + float(self.a @ x) + float(self.b @ y) + self.c)

    def grad(self, x, y):
        gx = self._mv(self.Q, x) + self.B @ y + self.a
        gy = self.B.T @ x - self._mv(self.R, y) + self.b
        return gx, gy

    def dense_Q(self):
        return _dense(self.Q, self.B.shape[0])

    def dense_R(self):
        return _dense(self.R, self.B.shape[1])

    def copy(self):
        return SaddleData(self.B.copy(), self.a.copy(), self.b.copy(),
                          None if self.Q is None else self.Q.copy(),
                          None if self.R is None else self.R.copy(), self.c)


def _dense(M, d):
    if M is None:
        return np.zeros((d, d))
    return np.diag(M) if M.ndim == 1 else M


def mean_data(samples) -> SaddleData:
    """Average a sequence of SaddleData coefficient-wise."""
    samples = list(samples)
    n = len(samples)

    def avg(attr):
        vals = [getattr(s, attr) for s in samples]
        if vals[0] is None:
            return None
        return sum(vals[1:], vals[0].copy()) / n

    return SaddleData(avg("B"), avg("a"), avg("b"), avg("Q"), avg("R"),
                      sum(s.c for s in samples) / n)


@dataclass
class PrimalDualPair:
    """A candidate solution (x, y)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)

    def __iter__(self):
        yield self.x
        yield self.y

    def copy(self):
        return PrimalDualPair(self.x.copy(), self.y.copy())


@dataclass
class GapReport:
    gap: float
    weak_gap: float | None = None
    primal_gap: float | None = None
    dual_gap: float | None = None
    primal_value: float = math.nan
    dual_value: float = math.nan


class NoiseModel:
    """Interface for the sampler of the random data.

    Subclasses implement :meth:`draw_mean`, the exact law of the coefficient
    mean of ``n`` i.i.d. samples. ``draw`` is the single-sample case.
    """

    def draw_mean(self, n: int, rng: np.random.Generator) -> SaddleData:
        raise NotImplementedError

    def draw(self, rng: np.random.Generator) -> SaddleData:
        return self.draw_mean(1, rng)


class SspProblem:
    """A stochastic saddle problem min_{x in X} max_{y in Y} E[Phi_xi(x, y)].

    Parameters
    ----------
    data : SaddleData
        Expected coefficients, used by all exact evaluators.
    xdom, ydom : Reals, Box or Simplex
    xterms, yterms : sequence of Term
        Deterministic regularizers, added for x and subtracted for y.
    constants : ProblemConstants
    noise : NoiseModel or None
        None means the problem is deterministic.
    saddle : PrimalDualPair or None
        Known saddle point, enabling weak gaps.
    """

    def __init__(self, data: SaddleData, xdom, ydom, xterms=(), yterms=(),
                 constants: ProblemConstants | None = None, noise: NoiseModel | None = None,
                 saddle: PrimalDualPair | None = None, name: str = "ssp",
                 gap_inflation: float = 0.0, base_gap_problem: SspProblem | None = None):
        self.data = data
        self.xdom = xdom
        self.ydom = ydom
        self.xterms = tuple(xterms)
        self.yterms = tuple(yterms)
        self.constants = constants or ProblemConstants()
        self.noise = noise
        self.saddle = saddle
        self.name = name
        self.gap_inflation = float(gap_inflation)
        self.original = base_gap_problem
        if data.B.shape != (xdom.dim, ydom.dim):
            raise DomainError("coupling shape does not match domains")

    # ---- shape and feasibility
    @property
    def dims(self):
        return self.xdom.dim, self.ydom.dim

    @property
    def constrained(self) -> bool:
        return not (isinstance(self.xdom, Reals) and isinstance(self.ydom, Reals))

    def project_x(self, x):
        return self.xdom.project(x)

    def project_y(self, y):
        return self.ydom.project(y)

    def check_feasible(self, z: PrimalDualPair):
        if not self.xdom.contains(z.x):
            raise DomainError("x is not feasible")
        if not self.ydom.contains(z.y):
            raise DomainError("y is not feasible")

    # ---- exact evaluators
    def _terms_value(self, x, y, data: SaddleData):
        v = data.value(x, y)
        for t in self.xterms:
            v += t.value(x)
        for t in self.yterms:
            v -= t.value(y)
        return v

    def value(self, x, y) -> float:
        return self._terms_value(np.asarray(x, float), np.asarray(y, float), self.data)

    def grad(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        gx, gy = self.data.grad(x, y)
        for t in self.xterms:
            gx = gx + t.grad(x)
        for t in self.yterms:
            gy = gy - t.grad(y)
        return gx, gy

    def best_y(self, x):
        """argmax_y Phi(x, y) over Y."""
        x = np.asarray(x, float)
        v = self.data.B.T @ x + self.data.b
        return block_argmin(-v, self.data.R, self.yterms, self.ydom)

    def best_x(self, y):
        """argmin_x Phi(x, y) over X."""
        y = np.asarray(y, float)
        u = self.data.B @ y + self.data.a
        return block_argmin(u, self.data.Q, self.xterms, self.xdom)

    def inner_max(self, x) -> float:
        return self.value(x, self.best_y(x))

    def inner_min(self, y) -> float:
        return self.value(self.best_x(y), y)

    @property
    def saddle_value(self) -> float:
        if self.saddle is None:
            raise CapabilityError("saddle point unknown")
        return self.value(self.saddle.x, self.saddle.y)

    # ---- sampling
    def sample(self, rng) -> SaddleData:
        """One random coefficient set; deterministic problems return their mean."""
        return self.data if self.noise is None else self.noise.draw(rng)

    def sample_mean(self, n: int, rng) -> SaddleData:
        if n < 1:
            raise DomainError("sample size must be at least 1")
        return self.data if self.noise is None else self.noise.draw_mean(n, rng)

    def sample_value(self, xi: SaddleData, x, y) -> float:
        return self._terms_value(np.asarray(x, float), np.asarray(y, float), xi)

    def sample_grad(self, xi: SaddleData, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        gx, gy = xi.grad(x, y)
        for t in self.xterms:
            gx = gx + t.grad(x)
        for t in self.yterms:
            gy = gy - t.grad(y)
        return gx, gy

    # ---- derived problems
    def with_data(self, data: SaddleData, name: str | None = None) -> SspProblem:
        """Same terms and domains, deterministic, with the given coefficients."""
        return SspProblem(data, self.xdom, self.ydom, self.xterms, self.yterms,
                          self.constants, None, None, name or self.name + "/empirical",
                          self.gap_inflation, self.original)

    def with_saddle(self, saddle: PrimalDualPair | None) -> SspProblem:
        p = self._clone()
        p.saddle = saddle
        return p

    def with_constants(self, constants: ProblemConstants) -> SspProblem:
        p = self._clone()
        p.constants = constants
        return p

    def _clone(self):
        p = object.__new__(type(self))
        p.__dict__.update(self.__dict__)
        return p

    def gap_target(self) -> SspProblem:
        """The problem whose gap is reported: the unregularized original if any."""
        return self.original if self.original is not None else self


def block_argmin(u, curv, terms, dom):
    """argmin_z <u, z> + 1/2 z'curv z + sum terms(z) over ``dom`` in closed form."""
    d = dom.dim
    bt = aggregate_terms(terms, d)
    lin = u - bt.s - bt.l
    has_curv = curv is not None and np.any(curv != 0)
    if isinstance(dom, Simplex):
        if has_curv:
            raise CapabilityError("curvature on a simplex block has no closed-form best response")
        if bt.W > 0 and bt.wq > 0:
            raise CapabilityError("mixed quadratic and entropic terms on one block")
        if bt.W > 0:
            t = -lin / bt.W
            return np.exp(t - logsumexp(t))
        if bt.wq > 0:
            return proj_simplex(-lin / bt.wq)
        z = np.zeros(d)
        z[int(np.argmin(lin))] = 1.0
        return z
    if bt.W > 0:
        raise CapabilityError("entropic terms need a simplex block")
    if isinstance(dom, Box):
        if curv is None:
            diag = np.zeros(d)
        elif curv.ndim == 1:
            diag = curv
        else:
            off = curv - np.diag(np.diag(curv))
            if np.any(off != 0):
                raise CapabilityError("box best response needs diagonal curvature")
            diag = np.diag(curv)
        den = diag + bt.wq
        z = np.empty(d)
        pos = den > 0
        z[pos] = np.clip(-lin[pos] / den[pos], dom.lo[pos], dom.hi[pos])
        z[~pos] = np.where(lin[~pos] > 0, dom.lo[~pos], dom.hi[~pos])
        return z
    M = _dense(curv, d) + bt.wq * np.eye(d)
    try:
        return np.linalg.solve(M, -lin)
    except np.linalg.LinAlgError as exc:
        raise CapabilityError("unbounded best response on an unconstrained block") from exc


# ---------------------------------------------------------------- gaps

def eval_gap(problem: SspProblem, z: PrimalDualPair) -> GapReport:
    """Duality gap, plus weak/primal/dual gaps when the saddle is known."""
    problem.check_feasible(z)
    fx = problem.inner_max(z.x)
    gy = problem.inner_min(z.y)
    rep = GapReport(gap=fx - gy, primal_value=fx, dual_value=gy)
    if problem.saddle is not None:
        s = problem.saddle
        v = problem.value(s.x, s.y)
        rep.weak_gap = problem.value(z.x, s.y) - problem.value(s.x, z.y)
        rep.primal_gap = fx - v
        rep.dual_gap = v - gy
    return rep


def eval_weak_gap(problem: SspProblem, z: PrimalDualPair) -> float:
    if problem.saddle is None:
        raise CapabilityError("weak gap needs a known saddle point")
    s = problem.saddle
    return problem.value(z.x, s.y) - problem.value(s.x, z.y)


# ---------------------------------------------------------------- perturbation

class PerturbedProblem(SspProblem):
    """``base`` plus (lambda_x) D(x, center_x) and minus (lambda_y) D(y, center_y).

    D is (1/2)|.|^2 for quadratic proximity and KL(.|center) otherwise.
    """

    def __init__(self, base: SspProblem, lambda_x: float = 0.0, center_x=None,
                 lambda_y: float = 0.0, center_y=None, prox_kind_y: str = QUADRATIC,
                 prox_kind_x: str = QUADRATIC):
        if lambda_x < 0 or lambda_y < 0:
            raise DomainError("perturbation amplitudes must be nonnegative")
        for kind, dom, which in ((prox_kind_x, base.xdom, "x"), (prox_kind_y, base.ydom, "y")):
            if kind not in (QUADRATIC, KL):
                raise DomainError(f"unknown proximity kind {kind!r}")
            if kind == KL and not isinstance(dom, Simplex):
                raise CapabilityError(f"KL proximity needs a simplex {which}-domain")
        if lambda_x == 0:
            center_x = None
        if lambda_y == 0:
            center_y = None
        if lambda_x > 0 and center_x is None:
            raise DomainError("positive lambda_x needs a center")
        if lambda_y > 0 and center_y is None:
            raise DomainError("positive lambda_y needs a center")
        xterms, yterms = base.xterms, base.yterms
        if center_x is not None:
            center_x = np.asarray(center_x, float).copy()
            if not base.xdom.contains(center_x, 1e-9):
                raise DomainError("center_x is not feasible")
            xterms = xterms + (_prox_term(prox_kind_x, lambda_x, center_x),)
        if center_y is not None:
            center_y = np.asarray(center_y, float).copy()
            if not base.ydom.contains(center_y, 1e-9):
                raise DomainError("center_y is not feasible")
            yterms = yterms + (_prox_term(prox_kind_y, lambda_y, center_y),)
        super().__init__(base.data, base.xdom, base.ydom, xterms, yterms,
                         base.constants.shifted(lambda_x, lambda_y), base.noise, None,
                         base.name + "/perturbed", base.gap_inflation, base.original)
        self.base = base
        self.lambda_x = float(lambda_x)
        self.lambda_y = float(lambda_y)
        self.center_x = center_x
        self.center_y = center_y
        self.prox_kind_x = prox_kind_x
        self.prox_kind_y = prox_kind_y


def _prox_term(kind, lam, center):
    return Term(QUADRATIC, lam, center) if kind == QUADRATIC else Term(KL, lam, center)


def perturb(problem: SspProblem, lambda_x: float = 0.0, center_x=None, lambda_y: float = 0.0,
            center_y=None, prox_kind_y: str = QUADRATIC, prox_kind_x: str = QUADRATIC) -> PerturbedProblem:
    """Add proximal terms around the given centers; see :class:`PerturbedProblem`."""
    return PerturbedProblem(problem, lambda_x, center_x, lambda_y, center_y, prox_kind_y, prox_kind_x)


def auto_prox_kind(problem: SspProblem, which: str) -> str:
    """KL proximity on entropic simplex blocks, quadratic elsewhere."""
    dom, terms = (problem.xdom, problem.xterms) if which == "x" else (problem.ydom, problem.yterms)
    bt = aggregate_terms(terms, dom.dim)
    return KL if isinstance(dom, Simplex) and bt.W > 0 else QUADRATIC


# ---------------------------------------------------------------- C-C wrapper

def cc_regularize(problem: SspProblem, epsilon: float, anchor: PrimalDualPair | None = None,
                  prox_kind_y: str = QUADRATIC, prox_kind_x: str = QUADRATIC) -> SspProblem:
    """Make a convex-concave problem strongly convex-concave at gap cost <= epsilon/2.

    Quadratic terms use alpha = epsilon / (2 D^2) around the anchor; entropy
    terms on simplex blocks use weight epsilon / (4 log dim). The returned
    problem records ``gap_inflation``, an upper bound on how much smaller its
    gap can be than the original's, and keeps a reference to the original
    for scoring.
    """
    if epsilon < 0:
        raise DomainError("epsilon must be nonnegative")
    cst = problem.constants
    D_x, D_y = cst.require("D_x", "D_y")
    if not (math.isfinite(D_x) and math.isfinite(D_y)):
        raise CapabilityError("regularization needs finite diameters")
    if epsilon == 0:
        return problem
    ax = anchor.x if anchor is not None else None
    ay = anchor.y if anchor is not None else None
    xterms, yterms = list(problem.xterms), list(problem.yterms)
    inflation = 0.0
    upd = {}

    def add(kind, dom, D, center, terms, mu_name):
        nonlocal inflation
        if kind == QUADRATIC:
            w = epsilon / (2 * D**2)
            terms.append(Term(QUADRATIC, w, None if center is None else np.asarray(center, float)))
            inflation += 0.5 * w * D**2
        elif kind == ENTROPY:
            if not isinstance(dom, Simplex) or dom.dim < 2:
                raise CapabilityError("entropy regularization needs a simplex of dimension >= 2")
            w = epsilon / (4 * math.log(dom.dim))
            terms.append(Term(ENTROPY, w))
            inflation += w * math.log(dom.dim)
        else:
            raise DomainError(f"unknown regularizer kind {kind!r}")
        mu_old = getattr(cst, mu_name) or 0.0
        upd[mu_name] = mu_old + w
        return w

    wx = add(prox_kind_x, problem.xdom, D_x, ax, xterms, "mu_x")
    wy = add(prox_kind_y, problem.ydom, D_y, ay, yterms, "mu_y")
    for L_name, w in (("L_x", wx), ("L_y", wy)):
        v = getattr(cst, L_name)
        upd[L_name] = (v or 0.0) + w
    out = SspProblem(problem.data, problem.xdom, problem.ydom, xterms, yterms,
                     cst.with_values(**upd), problem.noise, None, problem.name + "/regularized",
                     problem.gap_inflation + inflation, problem.gap_target())
    out.reg_weights = (wx, wy)
    return out


def is_feasible(problem: SspProblem, z: PrimalDualPair, tol: float = FEAS_TOL) -> bool:
    return problem.xdom.contains(z.x, tol) and problem.ydom.contains(z.y, tol)


def linear_saddle(problem: SspProblem, data: SaddleData | None = None) -> PrimalDualPair:
    """Exact saddle of an unconstrained problem with only quadratic terms.

    Solves the stationarity system of ``problem`` (optionally with other
    coefficients ``data``) directly.
    """
    if problem.constrained:
        raise CapabilityError("linear solve needs unconstrained domains")
    data = problem.data if data is None else data
    dx, dy = problem.dims
    bx = aggregate_terms(problem.xterms, dx)
    by = aggregate_terms(problem.yterms, dy)
    if bx.W > 0 or by.W > 0:
        raise CapabilityError("entropic terms need simplex domains")
    K = np.zeros((dx + dy, dx + dy))
    K[:dx, :dx] = data.dense_Q() + bx.wq * np.eye(dx)
    K[:dx, dx:] = data.B
    K[dx:, :dx] = data.B.T
    K[dx:, dx:] = -(data.dense_R() + by.wq * np.eye(dy))
    rhs = np.concatenate([bx.s - data.a, -data.b - by.s])
    z = np.linalg.solve(K, rhs)
    return PrimalDualPair(z[:dx], z[dx:])
