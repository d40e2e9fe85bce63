"""Proximal boosting drivers, the robust-distance baselines and their schedules.

The generic driver runs T+1 rounds on two independent streams. Round i of
the x-stream solves Phi plus (lambda_x^{i-1}/2)|x - x_{i-1}^c|^2 to a small
distance with high probability; the final round certifies a small function
gap of the last perturbed problem. Concrete variants differ only in the
oracles they plug in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .accounting import CallCounter
from .constants import ProblemConstants
from .core import PrimalDualPair, SspProblem, auto_prox_kind, perturb
from .errors import CapabilityError, DomainError, InvariantError
from .oracles import mogda_solve, robust_saa, saa_solve, select_jointly, select_separately, solve_exact
from .robust import ceil_safe, function_gap_select, gradient_batch_size

UNCONSTRAINED = "unconstrained"
CONSTRAINED = "constrained"
M_BOUND = 138 + 36 * math.sqrt(2)


# ---------------------------------------------------------------- calculators

def rounds_for(ratio: float, nu: float) -> int:
    """Smallest integer T >= 0 with nu^T >= ratio."""
    if nu <= 1:
        raise DomainError("nu must exceed 1")
    T = 0
    while nu**T < ratio * (1 - 1e-12):
        T += 1
    return T


def trial_count(T: int, p: float, constrained: bool = False) -> int:
    """m = ceil(18 ln((2T+4)/p)); the constrained form uses 2T+6 and is made odd."""
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    if constrained:
        m = ceil_safe(18 * math.log((2 * T + 6) / p))
        return m if m % 2 else m + 1
    return ceil_safe(18 * math.log((2 * T + 4) / p))


def saa_round_size(C: float, L_xy: float, mu_own: float, mu_other: float, lam: float, delta: float) -> int:
    """ceil(432 C L_xy^2 / ((mu_own + lam) mu_other^2 delta))."""
    return max(1, ceil_safe(432 * C * L_xy**2 / ((mu_own + lam) * mu_other**2 * delta)))


def saa_final_size(C, L_xy, L_own, mu_own, mu_other, lam, delta) -> int:
    """Final-round size: the round size inflated by (L_xy^2/mu_other + L_own + lam)/(mu_own + lam)."""
    factor = (L_xy**2 / mu_other + L_own + lam) / (mu_own + lam)
    return max(1, ceil_safe(factor * 432 * C * L_xy**2 / ((mu_own + lam) * mu_other**2 * delta)))


def saa_c_round_size(ell_x, ell_y, mu_x, mu_y, lam_x, lam_y, delta) -> int:
    """ceil((54/delta)(ell_x^2/(mu_x+lam_x) + ell_y^2/(mu_y+lam_y)))."""
    return max(1, ceil_safe(54.0 / delta * (ell_x**2 / (mu_x + lam_x) + ell_y**2 / (mu_y + lam_y))))


def weak_gap_size(ell_x, ell_y, mu_x, mu_y, target) -> int:
    """SAA sample size for expected weak gap at most ``target`` on a constrained problem."""
    return max(1, ceil_safe(2.0 / target * (ell_x**2 / mu_x + ell_y**2 / mu_y)))


def gap_multiplier(L_own, L_xy, mu_own, mu_other, lam) -> float:
    """3 + (18 sqrt2 + 45)(L+lam)/(mu+lam) + 36 L_xy/sqrt((mu+lam) mu') + 9 L_xy^2/((mu+lam) mu')."""
    a = mu_own + lam
    return (3 + (18 * math.sqrt(2) + 45) * (L_own + lam) / a
            + 36 * L_xy / math.sqrt(a * mu_other) + 9 * L_xy**2 / (a * mu_other))


def mogda_round_target(delta, mu_own, lam) -> float:
    return 2 * delta / (27 * (mu_own + lam))


def mogda_final_target(delta, L_xy, L_own, mu_other, lam) -> float:
    return 2 * delta / (27 * (L_xy**2 / mu_other + L_own + lam))


def rde_unconstrained_size(cst: ProblemConstants, target: float) -> int:
    """SAA size with expected weak gap <= target, via the distance rate and the upper bound."""
    mu_x, mu_y, L_xy, C = cst.require("mu_x", "mu_y", "L_xy", "C")
    return max(1, ceil_safe(16 * (cst.L_f + cst.L_g) * C * L_xy**2 / (target * mu_x**2 * mu_y**2)))


# ---------------------------------------------------------------- plan

@dataclass
class PbsspPlan:
    nu: float
    T: int
    delta: float
    m: int
    lambda_x: list
    lambda_y: list
    radii_x: list
    radii_y: list
    mode: str
    epsilon: float
    p: float
    scheme: str
    constants: ProblemConstants
    sample_sizes: dict = field(default_factory=dict)
    M_x: float | None = None
    M_y: float | None = None
    experiment: bool = False

    @property
    def last_round(self) -> str:
        return "function_gap" if self.mode == CONSTRAINED else "distance"

    def lam(self, which: str, i: int) -> float:
        """lambda^i for i >= -1."""
        seq = self.lambda_x if which == "x" else self.lambda_y
        return seq[i + 1]

    def budget(self) -> float:
        """delta (2 + sum_i lam_x^i/(mu_x+lam_x^{i-1}) + lam_y^i/(mu_y+lam_y^{i-1}))."""
        mu_x, mu_y = self.constants.require("mu_x", "mu_y")
        s = 2.0
        for i in range(self.T + 1):
            s += self.lam("x", i) / (mu_x + self.lam("x", i - 1))
            s += self.lam("y", i) / (mu_y + self.lam("y", i - 1))
        return self.delta * s

    def budget_factor(self) -> float:
        return self.budget() / self.delta


def plan_geometric(constants: ProblemConstants, epsilon: float, p: float, mode: str = UNCONSTRAINED,
                   nu: float = 2.0, scheme: str | None = None, *, T: int | None = None,
                   m: int | None = None, delta: float | None = None, n: int | None = None,
                   grad_batch: int | None = None) -> PbsspPlan:
    """Schedule of amplitudes, radii, trial counts and sample sizes.

    Theory mode derives everything from the constants. Passing ``n``
    switches to experiment mode, in which every oracle call uses n samples
    and gradient batches use ``grad_batch`` (default n // 10); T and m may
    then be set freely.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    if mode not in (UNCONSTRAINED, CONSTRAINED):
        raise DomainError(f"unknown mode {mode!r}")
    scheme = scheme or ("saa" if mode == UNCONSTRAINED else "saa_c")
    if scheme not in ("saa", "saa_c", "mogda", "generic"):
        raise DomainError(f"unknown scheme {scheme!r}")
    mu_x, mu_y = constants.require("mu_x", "mu_y")
    if mu_x <= 0 or mu_y <= 0:
        raise CapabilityError("planning needs positive moduli; regularize convex-concave problems first")
    experiment = n is not None
    if T is None:
        L_x, L_y, L_xy = constants.require("L_x", "L_y", "L_xy")
        if mode == UNCONSTRAINED:
            ratio = max((L_xy**2 / mu_y + L_x) / mu_x, (L_xy**2 / mu_x + L_y) / mu_y)
        else:
            ratio = max(L_x / mu_x, L_y / mu_y, L_xy**2 / (mu_x * mu_y))
        T = rounds_for(ratio, nu)
    if T < 0:
        raise DomainError("T must be nonnegative")
    lam_x = [0.0] + [mu_x * nu**i for i in range(T + 1)]
    lam_y = [0.0] + [mu_y * nu**i for i in range(T + 1)]
    if delta is None:
        if nu == 2:
            delta = epsilon / (4 + 4 * T)
        else:
            factor = 2.0 + sum(lam_x[i + 1] / (mu_x + lam_x[i]) + lam_y[i + 1] / (mu_y + lam_y[i])
                               for i in range(T + 1))
            delta = epsilon / factor
    constrained = mode == CONSTRAINED
    if m is None:
        m = trial_count(T, p, constrained)
    if m < 1:
        raise DomainError("m must be positive")
    if constrained and m % 2 == 0:
        raise DomainError("constrained plans need odd m")
    radii_x = [math.sqrt(2 * delta / (mu_x + lam_x[i])) for i in range(T + 1)]
    radii_y = [math.sqrt(2 * delta / (mu_y + lam_y[i])) for i in range(T + 1)]
    plan = PbsspPlan(nu, T, delta, m, lam_x, lam_y, radii_x, radii_y, mode, epsilon, p, scheme,
                     constants, experiment=experiment)
    if constrained and constants.L_x is not None and constants.L_y is not None and constants.L_xy is not None:
        L_x, L_y, L_xy = constants.require("L_x", "L_y", "L_xy")
        plan.M_x = gap_multiplier(L_x, L_xy, mu_x, mu_y, lam_x[-1])
        plan.M_y = gap_multiplier(L_y, L_xy, mu_y, mu_x, lam_y[-1])
    if experiment:
        gb = max(1, n // 10) if grad_batch is None else grad_batch
        plan.sample_sizes = {"x": [n] * (T + 1), "y": [n] * (T + 1), "x_final": n, "y_final": n,
                             "grad_x": gb, "grad_y": gb}
    else:
        plan.sample_sizes = _theory_sizes(plan)
        if nu == 2 and plan.budget() > epsilon * (1 + 1e-12):
            raise InvariantError("plan exceeds its accuracy budget")
    return plan


def _theory_sizes(plan: PbsspPlan) -> dict:
    c = plan.constants
    mu_x, mu_y = c.require("mu_x", "mu_y")
    T, d = plan.T, plan.delta
    out: dict = {}
    try:
        if plan.scheme == "saa":
            C, L_xy, L_x, L_y = c.require("C", "L_xy", "L_x", "L_y")
            out["x"] = [saa_round_size(C, L_xy, mu_x, mu_y, plan.lam("x", i - 1), d) for i in range(T + 1)]
            out["y"] = [saa_round_size(C, L_xy, mu_y, mu_x, plan.lam("y", i - 1), d) for i in range(T + 1)]
            out["x_final"] = saa_final_size(C, L_xy, L_x, mu_x, mu_y, plan.lam("x", T), d)
            out["y_final"] = saa_final_size(C, L_xy, L_y, mu_y, mu_x, plan.lam("y", T), d)
        elif plan.scheme == "saa_c":
            ex, ey, L_x, L_y, sx, sy = c.require("ell_x", "ell_y", "L_x", "L_y", "sigma_x", "sigma_y")
            out["x"] = [saa_c_round_size(ex, ey, mu_x, mu_y, plan.lam("x", i - 1), 0.0, d) for i in range(T + 1)]
            out["y"] = [saa_c_round_size(ex, ey, mu_x, mu_y, 0.0, plan.lam("y", i - 1), d) for i in range(T + 1)]
            lx, ly = plan.lam("x", T), plan.lam("y", T)
            out["x_final"] = weak_gap_size(ex, ey, mu_x + lx, mu_y, d / (3 * plan.M_x))
            out["y_final"] = weak_gap_size(ex, ey, mu_x, mu_y + ly, d / (3 * plan.M_y))
            dGx = (L_x + lx) * math.sqrt(d / plan.M_x / (mu_x + lx))
            dGy = (L_y + ly) * math.sqrt(d / plan.M_y / (mu_y + ly))
            out["grad_x"] = gradient_batch_size(sx, dGx)
            out["grad_y"] = gradient_batch_size(sy, dGy)
        elif plan.scheme == "mogda":
            L_xy, L_x, L_y = c.require("L_xy", "L_x", "L_y")
            out["x"] = [mogda_round_target(d, mu_x, plan.lam("x", i - 1)) for i in range(T + 1)]
            out["y"] = [mogda_round_target(d, mu_y, plan.lam("y", i - 1)) for i in range(T + 1)]
            out["x_final"] = mogda_final_target(d, L_xy, L_x, mu_y, plan.lam("x", T))
            out["y_final"] = mogda_final_target(d, L_xy, L_y, mu_x, plan.lam("y", T))
    except CapabilityError:
        # sizes stay unknown; drivers that need them will fail loudly
        pass
    return out


def total_samples_closed_form(plan: PbsspPlan) -> int:
    """Sum over rounds of m times the per-round sizes, plus gradient batches in constrained mode."""
    s = plan.sample_sizes
    total = plan.m * (sum(s["x"]) + sum(s["y"]) + s["x_final"] + s["y_final"])
    if plan.mode == CONSTRAINED:
        total += plan.m * (s["grad_x"] + s["grad_y"])
    return total


# ---------------------------------------------------------------- generic driver

@dataclass
class RoundContext:
    problem: SspProblem
    round: int
    stream: str
    warm: PrimalDualPair | None
    plan: PbsspPlan
    final: bool = False


@dataclass
class RoundRecord:
    round: int
    stream: str
    lam: float
    radius: float | None
    samples: int
    center: np.ndarray
    saddle: np.ndarray | None = None
    distance: float | None = None
    saddle_pair: PrimalDualPair | None = None
    context: SspProblem | None = None


def pb_ssp_generic(problem: SspProblem, plan: PbsspPlan, round_oracle, final_oracle, rng, *,
                   counter: CallCounter | None = None, telemetry: list | None = None,
                   track: bool = False, start: PrimalDualPair | None = None,
                   prox_kind_x: str | None = None, prox_kind_y: str | None = None) -> PrimalDualPair:
    """Run rounds 0..T and the final round on both streams.

    ``round_oracle(rc, rng)`` and ``final_oracle(rc, rng)`` receive a
    :class:`RoundContext` and return a pair; the x-stream keeps its x and
    the y-stream its y, and each stream passes its pair forward as the next
    warm start. With ``track`` the exact perturbed saddles are computed and
    the achieved distances recorded.
    """
    counter = counter if counter is not None else CallCounter()
    kinds = {"x": prox_kind_x or auto_prox_kind(problem, "x"),
             "y": prox_kind_y or auto_prox_kind(problem, "y")}
    streams = dict(zip(("x", "y"), rng.spawn(2)))
    out = {}
    for s in ("x", "y"):
        center = None
        warm = start
        for i in range(plan.T + 2):
            final = i == plan.T + 1
            lam = plan.lam(s, i - 1)
            if lam == 0 and center is not None:
                raise InvariantError("zero amplitude must come with an absent center")
            if s == "x":
                ctx = perturb(problem, lam, center, 0.0, None, prox_kind_x=kinds["x"], prox_kind_y=kinds["y"])
            else:
                ctx = perturb(problem, 0.0, None, lam, center, prox_kind_x=kinds["x"], prox_kind_y=kinds["y"])
            before = counter.samples
            rc = RoundContext(ctx, i, s, warm, plan, final)
            pair = (final_oracle if final else round_oracle)(rc, streams[s])
            center = pair.x.copy() if s == "x" else pair.y.copy()
            warm = pair
            if telemetry is not None:
                rec = RoundRecord(i, s, lam, None if final else (plan.radii_x if s == "x" else plan.radii_y)[i],
                                  counter.samples - before, center.copy())
                if track:
                    sp = solve_exact(ctx)
                    rec.saddle_pair = sp
                    rec.saddle = (sp.x if s == "x" else sp.y).copy()
                    rec.distance = float(np.linalg.norm(center - rec.saddle))
                rec.context = ctx
                telemetry.append(rec)
        out[s] = center
    return PrimalDualPair(out["x"], out["y"])


def proposition_ledger(problem: SspProblem, plan: PbsspPlan, telemetry: list, which: str = "x"):
    """Both sides of the proximal-point decomposition for one stream.

    Returns (lhs, rhs) with lhs = f(x_{T+1}^c) - f(x*) and
    rhs = f^T(x_{T+1}^c) - f^T(x*_{T+1}) + sum_i (lam^i/2)|x_i^c - x_i^*|^2
    (dual analogue for ``which='y'``). Telemetry must come from a tracked run.
    """
    recs = sorted((r for r in telemetry if r.stream == which), key=lambda r: r.round)
    T = plan.T
    if len(recs) != T + 2 or any(r.saddle is None for r in recs):
        raise CapabilityError("ledger needs tracked telemetry for every round")
    final = recs[-1]
    star = recs[0].saddle_pair  # saddle of the unperturbed problem
    ctx_T = final.context
    if which == "x":
        lhs = problem.inner_max(final.center) - problem.inner_max(star.x)
        last = ctx_T.inner_max(final.center) - ctx_T.inner_max(final.saddle)
    else:
        lhs = problem.inner_min(star.y) - problem.inner_min(final.center)
        last = ctx_T.inner_min(final.saddle) - ctx_T.inner_min(final.center)
    acc = sum(0.5 * plan.lam(which, i) * float(np.sum((recs[i].center - recs[i].saddle) ** 2))
              for i in range(T + 1))
    return lhs, last + acc


# ---------------------------------------------------------------- variants

def _saa_kw(plan, inner_tol, counter):
    tol = inner_tol if inner_tol is not None else plan.delta / 100
    return dict(inner_tol=tol, counter=counter)


def boost_saa(problem: SspProblem, plan: PbsspPlan, rng, *, inner_tol: float | None = None,
              counter: CallCounter | None = None, telemetry: list | None = None,
              track: bool = False, method: str = "auto") -> PrimalDualPair:
    """Proximal boosting with robust SAA in every round (unconstrained problems)."""
    if problem.constrained and not plan.experiment:
        raise CapabilityError("boost_saa is for unconstrained problems; use boost_saa_c")
    counter = counter if counter is not None else CallCounter()
    kw = _saa_kw(plan, inner_tol, counter)
    sizes = plan.sample_sizes
    if "x" not in sizes:
        raise CapabilityError("plan lacks SAA sample sizes (missing constants?)")

    def round_oracle(rc, r):
        n = sizes[rc.stream][rc.round]
        return robust_saa(rc.problem, n, plan.m, rng=r, method=method, z0=rc.warm, **kw)

    def final_oracle(rc, r):
        n = sizes[rc.stream + "_final"]
        return robust_saa(rc.problem, n, plan.m, rng=r, method=method, z0=rc.warm, **kw)

    return pb_ssp_generic(problem, plan, round_oracle, final_oracle, rng, counter=counter,
                          telemetry=telemetry, track=track)


def boost_constrained(problem: SspProblem, plan: PbsspPlan, oracle, rng, *,
                      counter: CallCounter | None = None, telemetry: list | None = None,
                      track: bool = False) -> PrimalDualPair:
    """Constrained proximal boosting with any weak-gap oracle.

    ``oracle(ctx, n_or_target, rng, warm)`` is called with the plan's
    per-round budget. Rounds use separate Euclidean extracts; the final
    round uses :func:`function_gap_select`.
    """
    if plan.m % 2 == 0:
        raise DomainError("constrained boosting needs odd m")
    counter = counter if counter is not None else CallCounter()
    sizes = plan.sample_sizes
    if "x" not in sizes:
        raise CapabilityError("plan lacks sample sizes (missing constants?)")

    def round_oracle(rc, r):
        n = sizes[rc.stream][rc.round]
        sols = [oracle(rc.problem, n, child, rc.warm) for child in r.spawn(plan.m)]
        return select_separately(sols)

    def final_oracle(rc, r):
        n = sizes[rc.stream + "_final"]
        M = (plan.M_x if rc.stream == "x" else plan.M_y) or 1.0
        target = plan.delta / M
        pt = function_gap_select(lambda ctx, _t, child: oracle(ctx, n, child, rc.warm), rc.problem,
                                 target, plan.m, rc.stream, r, grad_batch=sizes.get("grad_" + rc.stream),
                                 counter=counter)
        if rc.stream == "x":
            return PrimalDualPair(pt, rc.warm.y if rc.warm is not None else rc.problem.ydom.center())
        return PrimalDualPair(rc.warm.x if rc.warm is not None else rc.problem.xdom.center(), pt)

    return pb_ssp_generic(problem, plan, round_oracle, final_oracle, rng, counter=counter,
                          telemetry=telemetry, track=track)


def saa_oracle(inner_tol: float, counter: CallCounter | None, warm_start: bool = True,
               inner_max_iters: int = 200_000):
    """Adapter turning saa_solve into the (ctx, n, rng, warm) oracle form."""

    def call(ctx, n, rng, warm):
        return saa_solve(ctx, n, rng=rng, inner_tol=inner_tol, counter=counter,
                         z0=warm if warm_start else None, inner_max_iters=inner_max_iters)

    return call


def boost_saa_c(problem: SspProblem, plan: PbsspPlan, rng, *, inner_tol: float | None = None,
                counter: CallCounter | None = None, telemetry: list | None = None,
                track: bool = False) -> PrimalDualPair:
    """Proximal boosting with SAA for constrained problems."""
    counter = counter if counter is not None else CallCounter()
    tol = inner_tol if inner_tol is not None else plan.delta / 100
    return boost_constrained(problem, plan, saa_oracle(tol, counter), rng, counter=counter,
                             telemetry=telemetry, track=track)


def boost_mogda(problem: SspProblem, plan: PbsspPlan, z0: PrimalDualPair | None, rng, *,
                counter: CallCounter | None = None, telemetry: list | None = None,
                track: bool = False, c_decay: float = 1.0, c_noise: float = 0.1,
                warm_log: list | None = None) -> PrimalDualPair:
    """Proximal boosting with robust multistage optimistic GDA and warm starts."""
    if problem.constrained:
        raise CapabilityError("boost_mogda is for unconstrained problems")
    counter = counter if counter is not None else CallCounter()
    targets = plan.sample_sizes
    if plan.scheme != "mogda":
        raise CapabilityError("plan lacks MOGDA targets; build it with scheme='mogda'")
    z0 = z0 if z0 is not None else PrimalDualPair(problem.xdom.center(), problem.ydom.center())

    def run(rc, r, target):
        warm = rc.warm if rc.warm is not None else z0
        if warm_log is not None:
            sp = solve_exact(rc.problem)
            warm_log.append((rc.stream, rc.round,
                             float(np.sum((warm.x - sp.x) ** 2) + np.sum((warm.y - sp.y) ** 2))))
        sols = [mogda_solve(rc.problem, target, warm, child, c_decay=c_decay, c_noise=c_noise,
                            counter=counter) for child in r.spawn(plan.m)]
        return select_jointly(sols)

    return pb_ssp_generic(problem, plan, lambda rc, r: run(rc, r, targets[rc.stream][rc.round]),
                          lambda rc, r: run(rc, r, targets[rc.stream + "_final"]), rng,
                          counter=counter, telemetry=telemetry, track=track, start=z0)


# ---------------------------------------------------------------- robust distance baseline

@dataclass
class RdeSettings:
    m: int
    delta: float
    n: int | None = None
    grad_batch_x: int | None = None
    grad_batch_y: int | None = None
    M_x: float | None = None
    M_y: float | None = None


def rde_settings(constants: ProblemConstants, epsilon: float, p: float, mode: str) -> RdeSettings:
    """Trial count, per-call accuracy and sample sizes of the robust-distance baseline."""
    if mode == UNCONSTRAINED:
        m = ceil_safe(18 * math.log(1 / p))
        k = constants.kappa
        delta = epsilon / (54 * (k**2 + k))
        n = None
        try:
            n = rde_unconstrained_size(constants, delta)
        except CapabilityError:
            pass
        return RdeSettings(max(m, 1), delta, n)
    m = ceil_safe(18 * math.log(4 / p))
    m = m if m % 2 else m + 1
    mu_x, mu_y, L_x, L_y, L_xy = constants.require("mu_x", "mu_y", "L_x", "L_y", "L_xy")
    M_x = gap_multiplier(L_x, L_xy, mu_x, mu_y, 0.0)
    M_y = gap_multiplier(L_y, L_xy, mu_y, mu_x, 0.0)
    delta = epsilon / (M_x + M_y)
    st = RdeSettings(m, delta, M_x=M_x, M_y=M_y)
    try:
        ex, ey, sx, sy = constants.require("ell_x", "ell_y", "sigma_x", "sigma_y")
        st.n = weak_gap_size(ex, ey, mu_x, mu_y, delta / 3)
        st.grad_batch_x = gradient_batch_size(sx, L_x * math.sqrt(delta / mu_x))
        st.grad_batch_y = gradient_batch_size(sy, L_y * math.sqrt(delta / mu_y))
    except CapabilityError:
        pass
    return st


def rde_baseline(problem: SspProblem, epsilon: float, p: float, mode: str, rng, *,
                 oracle=None, m: int | None = None, n: int | None = None,
                 grad_batch: int | None = None, inner_tol: float | None = None,
                 counter: CallCounter | None = None) -> PrimalDualPair:
    """One round of m oracle calls followed by robust selection.

    Unconstrained: separate Euclidean extracts on x and y. Constrained: the
    m candidates are shared by two function-gap selections. ``oracle`` has
    the (ctx, n, rng, warm) form; it defaults to SAA.
    """
    counter = counter if counter is not None else CallCounter()
    st = rde_settings(problem.constants, epsilon, p, mode)
    m = st.m if m is None else m
    n = st.n if n is None else n
    if n is None:
        raise CapabilityError("sample size unknown; pass n")
    tol = inner_tol if inner_tol is not None else st.delta / 100
    oracle = oracle or saa_oracle(tol, counter)
    children = rng.spawn(m + 2)
    sols = [oracle(problem, n, c, None) for c in children[:m]]
    if mode == UNCONSTRAINED:
        return select_separately(sols)
    if m % 2 == 0:
        raise DomainError("constrained selection needs odd m")
    gbx = grad_batch if grad_batch is not None else st.grad_batch_x
    gby = grad_batch if grad_batch is not None else st.grad_batch_y
    x = function_gap_select(None, problem, st.delta, m, "x", children[m], candidates=sols,
                            grad_batch=gbx, counter=counter)
    y = function_gap_select(None, problem, st.delta, m, "y", children[m + 1], candidates=sols,
                            grad_batch=gby, counter=counter)
    return PrimalDualPair(x, y)
