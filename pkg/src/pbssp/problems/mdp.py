"""Average-reward MDP as a bilinear saddle problem over a box and a simplex.

With x the (relative) value vector and y the state-action occupancy,

    Phi(x, y) = sum_a y_a'(P_a - I)x + <r, y>,  x in [-U, U]^S,  y in simplex(S*A).

The occupancy vector is indexed by s*|A| + a.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ..constants import ProblemConstants
from ..core import ENTROPY, QUADRATIC, NoiseModel, PrimalDualPair, SaddleData, SspProblem, cc_regularize
from ..domains import Box, Simplex
from ..errors import DiagnosticError, DomainError
from ._gamma import gamma_mean_of, gamma_params


@dataclass(frozen=True)
class MdpModel:
    """Transition tensor ``P[a, s, s']``, mean rewards ``r[s, a]`` in (0, 1)."""

    P: np.ndarray
    r: np.ndarray
    sigma_r: float = 1.0
    U_x: float = 0.5

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        r = np.asarray(self.r, dtype=float)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "r", r)
        if P.ndim != 3 or P.shape[1] != P.shape[2]:
            raise DomainError("P must have shape (A, S, S)")
        if r.shape != (P.shape[1], P.shape[0]):
            raise DomainError("r must have shape (S, A)")
        if np.any(P < 0) or np.max(np.abs(P.sum(axis=2) - 1.0)) > 1e-12:
            raise DomainError("transition rows must be probability vectors")
        if np.any(r <= 0) or np.any(r >= 1):
            raise DomainError("mean rewards must lie in (0, 1)")
        if self.sigma_r < 0 or self.U_x <= 0:
            raise DomainError("need sigma_r >= 0 and U_x > 0")

    @property
    def n_states(self) -> int:
        return self.P.shape[1]

    @property
    def n_actions(self) -> int:
        return self.P.shape[0]


def random_mdp(n_states: int, n_actions: int, seed: int = 0, sigma_r: float = 1.0,
               U_x: float = 0.5, concentration: float = 1.0) -> MdpModel:
    """Dirichlet transition rows and uniform (0, 1) mean rewards."""
    rng = np.random.default_rng(seed)
    P = rng.dirichlet(np.full(n_states, concentration), size=(n_actions, n_states))
    P /= P.sum(axis=2, keepdims=True)
    r = rng.uniform(0.02, 0.98, size=(n_states, n_actions))
    return MdpModel(P, r, sigma_r, U_x)


def coupling_matrix(P: np.ndarray) -> np.ndarray:
    """B[s', s*A + a] = P_a(s, s') - 1{s = s'}."""
    A, S, _ = P.shape
    B = np.transpose(P, (2, 1, 0)).reshape(S, S * A).copy()
    for s in range(S):
        B[s, s * A:(s + 1) * A] -= 1.0
    return B


class MdpGeneratorNoise(NoiseModel):
    """One sampled transition and one gamma reward per state-action pair."""

    def __init__(self, mdp: MdpModel):
        self.mdp = mdp
        S, A = mdp.n_states, mdp.n_actions
        # rows indexed by s*A + a
        self._rows = np.transpose(mdp.P, (1, 0, 2)).reshape(S * A, S)
        self._gamma = gamma_params(mdp.r.reshape(-1), mdp.sigma_r**2) if mdp.sigma_r > 0 else None

    def draw_mean(self, n, rng):
        S, A = self.mdp.n_states, self.mdp.n_actions
        counts = rng.multinomial(n, self._rows)
        Phat = counts.reshape(S, A, S).transpose(1, 0, 2) / n
        if self._gamma is None:
            r = self.mdp.r.reshape(-1).copy()
        else:
            r = gamma_mean_of(n, *self._gamma, rng)
        return SaddleData(coupling_matrix(Phat), None, r)


def mdp_sample(mdp: MdpModel, rng) -> tuple[np.ndarray, np.ndarray]:
    """One generator sample: indicator transition tensor and reward draws."""
    S, A = mdp.n_states, mdp.n_actions
    xi = MdpGeneratorNoise(mdp).draw_mean(1, rng)
    Phat = np.zeros((A, S, S))
    for s in range(S):
        for a in range(A):
            Phat[a, s] = xi.B[:, s * A + a]
            Phat[a, s, s] += 1.0
    return np.rint(Phat), xi.b.reshape(S, A)


def make_mdp_ssp(mdp: MdpModel, regularization: str = "none", epsilon: float = 0.0) -> SspProblem:
    """The saddle formulation, optionally regularized for gap ``epsilon``.

    ``quadratic`` adds eps/(4 D_x^2)|x|^2 and -eps/(4 D_y^2)|y - uniform|^2;
    ``entropy`` replaces the y term by an entropy with weight eps/(4 log(S*A)).
    The regularized problem keeps the original for gap scoring.
    """
    S, A = mdp.n_states, mdp.n_actions
    B = coupling_matrix(mdp.P)
    data = SaddleData(B, None, mdp.r.reshape(-1).copy())
    xdom = Box(-mdp.U_x, mdp.U_x, dim=S)
    ydom = Simplex(S * A)
    sigma_y = math.sqrt(S * A * (mdp.U_x**2 + mdp.sigma_r**2))
    cst = ProblemConstants(mu_x=0.0, mu_y=0.0, L_x=0.0, L_y=0.0, L_xy=float(np.linalg.norm(B, 2)),
                           sigma_x=math.sqrt(2.0), sigma_y=sigma_y,
                           ell_x=math.sqrt(2.0 + float(np.max(np.sum(B**2, axis=0)))),
                           ell_y=math.sqrt(S * A * ((2 * mdp.U_x + 1) ** 2 + mdp.sigma_r**2)),
                           D_x=math.sqrt(xdom.max_sq_dist()), D_y=math.sqrt(ydom.max_sq_dist()))
    base = SspProblem(data, xdom, ydom, constants=cst, noise=MdpGeneratorNoise(mdp), name="mdp")
    base.mdp = mdp
    if regularization == "none" or epsilon == 0:
        return base
    anchor = PrimalDualPair(np.zeros(S), ydom.center())
    if regularization == "quadratic":
        out = cc_regularize(base, epsilon, anchor, QUADRATIC, QUADRATIC)
    elif regularization == "entropy":
        out = cc_regularize(base, epsilon, anchor, ENTROPY, QUADRATIC)
    else:
        raise DomainError(f"unknown regularization {regularization!r}")
    out.mdp = mdp
    return out


def policy_from_y(y: np.ndarray, n_states: int, n_actions: int) -> np.ndarray:
    """pi[s, a] = y_sa / sum_a' y_sa'; states without mass get the uniform policy."""
    Y = np.asarray(y, dtype=float).reshape(n_states, n_actions)
    mass = Y.sum(axis=1, keepdims=True)
    uniform = np.full_like(Y, 1.0 / n_actions)
    with np.errstate(invalid="ignore", divide="ignore"):
        pi = np.where(mass > 0, Y / np.where(mass > 0, mass, 1.0), uniform)
    return pi


def avg_reward(policy: np.ndarray, mdp: MdpModel) -> float:
    """Long-run average reward of a stationary policy.

    Raises DiagnosticError when the induced chain has more than one
    stationary distribution.
    """
    pi = np.asarray(policy, dtype=float)
    S = mdp.n_states
    Ppi = np.einsum("sa,ast->st", pi, mdp.P)
    M = np.vstack([Ppi.T - np.eye(S), np.ones((1, S))])
    rhs = np.zeros(S + 1)
    rhs[-1] = 1.0
    if np.linalg.matrix_rank(M[:-1], tol=1e-10) < S - 1:
        raise DiagnosticError("induced chain has no unique stationary distribution")
    d, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return float(d @ np.sum(pi * mdp.r, axis=1))


def enumerate_policies(mdp: MdpModel) -> float:
    """Best average reward over deterministic policies (skips chains without a unique law)."""
    S, A = mdp.n_states, mdp.n_actions
    best = -np.inf
    for acts in itertools.product(range(A), repeat=S):
        pi = np.zeros((S, A))
        pi[np.arange(S), acts] = 1.0
        try:
            best = max(best, avg_reward(pi, mdp))
        except DiagnosticError:
            continue
    return float(best)


def lp_value(mdp: MdpModel) -> float:
    """min v s.t. (P_a - I)x + r_a <= v 1 for all a, the average-reward LP."""
    S, A = mdp.n_states, mdp.n_actions
    # variables (x, v)
    rows, rhs = [], []
    for a in range(A):
        M = mdp.P[a] - np.eye(S)
        rows.append(np.hstack([M, -np.ones((S, 1))]))
        rhs.append(-mdp.r[:, a])
    c = np.zeros(S + 1)
    c[-1] = 1.0
    res = linprog(c, A_ub=np.vstack(rows), b_ub=np.concatenate(rhs),
                  bounds=[(None, None)] * (S + 1), method="highs")
    if not res.success:
        raise DiagnosticError(f"LP failed: {res.message}")
    return float(res.fun)
