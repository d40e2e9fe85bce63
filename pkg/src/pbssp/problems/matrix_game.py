"""Stochastic two-player matrix game on probability simplices."""

from __future__ import annotations

import math

import numpy as np

from ..constants import ProblemConstants
from ..core import ENTROPY, QUADRATIC, NoiseModel, PrimalDualPair, SaddleData, SspProblem, cc_regularize
from ..domains import Simplex
from ..errors import DomainError
from ._gamma import gamma_mean_of, gamma_params


class MatrixGameNoise(NoiseModel):
    """Independent gamma payoff entries with mean ``A_mean`` and variance sigma_A^2."""

    def __init__(self, A_mean: np.ndarray, sigma_A: float):
        self.A_mean = A_mean
        self.sigma_A = float(sigma_A)
        self._params = gamma_params(A_mean, sigma_A**2) if sigma_A > 0 else None

    def draw_mean(self, n, rng):
        return SaddleData(self.mean_matrix(n, rng))

    def mean_matrix(self, n, rng, count=None):
        if self._params is None:
            M = self.A_mean
            return M.copy() if count is None else np.broadcast_to(M, (count,) + M.shape).copy()
        shape, scale, shift = self._params
        if count is None:
            return gamma_mean_of(n, shape, scale, shift, rng)
        size = (count,) + self.A_mean.shape
        return gamma_mean_of(n, shape, scale, shift, rng, size=size)


def make_matrix_game(N_x: int, N_y: int, sigma_A: float = 1.0, seed: int = 0,
                     regularization: str = "none", epsilon: float = 0.0,
                     A_mean=None) -> SspProblem:
    """Phi(x, y) = x'E[A_xi]y with uniform (0, 1) mean payoffs.

    ``entropy`` adds eps/(4 log N) entropy terms on both players;
    ``quadratic`` adds eps/(2 D^2)/2 |. - uniform|^2 terms instead.
    """
    if N_x < 2 or N_y < 2:
        raise DomainError("each player needs at least two strategies")
    if A_mean is None:
        rng = np.random.default_rng(seed)
        A_mean = rng.uniform(0.0, 1.0, size=(N_x, N_y))
        A_mean = np.clip(A_mean, 1e-6, 1 - 1e-6)
    A_mean = np.asarray(A_mean, dtype=float)
    if A_mean.shape != (N_x, N_y):
        raise DomainError("payoff shape mismatch")
    xdom, ydom = Simplex(N_x), Simplex(N_y)
    # E|A_xi y|^2 <= max_i E[(A_xi)_i.y]^2 summed over rows
    ell_x = math.sqrt(float(np.sum(np.max(A_mean**2 + sigma_A**2, axis=1))))
    ell_y = math.sqrt(float(np.sum(np.max(A_mean**2 + sigma_A**2, axis=0))))
    cst = ProblemConstants(mu_x=0.0, mu_y=0.0, L_x=0.0, L_y=0.0,
                           L_xy=float(np.linalg.norm(A_mean, 2)),
                           ell_x=ell_x, ell_y=ell_y,
                           sigma_x=math.sqrt(N_x) * sigma_A, sigma_y=math.sqrt(N_y) * sigma_A,
                           D_x=math.sqrt(2.0), D_y=math.sqrt(2.0))
    base = SspProblem(SaddleData(A_mean), xdom, ydom, constants=cst,
                      noise=MatrixGameNoise(A_mean, sigma_A), name="matrix-game")
    if regularization == "none" or epsilon == 0:
        return base
    if regularization == "entropy":
        return cc_regularize(base, epsilon, None, ENTROPY, ENTROPY)
    if regularization == "quadratic":
        anchor = PrimalDualPair(xdom.center(), ydom.center())
        return cc_regularize(base, epsilon, anchor, QUADRATIC, QUADRATIC)
    raise DomainError(f"unknown regularization {regularization!r}")
