"""Strongly convex-concave quadratic benchmark with a planted saddle point."""

from __future__ import annotations

import numpy as np
from scipy.stats import ortho_group

from ..constants import ProblemConstants
from ..core import NoiseModel, PrimalDualPair, SaddleData, SspProblem
from ..domains import Box, Reals
from ..errors import DomainError
from ._gamma import gamma_mean_of


class LinearNoise(NoiseModel):
    """Zero-mean i.i.d. noise on the linear coefficients a and b.

    Gaussian by default; ``heavy_tailed`` uses a centered exponential
    (gamma with shape 1), which keeps the variance and the mean.
    """

    def __init__(self, data: SaddleData, sigma: float, heavy_tailed: bool = False):
        self.data = data
        self.sigma = float(sigma)
        self.heavy_tailed = heavy_tailed

    def _mean_noise(self, n, size, rng):
        if self.sigma == 0:
            return np.zeros(size)
        if self.heavy_tailed:
            # Exp(scale=sigma) has mean sigma and variance sigma^2
            return gamma_mean_of(n, 1.0, self.sigma, -self.sigma, rng, size=size)
        return rng.normal(0.0, self.sigma / np.sqrt(n), size=size)

    def draw_mean(self, n, rng):
        d = self.data
        dx, dy = d.B.shape
        za = self._mean_noise(n, dx, rng)
        zb = self._mean_noise(n, dy, rng)
        return SaddleData(d.B, d.a + za, d.b + zb, d.Q, d.R, d.c)

    def linear_noise(self, count, rng):
        """Single-sample noise for ``count`` consecutive draws, as two arrays."""
        dx, dy = self.data.B.shape
        return self._mean_noise(1, (count, dx), rng), self._mean_noise(1, (count, dy), rng)


def _spd(d, mu, L, rng, diagonal):
    eig = np.linspace(mu, L, d) if d > 1 else np.array([mu])
    if diagonal:
        return rng.permutation(eig)
    U = ortho_group.rvs(d, random_state=rng) if d > 1 else np.ones((1, 1))
    M = (U * eig) @ U.T
    return 0.5 * (M + M.T)


def _coupling(dx, dy, L_xy, rng):
    r = min(dx, dy)
    s = np.linspace(L_xy, 0.5 * L_xy, r) if r > 1 else np.array([L_xy])
    U = ortho_group.rvs(dx, random_state=rng) if dx > 1 else np.ones((1, 1))
    V = ortho_group.rvs(dy, random_state=rng) if dy > 1 else np.ones((1, 1))
    return (U[:, :r] * s) @ V[:, :r].T


def make_quadratic(d_x: int, d_y: int, mu: float, L: float, L_xy: float, sigma: float,
                   heavy_tailed: bool = False, seed: int = 0, box: float | None = None,
                   shift: float = 1.0, A=None, Cmat=None, B=None) -> SspProblem:
    """Phi(x,y) = 1/2 x'Ax + x'By - 1/2 y'Cy + a'x + b'y with a known saddle.

    Spectra of A and C are spread evenly over [mu, L]; B has top singular
    value L_xy. The saddle is drawn at scale ``shift`` and (a, b) are chosen
    to make it stationary. With ``box`` set, both blocks live in
    [-box, box]^d, A and C are diagonal, and the saddle is pushed onto the
    boundary for part of the coordinates with gradients in the normal cone.
    Explicit ``A``, ``Cmat`` and ``B`` override the random construction.
    """
    if not (0 < mu <= L):
        raise DomainError("need 0 < mu <= L")
    if L_xy < 0 or sigma < 0:
        raise DomainError("L_xy and sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    diag = box is not None
    A = _spd(d_x, mu, L, rng, diag) if A is None else np.asarray(A, float)
    Cm = _spd(d_y, mu, L, rng, diag) if Cmat is None else np.asarray(Cmat, float)
    B = _coupling(d_x, d_y, L_xy, rng) if B is None else np.asarray(B, float).reshape(d_x, d_y)
    A = np.atleast_1d(A) if diag else np.atleast_2d(A)
    Cm = np.atleast_1d(Cm) if diag else np.atleast_2d(Cm)

    def full(M):
        return np.diag(M) if M.ndim == 1 else M

    xs = shift * rng.standard_normal(d_x) / np.sqrt(d_x)
    ys = shift * rng.standard_normal(d_y) / np.sqrt(d_y)
    gx = np.zeros(d_x)
    gy = np.zeros(d_y)
    if diag:
        xdom = Box(-box, box, dim=d_x)
        ydom = Box(-box, box, dim=d_y)
        # put roughly a third of the coordinates on the boundary
        for z, g, sign in ((xs, gx, 1.0), (ys, gy, -1.0)):
            active = rng.random(z.size) < 1 / 3
            side = np.where(rng.random(z.size) < 0.5, -1.0, 1.0)
            z[:] = np.clip(z, -0.9 * box, 0.9 * box)
            z[active] = side[active] * box
            # min block: gradient points inward (+ at lo, - at hi); max block the reverse
            g[active] = -sign * side[active] * rng.uniform(0.1, 1.0, active.sum()) * shift
    else:
        xdom, ydom = Reals(d_x), Reals(d_y)
    a = gx - full(A) @ xs - B @ ys
    b = gy - B.T @ xs + full(Cm) @ ys
    data = SaddleData(B, a, b, A, Cm)
    eig_A = A if A.ndim == 1 else np.linalg.eigvalsh(A)
    eig_C = Cm if Cm.ndim == 1 else np.linalg.eigvalsh(Cm)
    Lxy = float(np.linalg.norm(B, 2))
    sig_x = float(np.sqrt(d_x) * sigma)
    sig_y = float(np.sqrt(d_y) * sigma)
    cst = dict(mu_x=float(eig_A.min()), mu_y=float(eig_C.min()), L_x=float(eig_A.max()),
               L_y=float(eig_C.max()), L_xy=Lxy, sigma_x=sig_x, sigma_y=sig_y,
               C=sig_x**2 + sig_y**2 + float(gx @ gx + gy @ gy))
    if diag:
        rx = np.sqrt(xdom.max_sq_dist())
        ry = np.sqrt(ydom.max_sq_dist())
        # second-moment bounds of the stochastic partial gradients over the box
        cst.update(
            ell_x=float(np.sqrt((eig_A.max() * rx + Lxy * ry + np.linalg.norm(a)) ** 2 + sig_x**2)),
            ell_y=float(np.sqrt((Lxy * rx + eig_C.max() * ry + np.linalg.norm(b)) ** 2 + sig_y**2)),
            D_x=float(rx), D_y=float(ry))
    prob = SspProblem(data, xdom, ydom, constants=ProblemConstants(**cst),
                      noise=LinearNoise(data, sigma, heavy_tailed),
                      saddle=PrimalDualPair(xs, ys),
                      name="quadratic-box" if diag else "quadratic")
    return prob
