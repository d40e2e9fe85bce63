"""Majority-ball selection and the robust estimators built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .accounting import CallCounter
from .core import PerturbedProblem, PrimalDualPair, SspProblem
from .errors import DomainError, InvariantError


class EuclideanMetric:
    """rho(u, v) = |u - v|_2."""

    def pairwise(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.stack([np.sqrt(((X - X[j]) ** 2).sum(axis=1)) for j in range(X.shape[0])])

    def __call__(self, u, v) -> float:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        v = np.atleast_1d(np.asarray(v, dtype=float))
        return float(np.sqrt(((u[None, :] - v) ** 2).sum(axis=1))[0])


class DirectionalMetric:
    """rho(u, v) = |<g, u> - <g, v>| for a fixed direction g (a pseudometric)."""

    def __init__(self, g):
        self.g = np.asarray(g, dtype=float)

    def _proj(self, X):
        return (np.atleast_2d(X) * self.g).sum(axis=1)

    def pairwise(self, X: np.ndarray) -> np.ndarray:
        p = self._proj(np.asarray(X, dtype=float))
        return np.abs(p[:, None] - p[None, :])

    def __call__(self, u, v) -> float:
        pu = self._proj(np.asarray(u, dtype=float))[0]
        pv = self._proj(np.asarray(v, dtype=float))[0]
        return float(abs(pu - pv))


@dataclass
class ExtractResult:
    indices: np.ndarray
    radii: np.ndarray
    median_radius: float


def extract(points, rho=None) -> ExtractResult:
    """Indices of points whose majority ball is no wider than the median one.

    For each point the radius is the smallest r such that the closed ball of
    radius r around it holds more than half of the points (itself included);
    the median radius is the ceil(m/2)-th smallest of those radii.
    Indices are 0-based and sorted.
    """
    rho = rho or EuclideanMetric()
    X = _as_matrix(points)
    m = X.shape[0]
    if m == 0:
        raise DomainError("extract needs at least one point")
    D = rho.pairwise(X)
    radii = np.sort(D, axis=1)[:, m // 2]
    r_hat = float(np.sort(radii)[math.ceil(m / 2) - 1])
    idx = np.nonzero(radii <= r_hat)[0]
    return ExtractResult(idx, radii, r_hat)


def robust_select(points, rho=None):
    """The point at the smallest index returned by :func:`extract`, and that index."""
    scalar = np.ndim(points[0]) == 0
    X = _as_matrix(points)
    k = int(extract(X, rho).indices[0])
    return (float(X[k, 0]) if scalar else X[k].copy()), k


def _as_matrix(points) -> np.ndarray:
    if isinstance(points, np.ndarray) and points.ndim == 2:
        return points.astype(float, copy=False)
    pts = [np.atleast_1d(np.asarray(p, dtype=float)) for p in points]
    if not pts:
        raise DomainError("extract needs at least one point")
    return np.stack(pts)


def gradient_batch_size(sigma: float, delta_G: float) -> int:
    """Mini-batch size so that each batch mean is within 3 delta_G w.p. 2/3."""
    if delta_G <= 0:
        raise DomainError("delta_G must be positive")
    return max(1, ceil_safe(3.0 * sigma**2 / delta_G**2))


def ceil_safe(v: float) -> int:
    """Ceiling that ignores floating noise of relative size 1e-12."""
    return int(math.ceil(v - 1e-12 * abs(v)))


def robust_gradient(problem: SspProblem, z: PrimalDualPair, delta_G: float, m: int, which: str,
                    rng: np.random.Generator, n: int | None = None,
                    counter: CallCounter | None = None) -> np.ndarray:
    """Robust estimate of one partial gradient of Phi at z from m batch means."""
    if which not in ("x", "y"):
        raise DomainError("which must be 'x' or 'y'")
    if n is None:
        (sigma,) = problem.constants.require("sigma_" + which)
        n = gradient_batch_size(sigma, delta_G)
    grads = []
    for child in rng.spawn(m):
        xi = problem.sample_mean(n, child)
        gx, gy = problem.sample_grad(xi, z.x, z.y)
        grads.append(gx if which == "x" else gy)
        if counter is not None:
            counter.add_grad(n)
    g, _ = robust_select(np.stack(grads))
    return g


def function_gap_select(oracle, ctx: SspProblem, delta: float, m: int, which: str,
                        rng: np.random.Generator, *, candidates=None, grad_batch: int | None = None,
                        counter: CallCounter | None = None, info: dict | None = None) -> np.ndarray:
    """Pick a candidate whose function gap on ``ctx`` is small with high probability.

    ``oracle(ctx, target, rng)`` must return pairs with expected weak gap at
    most ``target``; it is called m times with target delta/3 unless
    ``candidates`` are supplied. A candidate must be close to the others in
    Euclidean distance and also along the robust gradient direction.
    """
    if m % 2 == 0:
        raise DomainError("m must be odd")
    if which not in ("x", "y"):
        raise DomainError("which must be 'x' or 'y'")
    if candidates is None:
        candidates = [oracle(ctx, delta / 3.0, child) for child in rng.spawn(m)]
        grad_rng = rng.spawn(1)[0]
    else:
        grad_rng = rng
    if len(candidates) != m:
        raise DomainError("candidate count must equal m")
    xs = np.stack([c.x for c in candidates])
    ys = np.stack([c.y for c in candidates])
    I1 = extract(xs).indices
    I2 = extract(ys).indices
    zG = PrimalDualPair(xs[I1[0]], ys[I2[0]])
    cst = ctx.constants
    mu, L = cst.require("mu_" + which, "L_" + which)
    delta_G = L * math.sqrt(delta / mu)
    base = ctx.base if isinstance(ctx, PerturbedProblem) else ctx
    g = robust_gradient(base, zG, delta_G, m, which, grad_rng, n=grad_batch, counter=counter)
    if isinstance(ctx, PerturbedProblem):
        # proximal correction: d/dx of +lam D(x, c), d/dy of -lam D(y, c)
        extra = ctx.xterms[len(base.xterms):] if which == "x" else ctx.yterms[len(base.yterms):]
        sign = 1.0 if which == "x" else -1.0
        pt = zG.x if which == "x" else zG.y
        for t in extra:
            g = g + sign * t.grad(pt)
    pts = xs if which == "x" else ys
    I_near = I1 if which == "x" else I2
    I3 = extract(pts, DirectionalMetric(g)).indices
    both = np.intersect1d(I_near, I3)
    if both.size == 0:
        raise InvariantError("majority index sets do not intersect")
    k = int(both[0])
    if info is not None:
        info.update(index=k, delta_G=delta_G, gradient=g, I_dist=I_near, I_dir=I3)
    return pts[k].copy()
