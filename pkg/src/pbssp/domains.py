"""Feasible sets with exact projections."""

from __future__ import annotations

import numpy as np

from .errors import DomainError

FEAS_TOL = 1e-12


def proj_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-and-threshold)."""
    v = np.asarray(v, dtype=float)
    v = v - v.max()  # shift invariance; keeps large equal entries from cancelling
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


class Reals:
    """The whole space R^d."""

    kind = "reals"
    code = 0

    def __init__(self, dim: int):
        self.dim = int(dim)

    def project(self, z):
        return np.asarray(z, dtype=float).copy()

    def contains(self, z, tol: float = FEAS_TOL) -> bool:
        z = np.asarray(z)
        return z.shape == (self.dim,) and bool(np.all(np.isfinite(z)))

    def max_sq_dist(self, anchor=None) -> float:
        return float("inf")

    def center(self) -> np.ndarray:
        return np.zeros(self.dim)

    def bounds(self):
        return np.full(self.dim, -np.inf), np.full(self.dim, np.inf)

    def __repr__(self):
        return f"Reals({self.dim})"


class Box:
    """Axis-aligned box lo <= z <= hi."""

    kind = "box"
    code = 1

    def __init__(self, lo, hi, dim: int | None = None):
        if dim is not None:
            lo = np.broadcast_to(np.asarray(lo, dtype=float), (dim,))
            hi = np.broadcast_to(np.asarray(hi, dtype=float), (dim,))
        self.lo = np.array(lo, dtype=float)
        self.hi = np.array(hi, dtype=float)
        if self.lo.shape != self.hi.shape or np.any(self.lo > self.hi):
            raise DomainError("box needs lo <= hi with matching shapes")
        self.dim = self.lo.size

    def project(self, z):
        return np.clip(np.asarray(z, dtype=float), self.lo, self.hi)

    def contains(self, z, tol: float = FEAS_TOL) -> bool:
        z = np.asarray(z)
        return (z.shape == (self.dim,) and bool(np.all(z >= self.lo - tol))
                and bool(np.all(z <= self.hi + tol)))

    def max_sq_dist(self, anchor=None) -> float:
        a = np.zeros(self.dim) if anchor is None else np.asarray(anchor, dtype=float)
        return float(np.sum(np.maximum((self.lo - a) ** 2, (self.hi - a) ** 2)))

    def center(self) -> np.ndarray:
        return np.clip(np.zeros(self.dim), self.lo, self.hi)

    def bounds(self):
        return self.lo, self.hi

    def __repr__(self):
        return f"Box(dim={self.dim})"


class Simplex:
    """Probability simplex {z >= 0, sum z = 1}."""

    kind = "simplex"
    code = 2

    def __init__(self, dim: int):
        if dim < 1:
            raise DomainError("simplex dimension must be positive")
        self.dim = int(dim)

    def project(self, z):
        return proj_simplex(z)

    def contains(self, z, tol: float = FEAS_TOL) -> bool:
        z = np.asarray(z)
        slack = tol + 4 * self.dim * np.finfo(float).eps
        return (z.shape == (self.dim,) and bool(np.all(z >= -tol))
                and abs(float(np.sum(z)) - 1.0) <= slack)

    def max_sq_dist(self, anchor=None) -> float:
        # squared diameter of the simplex; the anchor is irrelevant for this bound
        return 2.0

    def center(self) -> np.ndarray:
        return np.full(self.dim, 1.0 / self.dim)

    def bounds(self):
        return np.zeros(self.dim), np.ones(self.dim)

    def __repr__(self):
        return f"Simplex({self.dim})"
