"""Structural constants of a saddle function."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import CapabilityError, DomainError

_NAMES = ("mu_x", "mu_y", "L_x", "L_y", "L_xy", "ell_x", "ell_y",
          "sigma_x", "sigma_y", "C", "D_x", "D_y")


@dataclass(frozen=True)
class ProblemConstants:
    """Moduli, Lipschitz constants, noise levels and diameters of Phi.

    Every field is optional. Operations that need a missing constant call
    :meth:`require`, which raises :class:`CapabilityError` instead of guessing.
    Derived quantities are properties, so they can never go stale.
    """

    mu_x: float | None = None
    mu_y: float | None = None
    L_x: float | None = None
    L_y: float | None = None
    L_xy: float | None = None
    ell_x: float | None = None
    ell_y: float | None = None
    sigma_x: float | None = None
    sigma_y: float | None = None
    C: float | None = None
    D_x: float | None = None
    D_y: float | None = None

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if not isinstance(v, (int, float)) or math.isnan(v) or v < 0:
                raise DomainError(f"{f.name} must be a nonnegative number, got {v!r}")
        for mu, L in (("mu_x", "L_x"), ("mu_y", "L_y")):
            a, b = getattr(self, mu), getattr(self, L)
            if a is not None and b is not None and a > 0 and math.isfinite(b) and a > b * (1 + 1e-12):
                raise DomainError(f"{mu}={a} exceeds {L}={b}")

    def require(self, *names: str) -> tuple:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise CapabilityError(f"missing constants: {', '.join(missing)}")
        return tuple(float(getattr(self, n)) for n in names)

    @property
    def mu(self) -> float:
        mu_x, mu_y = self.require("mu_x", "mu_y")
        return min(mu_x, mu_y)

    @property
    def L(self) -> float:
        return max(self.require("L_x", "L_y", "L_xy"))

    @property
    def ell(self) -> float:
        return max(self.require("ell_x", "ell_y"))

    @property
    def kappa(self) -> float:
        mu = self.mu
        if mu <= 0:
            raise CapabilityError("kappa needs positive moduli")
        # L may undercut mu when the coupling dominates nothing; kappa stays >= 1
        return max(1.0, self.L / mu)

    @property
    def L_f(self) -> float:
        L_x, L_xy, mu_y = self.require("L_x", "L_xy", "mu_y")
        if mu_y <= 0:
            raise CapabilityError("L_f needs mu_y > 0")
        return L_x + L_xy**2 / mu_y

    @property
    def L_g(self) -> float:
        L_y, L_xy, mu_x = self.require("L_y", "L_xy", "mu_x")
        if mu_x <= 0:
            raise CapabilityError("L_g needs mu_x > 0")
        return L_y + L_xy**2 / mu_x

    def shifted(self, lambda_x: float = 0.0, lambda_y: float = 0.0) -> ProblemConstants:
        """Constants after adding (lambda_x/2)|x-c|^2 and -(lambda_y/2)|y-c|^2."""
        upd = {}
        for name, lam in (("mu_x", lambda_x), ("L_x", lambda_x),
                          ("mu_y", lambda_y), ("L_y", lambda_y)):
            v = getattr(self, name)
            if v is not None and lam:
                upd[name] = v + lam
        return replace(self, **upd) if upd else self

    def with_values(self, **kw) -> ProblemConstants:
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return {n: getattr(self, n) for n in _NAMES}
