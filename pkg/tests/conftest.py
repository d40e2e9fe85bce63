import numpy as np
import pytest

from pbssp.constants import ProblemConstants
from pbssp.core import SaddleData, SspProblem, PrimalDualPair
from pbssp.domains import Reals, Simplex
from pbssp.problems import make_quadratic


def scalar_problem(Q=1.0, R=1.0, B=1.0, a=0.0, b=0.0, saddle=(0.0, 0.0)):
    """Phi(x, y) = Q/2 x^2 + B x y - R/2 y^2 + a x + b y on the real line."""
    data = SaddleData([[B]], [a], [b], Q=[[Q]] if Q else None, R=[[R]] if R else None)
    cst = ProblemConstants(mu_x=Q, mu_y=R, L_x=Q, L_y=R, L_xy=abs(B), sigma_x=0.0, sigma_y=0.0, C=0.0)
    z = None if saddle is None else PrimalDualPair(np.array([saddle[0]]), np.array([saddle[1]]))
    return SspProblem(data, Reals(1), Reals(1), constants=cst, saddle=z, name="scalar")


def game(A):
    A = np.asarray(A, dtype=float)
    return SspProblem(SaddleData(A), Simplex(A.shape[0]), Simplex(A.shape[1]), name="game")


@pytest.fixture(scope="session")
def quad():
    return make_quadratic(20, 20, 1.0, 8.0, 4.0, 1.0, seed=3)


@pytest.fixture(scope="session")
def small_quad():
    return make_quadratic(5, 4, 1.0, 4.0, 2.0, 1.0, seed=11)


@pytest.fixture(scope="session")
def box_quad():
    return make_quadratic(6, 5, 1.0, 4.0, 1.5, 1.0, seed=5, box=1.0)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for num in sorted(verdicts):
            terminalreporter.write_line(verdicts[num])
