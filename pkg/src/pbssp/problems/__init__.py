"""Benchmark problems with exact gap evaluators."""

from .matrix_game import make_matrix_game, MatrixGameNoise
from .mdp import (MdpModel, avg_reward, enumerate_policies, lp_value, make_mdp_ssp, mdp_sample,
                  policy_from_y, random_mdp)
from .quadratic import make_quadratic

__all__ = ["make_quadratic", "make_matrix_game", "MatrixGameNoise", "MdpModel", "make_mdp_ssp",
           "mdp_sample", "policy_from_y", "avg_reward", "random_mdp", "enumerate_policies", "lp_value"]
