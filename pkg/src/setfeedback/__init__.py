"""Exact laboratory for online learning with set-valued feedback."""

from .dims import DimensionEngine, check_relations, ldim, msdim, psldim, sldim
from .games import game_value
from .harness import minimax_oracle, monte_carlo, run_game
from .helly import helly_number
from .model import ProblemInstance, load_instance, make_instance
from .rational import RationalDistribution, parse_rational

__all__ = [
    "DimensionEngine", "ProblemInstance", "RationalDistribution",
    "check_relations", "game_value", "helly_number", "ldim", "load_instance", "make_instance",
    "minimax_oracle", "monte_carlo", "msdim", "parse_rational", "psldim", "run_game", "sldim",
]
