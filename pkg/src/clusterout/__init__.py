"""Local search for clustering with outliers (UFL-out, k-median-out, k-means-out)."""
from ._accel import HAVE_NUMBA, USE_NUMBA
from .cost import Solution, SwapMove, apply_swap, delta_of_swap, evaluate, swap_cost
from .errors import BudgetExceeded, InstanceError, MoveError
from .exact import ExactResult, solve_exact
from .gaps import gen_kmed_gap, gen_ufl_gap, verify_gap
from .instance import (Instance, KClusterOut, UflOut, load_instance, make_instance,
                       read_instance, save_instance, write_instance)
from .metric import MetricSpace
from .search import SearchConfig, certify_local_optimum, enumerate_moves, local_search

__version__ = "0.1.0"

__all__ = [
    "HAVE_NUMBA", "USE_NUMBA", "BudgetExceeded", "ExactResult", "Instance", "InstanceError",
    "KClusterOut", "MetricSpace", "MoveError", "SearchConfig", "Solution", "SwapMove", "UflOut",
    "apply_swap", "certify_local_optimum", "delta_of_swap", "enumerate_moves", "evaluate",
    "gen_kmed_gap", "gen_ufl_gap", "load_instance", "local_search", "make_instance",
    "read_instance", "save_instance", "solve_exact", "swap_cost", "verify_gap", "write_instance",
]
