"""Multiswap local search for UFL-out and k-clustering-out.

One driver serves both problems: a move closes up to ``rho`` open centres and
opens up to ``rho`` closed ones, subject to the instance's centre budget. A
move is accepted only when it shrinks the cost by the factor
``1 - epsilon_stop / m``, which bounds the number of iterations polynomially.
"""
from dataclasses import dataclass, field
import heapq
from itertools import combinations, product
import math
from typing import Optional

import numpy as np

from . import kernels
from .cost import SwapMove, apply_swap, evaluate, swap_cost
from .errors import MoveError
from .metric import ABS_TOL, REL_TOL

PIVOTS = ("first", "best")
SEED_POLICIES = ("greedy", "random", "explicit")
LOCAL_OPTIMUM = "local-optimum"
ITERATION_CAP = "iteration-cap"


@dataclass
class SearchConfig:
    rho: int = 1
    epsilon_stop: float = 1e-6
    pivot: str = "first"
    max_iterations: int = 10_000
    seed_policy: str = "greedy"
    rng_seed: int = 0
    initial: Optional[tuple] = None

    def __post_init__(self):
        if isinstance(self.rho, bool) or int(self.rho) != self.rho or self.rho < 1:
            raise ValueError(f"rho must be a positive integer, got {self.rho!r}")
        if not (self.epsilon_stop > 0 and math.isfinite(self.epsilon_stop)):
            raise ValueError(f"epsilon_stop must be > 0, got {self.epsilon_stop!r}")
        if self.pivot not in PIVOTS:
            raise ValueError(f"pivot must be one of {PIVOTS}, got {self.pivot!r}")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.seed_policy not in SEED_POLICIES:
            raise ValueError(f"seed_policy must be one of {SEED_POLICIES}, got {self.seed_policy!r}")
        if self.seed_policy == "explicit" and not self.initial:
            raise ValueError("explicit seed policy needs an initial centre list")
        self.rho = int(self.rho)
        self.max_iterations = int(self.max_iterations)


@dataclass
class StepRecord:
    iteration: int
    move: SwapMove
    cost_before: float
    cost_after: float

    def to_json(self):
        return {"iteration": self.iteration, "P": list(self.move.P), "Q": list(self.move.Q),
                "cost_before": self.cost_before, "cost_after": self.cost_after}


@dataclass
class SearchTrace:
    initial: object
    solution: object
    steps: list = field(default_factory=list)
    termination: str = LOCAL_OPTIMUM
    config: Optional[SearchConfig] = None

    @property
    def iterations(self):
        return len(self.steps)

    @property
    def initial_cost(self):
        return self.initial.cost

    @property
    def final_cost(self):
        return self.solution.cost

    def iteration_bound(self):
        """``log(cost0 / cost_final) / log(1 / (1 - eps/m)) + 1``."""
        m = self.solution.instance.m
        eps = self.config.epsilon_stop
        c0, cf = self.initial_cost, self.final_cost
        if cf <= 0:
            return math.inf
        return math.log(c0 / cf) / -math.log1p(-eps / m) + 1

    def to_json(self):
        cfg = self.config
        return {
            "config": {"rho": cfg.rho, "epsilon_stop": cfg.epsilon_stop, "pivot": cfg.pivot,
                       "max_iterations": cfg.max_iterations, "seed_policy": cfg.seed_policy,
                       "rng_seed": cfg.rng_seed},
            "initial": self.initial.to_json(),
            "steps": [s.to_json() for s in self.steps],
            "iterations": self.iterations,
            "termination": self.termination,
            "solution": self.solution.to_json(),
        }


def _feasible(n_open, p, q, budget):
    return 1 <= n_open - q + p <= budget


def enumerate_moves(sol, rho, budget=None):
    """Yield every feasible non-empty swap once, ordered by ``(|P|+|Q|, P, Q)``."""
    inst = sol.instance
    budget = inst.budget if budget is None else budget
    opened = [int(i) for i in sol.open]
    closed = sorted(set(range(inst.m)) - set(opened))
    n_open = len(opened)
    for size in range(1, 2 * rho + 1):
        streams = []
        for p in range(max(0, size - rho), min(rho, size) + 1):
            q = size - p
            if p > len(closed) or q > n_open or not _feasible(n_open, p, q, budget):
                continue
            streams.append(product(combinations(closed, p), combinations(opened, q)))
        for P, Q in heapq.merge(*streams):
            yield SwapMove(P, Q)


def count_moves(sol, rho, budget=None):
    return sum(1 for _ in enumerate_moves(sol, rho, budget))


@dataclass
class Certificate:
    certified: bool
    counterexample: Optional[SwapMove]
    moves_checked: int


def _improves(new_cost, cost, factor):
    if factor is None:
        return new_cost < cost - max(REL_TOL * abs(cost), ABS_TOL)
    return new_cost <= factor * cost


def certify_local_optimum(inst, sol, rho, slack=0.0):
    """Exhaustively search the ``rho``-swap neighbourhood of ``sol`` for an improvement.

    With ``slack == 0`` any move improving by more than the float tolerance
    counts; with ``slack > 0`` only moves reaching ``(1 - slack/m) * cost`` do.
    Returns the first counterexample in enumeration order.
    """
    if sol.instance is not inst:
        sol = evaluate(inst, sol.open)
    factor = (1.0 - slack / inst.m) if slack > 0 else None
    checked = 0
    for move in enumerate_moves(sol, rho):
        checked += 1
        new_cost = swap_cost(sol, move)
        if _improves(new_cost, sol.cost, factor):
            return Certificate(False, SwapMove(move.P, move.Q, new_cost - sol.cost), checked)
    return Certificate(True, None, checked)


# -- seeding ---------------------------------------------------------------

def _singleton_costs(inst):
    combos = np.arange(inst.m, dtype=np.int64)[:, None]
    return kernels.combo_costs(inst.costs, combos, inst.z) + inst.opening_costs


def greedy_seed(inst):
    """Deterministic start set.

    k-clustering: best single centre, then farthest-point (k-centre style)
    growth up to the budget. UFL: best single centre, then add the best
    centre while that lowers the cost.
    """
    first = int(np.argmin(_singleton_costs(inst)))
    chosen = [first]
    if inst.is_ufl:
        sol = evaluate(inst, chosen)
        while len(chosen) < inst.m:
            best = None
            for i in range(inst.m):
                if i in chosen:
                    continue
                c = swap_cost(sol, SwapMove((i,), ()))
                if c < sol.cost and (best is None or c < best[0]):
                    best = (c, i)
            if best is None:
                break
            chosen.append(best[1])
            sol = apply_swap(sol, SwapMove((best[1],), ()))
        return sorted(chosen)
    target = min(inst.budget, inst.m)
    costs = inst.costs
    reach = costs[:, first].copy()
    is_open = np.zeros(inst.m, dtype=bool)
    is_open[first] = True
    while len(chosen) < target:
        far = int(np.argmax(reach))
        row = np.where(is_open, np.inf, costs[far])
        nxt = int(np.argmin(row))
        chosen.append(nxt)
        is_open[nxt] = True
        np.minimum(reach, costs[:, nxt], out=reach)
    return sorted(chosen)


def random_seed(inst, rng_seed):
    rng = np.random.default_rng(rng_seed)
    if inst.is_ufl:
        size = int(rng.integers(1, inst.m + 1))
    else:
        size = min(inst.budget, inst.m)
    return sorted(int(i) for i in rng.choice(inst.m, size=size, replace=False))


def seed_solution(inst, cfg):
    if cfg.seed_policy == "explicit":
        start = sorted(set(int(i) for i in cfg.initial))
    elif cfg.seed_policy == "random":
        start = random_seed(inst, cfg.rng_seed)
    else:
        start = greedy_seed(inst)
    if not start:
        raise MoveError("seed set is empty")
    if len(start) > inst.budget:
        raise MoveError(f"seed uses {len(start)} centres, budget is {inst.budget}")
    return evaluate(inst, start)


# -- driver ----------------------------------------------------------------

def _next_move(sol, cfg, factor):
    best = None
    for move in enumerate_moves(sol, cfg.rho):
        new_cost = swap_cost(sol, move)
        if new_cost <= factor * sol.cost:
            if cfg.pivot == "first":
                return move, new_cost
            if best is None or new_cost < best[1]:
                best = (move, new_cost)
    return best if best is not None else (None, None)


def local_search(inst, cfg=None):
    """Run the multiswap heuristic and return its :class:`SearchTrace`."""
    cfg = cfg or SearchConfig()
    if inst.m < 1:
        raise MoveError("empty candidate set")
    sol = seed_solution(inst, cfg)
    trace = SearchTrace(initial=sol, solution=sol, config=cfg)
    factor = 1.0 - cfg.epsilon_stop / inst.m
    while True:
        if sol.cost <= 0:
            break
        if trace.iterations >= cfg.max_iterations:
            trace.termination = ITERATION_CAP
            break
        move, _ = _next_move(sol, cfg, factor)
        if move is None:
            break
        new = apply_swap(sol, move)
        trace.steps.append(StepRecord(trace.iterations + 1, move, sol.cost, new.cost))
        sol = new
    trace.solution = sol
    return trace
