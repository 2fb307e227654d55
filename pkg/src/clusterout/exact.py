"""Brute-force optimum for desk-scale instances.

Subset costs are computed by a separate sort-based kernel (not the cost
engine's selection path); the winning set is re-evaluated with
:func:`clusterout.cost.evaluate` so the reported cost matches it exactly.
"""
from dataclasses import dataclass
from itertools import combinations, islice
from math import comb

import numpy as np

from . import kernels
from .cost import evaluate
from .errors import BudgetExceeded
from .metric import ABS_TOL, REL_TOL

MAX_SUBSETS = 10**7
UFL_FULL_ENUMERATION_MAX = 20
_CHUNK = 1 << 14


@dataclass
class ExactResult:
    open: tuple
    cost: float
    examined: int
    solution: object

    def to_json(self):
        return {"open": list(self.open), "cost": self.cost, "examined": self.examined,
                "solution": self.solution.to_json()}


def _pick(best_cost, candidates):
    """Lexicographically first subset among those within tolerance of the minimum."""
    tol = max(REL_TOL * abs(best_cost), ABS_TOL)
    ties = [c for cost, c in candidates if cost <= best_cost + tol]
    return min(ties)


def _scan_combos(inst, m, size):
    cost = inst.costs
    opening = inst.opening_costs
    best = np.inf
    pool = []
    it = combinations(range(m), size)
    examined = 0
    while True:
        block = list(islice(it, _CHUNK))
        if not block:
            break
        arr = np.array(block, dtype=np.int64).reshape(len(block), size)
        vals = kernels.combo_costs(cost, arr, inst.z)
        if inst.is_ufl:
            vals = vals + opening[arr].sum(axis=1)
        examined += len(block)
        lo = vals.min()
        if lo < best:
            best = lo
        tol = max(REL_TOL * abs(best), ABS_TOL)
        keep = np.flatnonzero(vals <= best + tol)
        pool = [(c, t) for c, t in pool if c <= best + tol]
        pool.extend((float(vals[r]), tuple(block[r])) for r in keep)
    return best, pool, examined


def _scan_masks(inst, m):
    cost = inst.costs
    opening = inst.opening_costs
    total = (1 << m) - 1
    bits = 1 << np.arange(m, dtype=np.int64)
    best = np.inf
    pool = []
    for lo in range(1, total + 1, _CHUNK):
        codes = np.arange(lo, min(lo + _CHUNK, total + 1), dtype=np.int64)
        masks = (codes[:, None] & bits[None, :]) != 0
        vals = kernels.mask_costs(cost, masks, inst.z) + masks @ opening
        if vals.min() < best:
            best = vals.min()
        tol = max(REL_TOL * abs(best), ABS_TOL)
        keep = np.flatnonzero(vals <= best + tol)
        pool = [(c, t) for c, t in pool if c <= best + tol]
        pool.extend((float(vals[r]), tuple(int(i) for i in np.flatnonzero(masks[r]))) for r in keep)
    return best, pool, total


def solve_exact(inst, size_cap=None, k=None, max_subsets=MAX_SUBSETS):
    """Globally optimal open set by enumeration.

    k-clustering: every subset of size ``k`` (default: the instance budget,
    which is optimal because adding centres never raises the cost).
    UFL: every nonempty subset when ``m <= 20``, otherwise every subset of
    size at most ``size_cap``.
    """
    m = inst.m
    if not inst.is_ufl:
        size = min(inst.budget if k is None else int(k), m)
        n_sub = comb(m, size)
        if n_sub > max_subsets:
            raise BudgetExceeded(f"C({m},{size}) = {n_sub} subsets exceeds cap {max_subsets}")
        best, pool, examined = _scan_combos(inst, m, size)
    elif m <= UFL_FULL_ENUMERATION_MAX and size_cap is None:
        best, pool, examined = _scan_masks(inst, m)
    else:
        if size_cap is None:
            raise BudgetExceeded(f"UFL with {m} > {UFL_FULL_ENUMERATION_MAX} centres needs a size_cap")
        cap = min(int(size_cap), m)
        n_sub = sum(comb(m, s) for s in range(1, cap + 1))
        if n_sub > max_subsets:
            raise BudgetExceeded(f"{n_sub} subsets exceeds cap {max_subsets}")
        best, pool, examined = np.inf, [], 0
        for s in range(1, cap + 1):
            b, p, e = _scan_combos(inst, m, s)
            examined += e
            best = min(best, b)
            pool.extend(p)
    chosen = _pick(best, pool)
    sol = evaluate(inst, chosen)
    return ExactResult(open=tuple(chosen), cost=sol.cost, examined=examined, solution=sol)
