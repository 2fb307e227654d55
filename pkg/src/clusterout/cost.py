"""Exact cost with outliers and incremental swap evaluation.

``cost(S)`` sorts points by connection cost to ``S``, drops the ``z`` most
expensive ones, and sums the rest; UFL adds the opening costs of ``S``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import MoveError


def _ids(values):
    return np.unique(np.asarray(list(values), dtype=np.int64))


@dataclass(frozen=True)
class SwapMove:
    """Open ``P`` (currently closed) and close ``Q`` (currently open)."""

    P: tuple = ()
    Q: tuple = ()
    delta: float = None

    def __post_init__(self):
        object.__setattr__(self, "P", tuple(sorted(int(i) for i in self.P)))
        object.__setattr__(self, "Q", tuple(sorted(int(i) for i in self.Q)))

    @property
    def size(self):
        return len(self.P) + len(self.Q)

    def key(self):
        return (self.size, self.P, self.Q)

    def reversed(self):
        return SwapMove(self.Q, self.P)

    def to_json(self):
        return {"P": list(self.P), "Q": list(self.Q)}


@dataclass(frozen=True, eq=False)
class Solution:
    """An open centre set with its induced assignment.

    ``sigma[j]`` is the serving centre or ``-1`` for outliers. ``nearest`` /
    ``second`` cache the two cheapest open centres per point (``second`` is
    ``-1`` when only one centre is open).
    """

    instance: object = field(repr=False)
    open: np.ndarray
    nearest: np.ndarray = field(repr=False)
    nearest_cost: np.ndarray = field(repr=False)
    second: np.ndarray = field(repr=False)
    second_cost: np.ndarray = field(repr=False)
    outlier_mask: np.ndarray = field(repr=False)
    total_assign: float
    total_open: float

    @property
    def cost(self):
        return self.total_assign + self.total_open

    @property
    def outliers(self):
        return np.flatnonzero(self.outlier_mask)

    @property
    def assigned(self):
        return np.flatnonzero(~self.outlier_mask)

    @property
    def sigma(self):
        return np.where(self.outlier_mask, -1, self.nearest)

    @property
    def open_set(self):
        return frozenset(int(i) for i in self.open)

    def to_json(self):
        return {
            "open": [int(i) for i in self.open],
            "outliers": [int(j) for j in self.outliers],
            "sigma": [int(s) for s in self.sigma],
            "cost": float(self.cost),
        }

    def same_state(self, other):
        """Field-for-field equality (ids exact, floats bit-equal)."""
        return (
            np.array_equal(self.open, other.open)
            and np.array_equal(self.nearest, other.nearest)
            and np.array_equal(self.second, other.second)
            and np.array_equal(self.nearest_cost, other.nearest_cost)
            and np.array_equal(self.second_cost, other.second_cost)
            and np.array_equal(self.outlier_mask, other.outlier_mask)
            and self.total_assign == other.total_assign
            and self.total_open == other.total_open
        )


def _check_open(inst, open_ids):
    if open_ids.size == 0:
        raise MoveError("open centre set must be nonempty")
    if open_ids[0] < 0 or open_ids[-1] >= inst.m:
        raise MoveError(f"centre id out of range [0, {inst.m})")
    if open_ids.size > inst.budget:
        raise MoveError(f"{open_ids.size} open centres exceed budget {inst.budget}")


def _opening_total(inst, open_ids):
    if inst.is_ufl:
        return math.fsum(inst.opening_costs[open_ids])
    return 0.0


def _finish(inst, open_ids, near, near_cost, sec, sec_cost):
    out = kernels.outlier_mask(near_cost, inst.z)
    return Solution(
        instance=inst,
        open=open_ids,
        nearest=near,
        nearest_cost=near_cost,
        second=sec,
        second_cost=sec_cost,
        outlier_mask=out,
        total_assign=float(kernels.kept_sum(near_cost, out)),
        total_open=_opening_total(inst, open_ids),
    )


def evaluate(inst, open_centers):
    """Build the :class:`Solution` for opening ``open_centers`` from scratch."""
    open_ids = _ids(open_centers)
    _check_open(inst, open_ids)
    near, near_cost, sec, sec_cost = kernels.nearest_two(inst.costs, open_ids)
    return _finish(inst, open_ids, near, near_cost, sec, sec_cost)


def _prepare(sol, move):
    inst = sol.instance
    P = np.asarray(move.P, dtype=np.int64)
    Q = np.asarray(move.Q, dtype=np.int64)
    open_mask = np.zeros(inst.m, dtype=np.bool_)
    open_mask[sol.open] = True
    if P.size and (P.min() < 0 or P.max() >= inst.m):
        raise MoveError("P contains an invalid centre id")
    if P.size and open_mask[P].any():
        raise MoveError("P must contain only closed centres")
    if Q.size and (Q.min() < 0 or Q.max() >= inst.m or not open_mask[Q].all()):
        raise MoveError("Q must contain only open centres")
    in_q = np.zeros(inst.m, dtype=np.bool_)
    in_q[Q] = True
    remaining = sol.open[~in_q[sol.open]]
    new_open = np.union1d(remaining, P).astype(np.int64)
    _check_open(inst, new_open)
    return P, in_q, remaining, new_open


def swap_cost(sol, move):
    """Cost of ``(S - Q) | P`` computed from the cached top-two distances."""
    if not move.P and not move.Q:
        return sol.cost
    inst = sol.instance
    P, in_q, remaining, new_open = _prepare(sol, move)
    values = kernels.swap_point_costs(inst.costs, sol.nearest, sol.nearest_cost, sol.second,
                                      sol.second_cost, in_q, remaining, P)
    out = kernels.outlier_mask(values, inst.z)
    return float(kernels.kept_sum(values, out)) + _opening_total(inst, new_open)


def delta_of_swap(sol, move):
    """``cost((S - Q) | P) - cost(S)``; ``sol`` is not modified."""
    if not move.P and not move.Q:
        return 0.0
    return swap_cost(sol, move) - sol.cost


def apply_swap(sol, move):
    """New :class:`Solution` for ``(S - Q) | P`` with caches repaired incrementally."""
    if not move.P and not move.Q:
        return sol
    inst = sol.instance
    P, in_q, remaining, new_open = _prepare(sol, move)
    near, near_cost, sec, sec_cost = kernels.repair_top2(
        inst.costs, sol.nearest, sol.nearest_cost, sol.second, sol.second_cost, in_q, new_open, P)
    return _finish(inst, new_open, near, near_cost, sec, sec_cost)


def solution_from_json(inst, doc):
    """Re-evaluate a serialized solution; only ``open`` is trusted."""
    return evaluate(inst, doc["open"])
