"""Locality-gap instances and their certification.

``gen_ufl_gap`` builds the non-uniform UFL-out family whose ``rho``-swap local
optimum costs ``z`` against an optimum of ``rho``. ``gen_kmed_gap`` builds the
Euclidean k-median/k-means-out family (sets B, C_1..C_{k-1}, D_1..D_{k-2}, E)
whose local optimum survives every swap of size ``rho < k - 1``.

Sets are pushed apart by a separation ``L = 1e6 * (largest intra-set
distance, or 1)``. Rings live in the first ``dim`` coordinates; each set is
translated by a multiple of ``L`` along one extra axis, so intra-set
differences never mix with the large offsets and stay exact.
"""
from dataclasses import dataclass

import numpy as np

from .cost import evaluate
from .errors import BudgetExceeded, InstanceError
from .exact import solve_exact
from .instance import Instance, KClusterOut, UflOut
from .metric import ABS_TOL, REL_TOL, MetricSpace, euclidean_block
from .search import certify_local_optimum

SEPARATION_FACTOR = 1e6


@dataclass
class GapInstance:
    instance: Instance
    stated_local: tuple
    stated_opt: tuple
    info: dict


def separation(sets):
    """``1e6 *`` the largest intra-set distance (``1e6`` if all sets are points)."""
    widest = 0.0
    for pts in sets:
        if len(pts) > 1:
            widest = max(widest, float(euclidean_block(pts, pts).max()))
    return SEPARATION_FACTOR * (widest if widest > 0 else 1.0)


def _layout(point_sets, center_sets, dim):
    """Translate set ``s`` to ``s * L`` along axis ``dim``."""
    L = separation(point_sets)
    pts, ctr = [], []
    for s, (p, c) in enumerate(zip(point_sets, center_sets)):
        shift = np.zeros(dim + 1)
        shift[dim] = s * L
        if len(p):
            pts.append(np.hstack([p, np.zeros((len(p), 1))]) + shift)
        if len(c):
            ctr.append(np.hstack([c, np.zeros((len(c), 1))]) + shift)
    return np.vstack(pts), np.vstack(ctr), L


def ring(count, radius, dim):
    """``count`` points at angles ``2 pi t / count`` (phase 0) in the first plane."""
    out = np.zeros((count, dim))
    if count:
        ang = 2.0 * np.pi * np.arange(count) / count
        out[:, 0] = radius * np.cos(ang)
        out[:, 1] = radius * np.sin(ang)
    return out


def gen_ufl_gap(rho, z, dim=2):
    """Set A: centre ``i`` (cost ``rho``) with ``z`` co-located points.
    Sets B_1..B_z: centre ``i_l`` (cost 1) with one co-located point.

    Centre ids: ``i = 0``, ``i_l = l``. Stated local optimum ``{1..z}``
    (cost ``z``), stated optimum ``{0}`` (cost ``rho``).
    """
    if int(rho) != rho or rho < 1:
        raise InstanceError("rho", "must be an integer >= 1")
    if int(z) != z or z <= rho:
        raise InstanceError("z", f"must be an integer > rho (got z={z}, rho={rho})")
    rho, z = int(rho), int(z)
    origin = np.zeros((1, dim))
    point_sets = [np.zeros((z, dim))] + [origin.copy() for _ in range(z)]
    center_sets = [origin.copy() for _ in range(z + 1)]
    X, C, L = _layout(point_sets, center_sets, dim)
    opening = (float(rho),) + (1.0,) * z
    metric = MetricSpace.from_euclidean(X, C, q=1.0)
    labels = {"family": "ufl-gap", "rho": rho, "z": z, "separation": L}
    inst = Instance(metric, UflOut(opening), z, labels=labels)
    return GapInstance(inst, tuple(range(1, z + 1)), (0,),
                       {"expected_local_cost": float(z), "expected_opt_cost": float(rho),
                        "expected_ratio": z / rho})


def kmed_gap_condition(u, beta, gamma, q=1.0):
    """``gamma^q < (u-1) beta^q < 2 gamma^q`` on connection costs."""
    g, b = gamma ** q, beta ** q
    return g < (u - 1) * b < 2 * g


def gen_kmed_gap(k, z, beta, gamma, n=None, q=1.0, dim=2, check=True):
    """Euclidean k-median/k-means-out gap family.

    With ``u = z / (k - 1)``: B has ``n - 2z`` co-located points; each C_i a
    centre point plus ``u - 1`` ring points at radius ``beta``; each D_j
    ``u - 1`` co-located points; E a centre point plus ``u + k - 3`` ring
    points at radius ``gamma``. Candidate centres sit at f(B), f(C_i), f(D_j),
    f(E) with ids ``0``, ``1..k-1``, ``k..2k-3``, ``2k-2``.
    """
    if int(k) != k or k < 2:
        raise InstanceError("k", "must be an integer >= 2")
    k, z = int(k), int(z)
    if z < 1 or z % (k - 1):
        raise InstanceError("z", f"must be a positive multiple of k-1={k - 1}")
    u = z // (k - 1)
    if u < k - 1 or u < 2:
        raise InstanceError("z", f"u = z/(k-1) = {u} must be >= max(k-1, 2)")
    if not (beta > 0 and gamma > 0):
        raise InstanceError("beta", "beta and gamma must be positive")
    if check and not kmed_gap_condition(u, beta, gamma, q):
        raise InstanceError("gamma", f"need gamma^q < (u-1) beta^q < 2 gamma^q (u={u}, q={q})")
    n = 5 * z if n is None else int(n)
    if n - 2 * z < 1:
        raise InstanceError("n", f"n={n} leaves no points in B (need n > 2z = {2 * z})")
    origin = np.zeros((1, dim))
    point_sets = [np.zeros((n - 2 * z, dim))]
    point_sets += [np.vstack([origin, ring(u - 1, beta, dim)]) for _ in range(k - 1)]
    point_sets += [np.zeros((u - 1, dim)) for _ in range(k - 2)]
    point_sets.append(np.vstack([origin, ring(u + k - 3, gamma, dim)]))
    center_sets = [origin.copy() for _ in point_sets]
    X, C, L = _layout(point_sets, center_sets, dim)
    metric = MetricSpace.from_euclidean(X, C, q=q)
    labels = {"family": "kmed-gap", "k": k, "z": z, "u": u, "beta": float(beta),
              "gamma": float(gamma), "n": n, "separation": L}
    inst = Instance(metric, KClusterOut(k, 0.0), z, labels=labels)
    local = (0,) + tuple(range(k, 2 * k - 2)) + (2 * k - 2,)
    opt = tuple(range(0, k))
    exp_local = (u + k - 3) * gamma ** q
    exp_opt = (k - 1) * (u - 1) * beta ** q
    return GapInstance(inst, local, opt, {
        "u": u,
        "expected_local_cost": exp_local,
        "expected_opt_cost": exp_opt,
        "expected_ratio": exp_local / exp_opt,
        "ratio_lower_bound": (u - k + 2) / (2 * (k - 1)),
    })


@dataclass
class GapReport:
    local_certified: bool
    ratio: float
    local_cost: float
    opt_cost: float
    opt_confirmed: object = None
    oracle_cost: object = None
    counterexample: object = None

    def to_json(self):
        out = {"localCertified": self.local_certified, "ratio": self.ratio,
               "localCost": self.local_cost, "optCost": self.opt_cost}
        if self.opt_confirmed is not None:
            out["optConfirmed"] = self.opt_confirmed
            out["oracleCost"] = self.oracle_cost
        if self.counterexample is not None:
            out["counterexample"] = {"P": list(self.counterexample.P),
                                     "Q": list(self.counterexample.Q),
                                     "delta": self.counterexample.delta}
        return out


def verify_gap(inst, stated_local, stated_opt, rho, confirm_opt=True):
    """Certify ``stated_local`` for ``rho``-swaps and report the cost ratio."""
    local = evaluate(inst, stated_local)
    opt = evaluate(inst, stated_opt)
    cert = certify_local_optimum(inst, local, rho)
    report = GapReport(cert.certified, local.cost / opt.cost, local.cost, opt.cost,
                       counterexample=cert.counterexample)
    if confirm_opt:
        try:
            ex = solve_exact(inst)
        except BudgetExceeded:
            return report
        tol = max(REL_TOL * abs(opt.cost), ABS_TOL)
        report.opt_confirmed = bool(abs(ex.cost - opt.cost) <= tol)
        report.oracle_cost = ex.cost
    return report


def ring_radii(points, center):
    return np.sqrt(((points - center) ** 2).sum(axis=1))
