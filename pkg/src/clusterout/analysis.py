"""Executable version of the outlier pairing / grouping machinery.

Given a local solution S and a global solution O on the same instance, this
module builds the objects the approximation analysis reasons about and checks
their structural properties on concrete data:

* the point classes (assigned / outlier in S and in O);
* a partition of the centres of S and O into parts, with the per-part
  surplus ``delta_P = #{j outlier in S : sigma*(j) in P} - #{j outlier in O : sigma(j) in P}``;
* the bijection ``kappa`` from S-outliers to O-outliers, first within parts and
  then across parts by the two-pointer sweep that also creates super-edges;
* groups of ``alpha`` consecutive super-edges and the parts they split.

Centres are tagged ``("S", i)`` / ``("O", i)`` so a centre open in both
solutions appears twice, once per side.
"""
from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np

from .cost import Solution, evaluate

S_TAG = "S"
O_TAG = "O"


def node_key(node):
    return (node[1], node[0])


def part_key(part):
    return min(node_key(v) for v in part)


@dataclass
class Classes:
    """Point classes after removing points that are outliers in both solutions."""

    assigned_local: frozenset
    outliers_local: frozenset
    assigned_global: frozenset
    outliers_global: frozenset
    removed: frozenset
    z: int
    sigma: np.ndarray
    sigma_star: np.ndarray
    local_open: tuple
    global_open: tuple


def _as_solution(inst, sol):
    return sol if isinstance(sol, Solution) else evaluate(inst, sol)


def compute_classes(inst, local, global_):
    local = _as_solution(inst, local)
    global_ = _as_solution(inst, global_)
    if local.instance is not inst or global_.instance is not inst:
        raise ValueError("solutions do not belong to this instance")
    xo = set(int(j) for j in local.outliers)
    xos = set(int(j) for j in global_.outliers)
    if len(xo) != inst.z or len(xos) != inst.z:
        raise ValueError("outlier counts differ from z")
    both = xo & xos
    everyone = set(range(inst.n)) - both
    xo -= both
    xos -= both
    return Classes(
        assigned_local=frozenset(everyone - xo),
        outliers_local=frozenset(xo),
        assigned_global=frozenset(everyone - xos),
        outliers_global=frozenset(xos),
        removed=frozenset(both),
        z=inst.z - len(both),
        sigma=local.sigma,
        sigma_star=global_.sigma,
        local_open=tuple(int(i) for i in local.open),
        global_open=tuple(int(i) for i in global_.open),
    )


# -- partitions ------------------------------------------------------------

def centre_nodes(classes):
    return ([(S_TAG, i) for i in classes.local_open], [(O_TAG, i) for i in classes.global_open])


def singleton_partition(classes):
    s_nodes, o_nodes = centre_nodes(classes)
    return [frozenset([v]) for v in s_nodes + o_nodes]


def random_partition(classes, rho, rng):
    """Random parts with at most ``rho`` centres from each side."""
    s_nodes, o_nodes = centre_nodes(classes)
    s_nodes = [s_nodes[t] for t in rng.permutation(len(s_nodes))]
    o_nodes = [o_nodes[t] for t in rng.permutation(len(o_nodes))]
    parts = []
    while s_nodes or o_nodes:
        a = int(rng.integers(0, min(rho, len(s_nodes)) + 1))
        b = int(rng.integers(0, min(rho, len(o_nodes)) + 1))
        if a + b == 0:
            if s_nodes:
                a = 1
            else:
                b = 1
        parts.append(frozenset(s_nodes[:a] + o_nodes[:b]))
        s_nodes, o_nodes = s_nodes[a:], o_nodes[b:]
    return parts


def check_partition(classes, parts):
    s_nodes, o_nodes = centre_nodes(classes)
    universe = set(s_nodes) | set(o_nodes)
    seen = set()
    for part in parts:
        if not part:
            raise ValueError("empty part")
        if part & seen:
            raise ValueError("parts overlap")
        seen |= part
    if seen != universe:
        raise ValueError("parts do not cover the centres of S and O")
    return [frozenset(p) for p in parts]


def part_deltas(classes, parts):
    owner = {v: t for t, part in enumerate(parts) for v in part}
    reclaim = [[] for _ in parts]   # j outlier in S with sigma*(j) in P
    create = [[] for _ in parts]    # j outlier in O with sigma(j) in P
    for j in sorted(classes.outliers_local):
        reclaim[owner[(O_TAG, int(classes.sigma_star[j]))]].append(j)
    for j in sorted(classes.outliers_global):
        create[owner[(S_TAG, int(classes.sigma[j]))]].append(j)
    deltas = [len(r) - len(c) for r, c in zip(reclaim, create)]
    return deltas, reclaim, create


# -- pairing ---------------------------------------------------------------

@dataclass
class PairingStructure:
    parts: list
    deltas: list
    kappa: dict
    within_pairs: list
    cross_pairs: list
    plus: list
    minus: list
    super_edges: list
    edge_pairs: list = field(default_factory=list)

    @property
    def zero_parts(self):
        return [t for t, d in enumerate(self.deltas) if d == 0]


def build_pairing(parts, classes):
    """Pair outliers within parts, then across parts by the two-pointer sweep."""
    if len(classes.outliers_local) != len(classes.outliers_global):
        raise ValueError("outlier classes differ in size after reduction")
    parts = list(parts)
    deltas, reclaim, create = part_deltas(classes, parts)
    kappa, within = {}, []
    spare_plus, spare_minus = {}, {}
    for t in range(len(parts)):
        r, c = reclaim[t], create[t]
        m = min(len(r), len(c))
        for a, b in zip(r[:m], c[:m]):
            kappa[a] = b
            within.append((a, b))
        if deltas[t] > 0:
            spare_plus[t] = list(r[m:])
        elif deltas[t] < 0:
            spare_minus[t] = list(c[m:])
    plus = sorted(spare_plus, key=lambda t: part_key(parts[t]))
    minus = sorted(spare_minus, key=lambda t: part_key(parts[t]))
    a = b = 0
    edges, cross, edge_pairs = [], [], []
    while a < len(plus) and b < len(minus):
        pa, pb = spare_plus[plus[a]], spare_minus[minus[b]]
        made = []
        while pa and pb:
            j, jj = pa.pop(0), pb.pop(0)
            kappa[j] = jj
            cross.append((j, jj))
            made.append((j, jj))
        edges.append((plus[a], minus[b]))
        edge_pairs.append(made)
        if not pa:
            a += 1
        if not pb:
            b += 1
    if any(spare_plus.values()) or any(spare_minus.values()):
        raise ValueError("unpaired outliers remain after the sweep")
    return PairingStructure(parts, deltas, kappa, within, cross, plus, minus, edges, edge_pairs)


# -- grouping --------------------------------------------------------------

@dataclass
class Group:
    centres: frozenset
    parts: tuple
    edges: tuple = ()
    simple: bool = False
    merged_all: bool = False
    split_parts: tuple = ()

    def side(self, tag):
        return frozenset(v for v in self.centres if v[0] == tag)


def default_alpha(rho, variant="kcluster", eps=None):
    """Group size: ``ceil(4 rho / eps)`` for UFL, ``2 rho + 3`` for k-clustering."""
    if variant == "ufl":
        if eps is None or eps <= 0:
            raise ValueError("UFL group size needs eps > 0")
        return int(math.ceil(4 * rho / eps))
    return 2 * rho + 3


def _edge_blocks(n_edges, alpha):
    blocks = [list(range(lo, min(lo + alpha, n_edges))) for lo in range(0, n_edges, alpha)]
    if len(blocks) >= 2:
        last = blocks.pop()
        blocks[-1].extend(last)
    return blocks


def build_groups(ps, alpha, variant="kcluster"):
    """Groups of consecutive super-edges, plus one simple group per zero-surplus part.

    ``variant`` only documents which default ``alpha`` the caller used; the
    construction is identical for both problem families.
    """
    if alpha < 2:
        raise ValueError("alpha must be >= 2")
    groups = []
    n_edges = len(ps.super_edges)
    if 0 < n_edges <= alpha:
        members = tuple(sorted(set(ps.plus) | set(ps.minus)))
        centres = frozenset().union(*(ps.parts[t] for t in members))
        groups.append(Group(centres, members, tuple(range(n_edges)), merged_all=True))
    elif n_edges > alpha:
        for block in _edge_blocks(n_edges, alpha):
            members = sorted({t for e in block for t in ps.super_edges[e]})
            centres = frozenset().union(*(ps.parts[t] for t in members))
            groups.append(Group(centres, tuple(members), tuple(block)))
    for t in ps.zero_parts:
        groups.append(Group(ps.parts[t], (t,), simple=True))
    return detect_splits(groups, ps)


def incident_edges(ps):
    inc = {}
    for e, (a, b) in enumerate(ps.super_edges):
        inc.setdefault(a, []).append(e)
        inc.setdefault(b, []).append(e)
    return inc


def detect_splits(groups, ps):
    """Annotate each group with the parts it contains whose super-edges leave it."""
    inc = incident_edges(ps)
    out = []
    for g in groups:
        split = ()
        if not g.simple:
            own = set(g.edges)
            split = tuple(t for t in sorted(inc) if ps.parts[t] <= g.centres
                          and not set(inc[t]) <= own)
        out.append(Group(g.centres, g.parts, g.edges, g.simple, g.merged_all, split))
    return out


# -- structural checks -----------------------------------------------------

def superedge_forest(ps):
    """``(acyclic, caterpillar)`` for the graph on parts with super-edges."""
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    acyclic = True
    for a, b in ps.super_edges:
        ra, rb = find(("+", a)), find(("-", b))
        if ra == rb:
            acyclic = False
        parent[ra] = rb
    if not acyclic:
        return False, False
    adj = {}
    for a, b in ps.super_edges:
        adj.setdefault(("+", a), set()).add(("-", b))
        adj.setdefault(("-", b), set()).add(("+", a))
    spine = {v for v, nb in adj.items() if len(nb) > 1}
    caterpillar = all(len(adj[v] & spine) <= 2 for v in spine)
    return True, caterpillar


def kappa_is_bijection(ps, classes):
    keys = set(ps.kappa)
    vals = list(ps.kappa.values())
    return (keys == set(classes.outliers_local) and len(set(vals)) == len(vals)
            and set(vals) == set(classes.outliers_global))


def uncovered_outliers(ps, classes, groups):
    missing = []
    for j, jj in ps.kappa.items():
        a = (O_TAG, int(classes.sigma_star[j]))
        b = (S_TAG, int(classes.sigma[jj]))
        if not any(a in g.centres and b in g.centres for g in groups):
            missing.append(j)
    return missing


def group_size_violations(groups, alpha, rho):
    bad = []
    for s, g in enumerate(groups):
        if g.simple:
            continue
        if g.merged_all:
            cap = 2 * alpha * rho
            if len(g.side(S_TAG)) > cap or len(g.side(O_TAG)) > cap:
                bad.append(s)
        elif not (alpha - 1 <= len(g.centres) <= 8 * rho * alpha):
            bad.append(s)
    return bad


@dataclass
class LemmaReport:
    checks: dict
    n_parts: int
    n_super_edges: int
    n_groups: int
    details: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())

    def to_json(self):
        return {"ok": self.ok, "checks": self.checks, "parts": self.n_parts,
                "superEdges": self.n_super_edges, "groups": self.n_groups,
                "details": self.details}


def analyze(classes, parts, alpha, rho):
    """Run pairing, grouping and every structural check on one partition."""
    ps = build_pairing(parts, classes)
    groups = build_groups(ps, alpha)
    acyclic, caterpillar = superedge_forest(ps)
    missing = uncovered_outliers(ps, classes, groups)
    size_bad = group_size_violations(groups, alpha, rho)
    split_bad = [s for s, g in enumerate(groups) if len(g.split_parts) > 2]
    checks = {
        "kappa_bijective": kappa_is_bijection(ps, classes),
        "delta_sum_zero": sum(ps.deltas) == 0,
        "superedges_acyclic": acyclic,
        "superedges_caterpillar": caterpillar,
        "group_size_bounds": not size_bad,
        "at_most_two_splits": not split_bad,
        "outlier_coverage": not missing,
        "parts_in_some_group": all(any(p <= g.centres for g in groups) for p in ps.parts),
    }
    details = {}
    if size_bad:
        details["group_size_violations"] = size_bad
    if split_bad:
        details["split_violations"] = split_bad
    if missing:
        details["uncovered_outliers"] = missing
    return LemmaReport(checks, len(ps.parts), len(ps.super_edges), len(groups), details), ps, groups


def lemma_report(inst, local, global_, policy="random", alpha=None, rho=2, rng=None,
                 parts: Optional[list] = None):
    """Full pipeline on one (local, global) pair.

    ``policy`` is ``"singleton"``, ``"random"`` (parts with at most ``rho``
    centres per side) or ``"given"`` (use ``parts``).
    """
    classes = compute_classes(inst, local, global_)
    if policy == "singleton":
        parts = singleton_partition(classes)
        rho_eff = 1
    elif policy == "random":
        rng = rng if rng is not None else np.random.default_rng(0)
        parts = random_partition(classes, rho, rng)
        rho_eff = rho
    elif policy == "given":
        parts = check_partition(classes, parts or [])
        rho_eff = max(max(sum(1 for v in p if v[0] == S_TAG), sum(1 for v in p if v[0] == O_TAG))
                      for p in parts)
    else:
        raise ValueError(f"unknown partition policy {policy!r}")
    alpha = default_alpha(rho_eff) if alpha is None else int(alpha)
    report, _, _ = analyze(classes, parts, alpha, rho_eff)
    return report
