import numpy as np
import pytest

from clusterout.analysis import (O_TAG, S_TAG, analyze, build_groups, build_pairing, compute_classes,
                                 default_alpha, lemma_report, random_partition, singleton_partition,
                                 superedge_forest)
from clusterout.cost import evaluate
from clusterout.instance import make_instance
from clusterout.metric import MetricSpace


def matrix_instance(mat, z):
    mat = np.asarray(mat, dtype=float)
    return make_instance(MetricSpace.from_matrix(mat), k=mat.shape[1], z=z)


def test_identical_solutions_reduce_to_nothing():
    rng = np.random.default_rng(0)
    inst = matrix_instance(rng.random((15, 6)), z=4)
    cl = compute_classes(inst, [0, 2], [0, 2])
    assert not cl.outliers_local and not cl.outliers_global
    assert len(cl.removed) == 4 and cl.z == 0


def test_zero_outliers():
    rng = np.random.default_rng(1)
    inst = matrix_instance(rng.random((10, 5)), z=0)
    cl = compute_classes(inst, [0, 1], [3, 4])
    assert not (cl.outliers_local or cl.outliers_global or cl.removed)


def test_classes_recomputed_directly():
    rng = np.random.default_rng(2)
    inst = matrix_instance(rng.random((20, 8)), z=5)
    S, O = [0, 1, 2], [4, 5, 6]
    cl = compute_classes(inst, S, O)
    a, b = evaluate(inst, S), evaluate(inst, O)
    xo, xos = set(a.outliers.tolist()), set(b.outliers.tolist())
    assert cl.removed == xo & xos
    assert cl.outliers_local == xo - xos
    assert cl.outliers_global == xos - xo
    assert len(cl.assigned_local) == 20 - len(xo | xos) + len(xos - xo)


def two_part_instance():
    # S = {0}, O = {1}; points 0,1 are S-outliers served by O, points 2,3 are O-outliers served by S
    mat = [[50.0, 0.0], [50.0, 0.0], [0.0, 50.0], [0.0, 50.0], [0.0, 0.0]]
    return matrix_instance(mat, z=2)


def test_all_zero_deltas_no_superedges():
    inst = two_part_instance()
    cl = compute_classes(inst, [0], [1])
    parts = [frozenset([(S_TAG, 0), (O_TAG, 1)])]
    ps = build_pairing(parts, cl)
    assert ps.deltas == [0]
    assert ps.super_edges == [] and ps.cross_pairs == []
    assert len(ps.within_pairs) == 2
    groups = build_groups(ps, 3)
    assert all(g.simple for g in groups) and len(groups) == 1


def test_plus_minus_two_single_superedge():
    inst = two_part_instance()
    cl = compute_classes(inst, [0], [1])
    parts = singleton_partition(cl)
    ps = build_pairing(parts, cl)
    assert sorted(ps.deltas) == [-2, 2]
    assert len(ps.super_edges) == 1
    assert len(ps.cross_pairs) == 2
    assert ps.kappa == {0: 2, 1: 3}


def _chain(n_edges):
    """Parts alternating +1 / -1 so the sweep yields exactly ``n_edges`` super-edges."""
    n_pairs = n_edges
    rows = []
    for t in range(n_pairs):
        # an S-outlier served by O centre t, then an O-outlier served by S centre t
        rows.append([100.0] * n_pairs + [0.0 if c == t else 100.0 for c in range(n_pairs)])
        rows.append([0.0 if c == t else 100.0 for c in range(n_pairs)] + [100.0] * n_pairs)
    rows.append([0.0] * (2 * n_pairs))
    inst = matrix_instance(rows, z=n_pairs)
    S = list(range(n_pairs))
    O = list(range(n_pairs, 2 * n_pairs))
    return inst, S, O


def test_many_edges_form_blocks_and_tail_merges():
    alpha = 3
    inst, S, O = _chain(alpha + 1)
    cl = compute_classes(inst, S, O)
    ps = build_pairing(singleton_partition(cl), cl)
    assert len(ps.super_edges) == alpha + 1
    groups = [g for g in build_groups(ps, alpha) if not g.simple]
    assert len(groups) == 1
    assert len(groups[0].edges) == alpha + 1
    assert not groups[0].merged_all


def test_no_superedges_only_simple_groups():
    inst = two_part_instance()
    cl = compute_classes(inst, [0], [1])
    ps = build_pairing([frozenset([(S_TAG, 0), (O_TAG, 1)])], cl)
    assert all(g.simple for g in build_groups(ps, 2))


def test_default_alpha():
    assert default_alpha(2) == 7
    assert default_alpha(2, "ufl", eps=0.5) == 16
    with pytest.raises(ValueError):
        default_alpha(2, "ufl")


def test_forest_detects_cycle():
    class Fake:
        super_edges = [(0, 1), (2, 1), (2, 3), (0, 3)]
    assert superedge_forest(Fake) == (False, False)


def test_random_partition_respects_rho():
    rng = np.random.default_rng(3)
    inst = matrix_instance(rng.random((20, 12)), z=6)
    cl = compute_classes(inst, [0, 1, 2, 3, 4], [5, 6, 7, 8, 9, 10])
    for _ in range(50):
        parts = random_partition(cl, 2, rng)
        for p in parts:
            assert sum(v[0] == S_TAG for v in p) <= 2 and sum(v[0] == O_TAG for v in p) <= 2


@pytest.mark.parametrize("policy", ["singleton", "random"])
def test_lemma_report_on_overlapping_solutions(policy):
    rng = np.random.default_rng(4)
    inst = matrix_instance(rng.random((24, 10)), z=8)
    rep = lemma_report(inst, [0, 1, 2, 3], [2, 3, 6, 7, 8], policy=policy, rho=2, rng=rng)
    assert rep.ok, rep.details


def test_given_partition_checked():
    inst = two_part_instance()
    with pytest.raises(ValueError):
        lemma_report(inst, [0], [1], policy="given", parts=[frozenset([(S_TAG, 0)])])
    rep = lemma_report(inst, [0], [1], policy="given",
                       parts=[frozenset([(S_TAG, 0)]), frozenset([(O_TAG, 1)])], alpha=2)
    assert rep.ok


def test_analyze_counts():
    inst, S, O = _chain(5)
    cl = compute_classes(inst, S, O)
    rep, ps, groups = analyze(cl, singleton_partition(cl), 2, 1)
    assert rep.ok
    assert rep.n_super_edges == 5
    assert rep.n_groups == len(groups) == 2
