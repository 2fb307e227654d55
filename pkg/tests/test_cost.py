import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clusterout.cost import SwapMove, apply_swap, delta_of_swap, evaluate, swap_cost
from clusterout.errors import MoveError
from clusterout.gaps import gen_ufl_gap
from clusterout.instance import make_instance
from clusterout.metric import MetricSpace, close


def naive_cost(dist, open_ids, z, q, opening=None):
    """Independent reference: sort every point's nearest cost, drop the top z, add."""
    d = np.asarray(dist)[:, sorted(open_ids)]
    per_point = sorted(float(min(row)) ** q for row in d)
    total = sum(per_point[:len(per_point) - z])
    if opening is not None:
        total += sum(opening[i] for i in open_ids)
    return total


def random_euclid(rng, n, m, q=1.0, **kw):
    ms = MetricSpace.from_euclidean(rng.random((n, 2)), rng.random((m, 2)), q=q)
    return make_instance(ms, **kw)


def test_colocated_single_centre_costs_opening_only():
    inst = make_instance(MetricSpace.from_euclidean(np.zeros((6, 2)), np.zeros((1, 2))), z=0)
    assert evaluate(inst, [0]).cost == 1.0


def test_ufl_gap_stated_local_cost():
    g = gen_ufl_gap(2, 5)
    sol = evaluate(g.instance, g.stated_local)
    assert sol.total_assign == 0.0
    assert sol.total_open == 5.0
    assert sol.cost == 5.0
    # the five co-located points of set A are the discarded ones
    assert list(sol.outliers) == [0, 1, 2, 3, 4]


def test_random_q2_matches_naive(rng):
    inst = random_euclid(rng, 10, 5, q=2.0, k=3, z=2)
    dist = inst.metric.distance_table()
    for S in ([0, 1, 2], [1, 4], [3], [0, 2, 4]):
        assert close(evaluate(inst, S).cost, naive_cost(dist, S, 2, 2.0))


def test_empty_swap_is_zero(rng):
    inst = random_euclid(rng, 8, 4, k=2, z=1)
    sol = evaluate(inst, [0, 1])
    assert delta_of_swap(sol, SwapMove()) == 0.0
    assert apply_swap(sol, SwapMove()) is sol


def test_swap_reversibility(rng):
    inst = random_euclid(rng, 15, 6, z=3, opening_costs=0.3)
    sol = evaluate(inst, [0, 2, 5])
    move = SwapMove((1, 4), (2,))
    new = apply_swap(sol, move)
    back = delta_of_swap(new, move.reversed())
    assert abs(delta_of_swap(sol, move) + back) <= 1e-12


def test_delta_matches_from_scratch(rng):
    for trial in range(50):
        inst = random_euclid(rng, 14, 7, q=float(rng.integers(1, 3)), z=int(rng.integers(0, 4)),
                             opening_costs=rng.random(7).tolist())
        S = sorted(rng.choice(7, size=3, replace=False).tolist())
        closed = [i for i in range(7) if i not in S]
        P = rng.choice(closed, size=int(rng.integers(0, 3)), replace=False).tolist()
        Q = rng.choice(S, size=int(rng.integers(0, 3)), replace=False).tolist()
        if len(S) - len(Q) + len(P) == 0:
            continue
        sol = evaluate(inst, S)
        move = SwapMove(P, Q)
        target = sorted(set(S) - set(Q) | set(P))
        ref = evaluate(inst, target)
        assert close(delta_of_swap(sol, move), ref.cost - sol.cost)
        assert apply_swap(sol, move).same_state(ref)


def test_invalid_moves(rng):
    inst = random_euclid(rng, 8, 4, k=2, z=1)
    sol = evaluate(inst, [0, 1])
    with pytest.raises(MoveError):
        swap_cost(sol, SwapMove((0,), ()))        # opening an open centre
    with pytest.raises(MoveError):
        swap_cost(sol, SwapMove((), (2,)))        # closing a closed centre
    with pytest.raises(MoveError):
        swap_cost(sol, SwapMove((), (0, 1)))      # empties S
    with pytest.raises(MoveError):
        swap_cost(sol, SwapMove((2,), ()))        # exceeds budget 2
    with pytest.raises(MoveError):
        evaluate(inst, [])


def test_nearest_centre_tie_goes_to_smaller_id():
    ms = MetricSpace.from_matrix([[1.0, 1.0, 1.0], [2.0, 0.5, 0.5]])
    sol = evaluate(make_instance(ms, k=3, z=0), [0, 1, 2])
    assert list(sol.sigma) == [0, 1]


def test_outlier_tie_drops_larger_id():
    ms = MetricSpace.from_matrix([[3.0], [3.0], [1.0], [3.0]])
    sol = evaluate(make_instance(ms, k=1, z=2), [0])
    assert list(sol.outliers) == [1, 3]
    assert sol.cost == 4.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 16), st.integers(1, 6), st.data())
def test_outlier_selection_invariant(seed, n, m, data):
    rng = np.random.default_rng(seed)
    # coarse integer distances so ties really happen
    mat = rng.integers(0, 4, size=(n, m)).astype(float)
    z = data.draw(st.integers(0, n - 1))
    inst = make_instance(MetricSpace.from_matrix(mat), k=m, z=z)
    S = sorted(set(data.draw(st.lists(st.integers(0, m - 1), min_size=1, max_size=m))))
    sol = evaluate(inst, S)
    assert len(sol.outliers) == z
    d = sol.nearest_cost
    for j in sol.assigned:
        for o in sol.outliers:
            assert d[j] < d[o] or (d[j] == d[o] and j < o)
    for j in sol.assigned:
        row = mat[j, S]
        best = row.min()
        assert sol.sigma[j] == S[int(np.flatnonzero(row == best)[0])]


def test_permutation_invariance(rng):
    inst = random_euclid(rng, 20, 6, q=2.0, k=4, z=3)
    ms = inst.metric
    perm = rng.permutation(6)
    relabeled = make_instance(MetricSpace.from_euclidean(ms.data["points"], ms.data["centers"][perm], q=2.0),
                              k=4, z=3)
    inv = np.argsort(perm)
    S = [0, 2, 3, 5]
    a = evaluate(inst, S)
    b = evaluate(relabeled, sorted(int(inv[i]) for i in S))
    assert a.cost == b.cost
    assert sorted(a.nearest_cost[a.assigned]) == sorted(b.nearest_cost[b.assigned])


@pytest.mark.parametrize("kw", [dict(k=3), dict(opening_costs=0.7)])
@pytest.mark.parametrize("q", [1.0, 2.0])
def test_zero_outliers_direct_sum(rng, kw, q):
    inst = random_euclid(rng, 12, 5, q=q, z=0, **kw)
    X, C = inst.metric.data["points"], inst.metric.data["centers"]
    S = [0, 3, 4]
    d = np.sqrt(((X[:, None, :] - C[None, S, :]) ** 2).sum(axis=2)).min(axis=1)
    ref = float((d ** q).sum()) + (0.7 * 3 if "opening_costs" in kw else 0.0)
    assert close(evaluate(inst, S).cost, ref)


def test_solution_json_shape(rng):
    inst = random_euclid(rng, 6, 3, k=2, z=1)
    doc = evaluate(inst, [0, 2]).to_json()
    assert sorted(doc) == ["cost", "open", "outliers", "sigma"]
    assert doc["sigma"].count(-1) == 1
