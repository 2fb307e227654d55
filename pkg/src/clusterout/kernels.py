"""Hot numeric kernels with a numba path and a pure-numpy path.

Every public kernel exists twice: ``np_<name>`` (vectorized numpy) and
``nb_<name>`` (numba ``@njit`` loops). The unprefixed names are bound to one of
the two at import time, see :mod:`clusterout._accel`.

Tie rules shared by all kernels:

* nearest centre: smallest cost, then smallest centre id;
* outliers: the ``z`` points with the largest cost, where among equal costs the
  larger point ids are discarded first.

Costs are ``float64`` arrays of shape ``(n_points, n_centers)``.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

INF = np.inf


# --------------------------------------------------------------------------
# numpy path
# --------------------------------------------------------------------------

def np_nearest_two(cost, open_ids):
    """Nearest and second-nearest open centre for every point.

    ``open_ids`` must be sorted ascending. Missing second centres are ``-1``
    with cost ``inf``.
    """
    open_ids = np.asarray(open_ids, dtype=np.int64)
    n = cost.shape[0]
    block = cost[:, open_ids]
    order = np.argsort(block, axis=1, kind="stable")
    rows = np.arange(n)
    near = open_ids[order[:, 0]]
    near_cost = block[rows, order[:, 0]]
    if open_ids.size > 1:
        sec = open_ids[order[:, 1]]
        sec_cost = block[rows, order[:, 1]]
    else:
        sec = np.full(n, -1, dtype=np.int64)
        sec_cost = np.full(n, INF)
    return near, near_cost.copy(), sec, sec_cost.copy()


def np_outlier_mask(values, z):
    n = values.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    if z <= 0:
        return out
    keep = n - z
    if keep <= 0:
        out[:] = True
        return out
    threshold = np.partition(values, keep - 1)[keep - 1]
    out |= values > threshold
    need = z - int(out.sum())
    if need > 0:
        tied = np.flatnonzero(values == threshold)
        out[tied[tied.size - need:]] = True
    return out


def np_kept_sum(values, out):
    """Exactly rounded sum of the non-outlier values (order independent)."""
    return math.fsum(values[~out])


def np_swap_point_costs(cost, near, near_cost, sec, sec_cost, in_q, remaining, added):
    """Per-point connection cost after closing ``in_q`` and opening ``added``."""
    near_closed = in_q[near]
    sec_ok = (sec >= 0) & ~in_q[np.maximum(sec, 0)]
    base = np.where(near_closed, np.where(sec_ok, sec_cost, np.nan), near_cost)
    rescan = np.flatnonzero(np.isnan(base))
    if rescan.size:
        if remaining.size:
            base[rescan] = cost[np.ix_(rescan, remaining)].min(axis=1)
        else:
            base[rescan] = INF
    if added.size:
        base = np.minimum(base, cost[:, added].min(axis=1))
    return base


def np_repair_top2(cost, near, near_cost, sec, sec_cost, in_q, new_open, added):
    """Top-two cache after a swap; ``new_open`` and ``added`` sorted ascending."""
    near = near.copy()
    near_cost = near_cost.copy()
    sec = sec.copy()
    sec_cost = sec_cost.copy()
    touched = in_q[near] | ((sec >= 0) & in_q[np.maximum(sec, 0)])
    if new_open.size == 1:
        # a single open centre has no second; rescan everything
        touched[:] = True
    rescan = np.flatnonzero(touched)
    if rescan.size:
        rn, rnc, rs, rsc = np_nearest_two(cost[rescan], new_open)
        near[rescan], near_cost[rescan], sec[rescan], sec_cost[rescan] = rn, rnc, rs, rsc
    keep = np.flatnonzero(~touched)
    if keep.size and added.size:
        pn, pnc, ps, psc = np_nearest_two(cost[keep], added)
        cn, cnc, cs, csc = near[keep], near_cost[keep], sec[keep], sec_cost[keep]
        # lexicographic (cost, id) comparisons
        p_first = (pnc < cnc) | ((pnc == cnc) & (pn < cn))
        new_n = np.where(p_first, pn, cn)
        new_nc = np.where(p_first, pnc, cnc)
        # runner-up: if P won, compare P's second with current nearest,
        # otherwise compare current second with P's nearest
        a_id = np.where(p_first, ps, cs)
        a_c = np.where(p_first, psc, csc)
        b_id = np.where(p_first, cn, pn)
        b_c = np.where(p_first, cnc, pnc)
        a_valid = a_id >= 0
        a_first = a_valid & ((a_c < b_c) | ((a_c == b_c) & (a_id < b_id)))
        near[keep] = new_n
        near_cost[keep] = new_nc
        sec[keep] = np.where(a_first, a_id, b_id)
        sec_cost[keep] = np.where(a_first, a_c, b_c)
    return near, near_cost, sec, sec_cost


def np_sorted_prefix_sums(block_min, keep):
    """Sum of the ``keep`` smallest entries of each row (sort based)."""
    if keep <= 0:
        return np.zeros(block_min.shape[0])
    return np.sort(block_min, axis=1)[:, :keep].sum(axis=1)


def np_combo_costs(cost, combos, z):
    """Assignment cost (outliers dropped) of each row of ``combos``."""
    n = cost.shape[0]
    out = np.empty(combos.shape[0])
    step = max(1, 4_000_000 // max(1, n * combos.shape[1]))
    for lo in range(0, combos.shape[0], step):
        chunk = combos[lo:lo + step]
        mins = cost[:, chunk].min(axis=2).T
        out[lo:lo + step] = np_sorted_prefix_sums(mins, n - z)
    return out


def np_mask_costs(cost, masks, z):
    """Assignment cost of each boolean row of ``masks`` (shape ``(s, m)``)."""
    n = cost.shape[0]
    out = np.empty(masks.shape[0])
    step = max(1, 4_000_000 // max(1, n * cost.shape[1]))
    for lo in range(0, masks.shape[0], step):
        chunk = masks[lo:lo + step]
        mins = np.where(chunk[:, None, :], cost[None, :, :], INF).min(axis=2)
        out[lo:lo + step] = np_sorted_prefix_sums(mins, n - z)
    return out


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------

@njit
def nb_nearest_two(cost, open_ids):
    n = cost.shape[0]
    near = np.empty(n, dtype=np.int64)
    sec = np.empty(n, dtype=np.int64)
    near_cost = np.empty(n)
    sec_cost = np.empty(n)
    for j in range(n):
        b, bc, s, sc = -1, INF, -1, INF
        for t in range(open_ids.shape[0]):
            i = open_ids[t]
            c = cost[j, i]
            if b < 0 or c < bc:
                s, sc = b, bc
                b, bc = i, c
            elif s < 0 or c < sc:
                s, sc = i, c
        near[j] = b
        near_cost[j] = bc
        sec[j] = s
        sec_cost[j] = sc
    return near, near_cost, sec, sec_cost


@njit
def nb_outlier_mask(values, z):
    n = values.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    if z <= 0:
        return out
    keep = n - z
    if keep <= 0:
        out[:] = True
        return out
    threshold = np.partition(values, keep - 1)[keep - 1]
    count = 0
    for j in range(n):
        if values[j] > threshold:
            out[j] = True
            count += 1
    need = z - count
    j = n - 1
    while need > 0:
        if values[j] == threshold:
            out[j] = True
            need -= 1
        j -= 1
    return out


@njit
def _nb_compress(values, out):
    kept = np.empty(values.shape[0] - int(out.sum()))
    t = 0
    for j in range(values.shape[0]):
        if not out[j]:
            kept[t] = values[j]
            t += 1
    return kept


def nb_kept_sum(values, out):
    # fsum has no numba lowering; the compaction is jitted, the sum is exact
    return math.fsum(_nb_compress(values, out))


@njit
def nb_swap_point_costs(cost, near, near_cost, sec, sec_cost, in_q, remaining, added):
    n = cost.shape[0]
    res = np.empty(n)
    for j in range(n):
        if not in_q[near[j]]:
            c = near_cost[j]
        elif sec[j] >= 0 and not in_q[sec[j]]:
            c = sec_cost[j]
        else:
            c = INF
            for t in range(remaining.shape[0]):
                v = cost[j, remaining[t]]
                if v < c:
                    c = v
        for t in range(added.shape[0]):
            v = cost[j, added[t]]
            if v < c:
                c = v
        res[j] = c
    return res


@njit
def nb_repair_top2(cost, near, near_cost, sec, sec_cost, in_q, new_open, added):
    n = cost.shape[0]
    near = near.copy()
    near_cost = near_cost.copy()
    sec = sec.copy()
    sec_cost = sec_cost.copy()
    single = new_open.shape[0] == 1
    for j in range(n):
        touched = single or in_q[near[j]] or (sec[j] >= 0 and in_q[sec[j]])
        if touched:
            ids = new_open
            b, bc, s, sc = -1, INF, -1, INF
        else:
            ids = added
            b, bc, s, sc = near[j], near_cost[j], sec[j], sec_cost[j]
        for t in range(ids.shape[0]):
            i = ids[t]
            c = cost[j, i]
            if b < 0 or c < bc or (c == bc and i < b):
                s, sc = b, bc
                b, bc = i, c
            elif s < 0 or c < sc or (c == sc and i < s):
                s, sc = i, c
        near[j] = b
        near_cost[j] = bc
        sec[j] = s
        sec_cost[j] = sc
    return near, near_cost, sec, sec_cost


@njit
def _nb_prefix_sum_sorted(mins, keep):
    if keep <= 0:
        return 0.0
    srt = np.sort(mins)
    total = 0.0
    for t in range(keep):
        total += srt[t]
    return total


@njit
def nb_combo_costs(cost, combos, z):
    n = cost.shape[0]
    out = np.empty(combos.shape[0])
    mins = np.empty(n)
    for r in range(combos.shape[0]):
        for j in range(n):
            c = INF
            for t in range(combos.shape[1]):
                v = cost[j, combos[r, t]]
                if v < c:
                    c = v
            mins[j] = c
        out[r] = _nb_prefix_sum_sorted(mins, n - z)
    return out


@njit
def nb_mask_costs(cost, masks, z):
    n, m = cost.shape
    out = np.empty(masks.shape[0])
    mins = np.empty(n)
    for r in range(masks.shape[0]):
        for j in range(n):
            c = INF
            for i in range(m):
                if masks[r, i]:
                    v = cost[j, i]
                    if v < c:
                        c = v
            mins[j] = c
        out[r] = _nb_prefix_sum_sorted(mins, n - z)
    return out


NUMPY_KERNELS = {
    "nearest_two": np_nearest_two,
    "outlier_mask": np_outlier_mask,
    "kept_sum": np_kept_sum,
    "swap_point_costs": np_swap_point_costs,
    "repair_top2": np_repair_top2,
    "combo_costs": np_combo_costs,
    "mask_costs": np_mask_costs,
}

NUMBA_KERNELS = {
    "nearest_two": nb_nearest_two,
    "outlier_mask": nb_outlier_mask,
    "kept_sum": nb_kept_sum,
    "swap_point_costs": nb_swap_point_costs,
    "repair_top2": nb_repair_top2,
    "combo_costs": nb_combo_costs,
    "mask_costs": nb_mask_costs,
}

BACKEND = "numba" if USE_NUMBA else "numpy"
_ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS

nearest_two = _ACTIVE["nearest_two"]
outlier_mask = _ACTIVE["outlier_mask"]
kept_sum = _ACTIVE["kept_sum"]
swap_point_costs = _ACTIVE["swap_point_costs"]
repair_top2 = _ACTIVE["repair_top2"]
combo_costs = _ACTIVE["combo_costs"]
mask_costs = _ACTIVE["mask_costs"]
