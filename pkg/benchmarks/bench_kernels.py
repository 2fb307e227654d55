"""Numba vs pure-numpy kernel timings.

Part 1 times each hot kernel from both tables in this process (numba
compile time excluded by a warm-up call). Part 2 runs the same local search
end to end in two subprocesses, one with CLUSTEROUT_DISABLE_NUMBA=1, and checks
that both report the same final cost.

    python3 benchmarks/bench_kernels.py [--n 2000] [--m 40] [--repeat 20]
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from clusterout import kernels


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(n, m, rng):
    cost = rng.random((n, m))
    open_ids = np.arange(0, m, 2, dtype=np.int64)
    near, nc, sec, sc = kernels.NUMPY_KERNELS["nearest_two"](cost, open_ids)
    in_q = np.zeros(m, dtype=np.bool_)
    in_q[open_ids[:2]] = True
    remaining = open_ids[2:]
    added = np.array([1, 3], dtype=np.int64)
    new_open = np.sort(np.concatenate([remaining, added]))
    z = n // 10
    combos = np.array([(a, b, c) for a in range(8) for b in range(a + 1, 8) for c in range(b + 1, 8)],
                      dtype=np.int64)
    small = cost[:200, :8].copy()
    masks = ((np.arange(1, 256)[:, None] >> np.arange(8)[None, :]) & 1).astype(np.bool_)
    vals = nc.copy()
    out = kernels.NUMPY_KERNELS["outlier_mask"](vals, z)
    return {
        "nearest_two": (cost, open_ids),
        "outlier_mask": (vals, z),
        "kept_sum": (vals, out),
        "swap_point_costs": (cost, near, nc, sec, sc, in_q, remaining, added),
        "repair_top2": (cost, near, nc, sec, sc, in_q, new_open, added),
        "combo_costs": (small, combos, 5),
        "mask_costs": (small, masks, 5),
    }


def time_kernels(n, m, repeat, seed):
    cases = kernel_cases(n, m, np.random.default_rng(seed))
    rows = []
    for name, args in cases.items():
        row = {"kernel": name}
        for label, table in (("numpy", kernels.NUMPY_KERNELS), ("numba", kernels.NUMBA_KERNELS)):
            fn = table[name]
            fn(*args)  # warm-up / compile
            row[label] = best_of(lambda: fn(*args), repeat)
        row["speedup"] = row["numpy"] / row["numba"] if row["numba"] > 0 else float("inf")
        rows.append(row)
    return rows


_E2E = """
import json, sys, time
from clusterout.bench import random_instance
from clusterout.search import SearchConfig, local_search
inst = random_instance({seed}, {n}, {m}, k={k}, z={z})
local_search(random_instance(0, 20, 6, k=2, z=1), SearchConfig(rho=1))
t0 = time.perf_counter()
tr = local_search(inst, SearchConfig(rho={rho}, seed_policy="random", rng_seed={seed}))
print(json.dumps({{"cost": tr.final_cost, "iterations": tr.iterations,
                  "seconds": time.perf_counter() - t0}}))
"""


def end_to_end(n, m, k, z, rho, seed):
    code = _E2E.format(n=n, m=m, k=k, z=z, rho=rho, seed=seed)
    out = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, CLUSTEROUT_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True)
        out[label] = json.loads(res.stdout.strip().splitlines()[-1])
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--m", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()

    print(f"kernels, n={args.n} m={args.m}, best of {args.repeat}")
    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for r in time_kernels(args.n, args.m, args.repeat, args.seed):
        print(f"{r['kernel']:<18}{1e3 * r['numpy']:>12.3f}{1e3 * r['numba']:>12.3f}{r['speedup']:>10.1f}")

    if not args.skip_e2e:
        res = end_to_end(n=400, m=20, k=5, z=10, rho=1, seed=args.seed)
        print("\nlocal search, n=400 m=20 k=5 z=10 rho=1")
        for label, d in res.items():
            print(f"  {label:<6} cost={d['cost']:.12g} iterations={d['iterations']} "
                  f"time={d['seconds']:.3f}s")
        same = res["numba"]["cost"] == res["numpy"]["cost"]
        print(f"  identical final cost: {same}")
        return 0 if same else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
