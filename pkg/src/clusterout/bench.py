"""Local-search vs exact-oracle ratio sweeps on random instances.

Instances: ``n`` points uniform in ``[0, 1]^dim``; the ``m`` candidate centres
are a uniformly chosen subset of the points. Everything is driven by
``numpy.random.default_rng(seed)`` so rows are reproducible.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import csv
import io
import time

import numpy as np

from .exact import solve_exact
from .instance import make_instance
from .metric import MetricSpace
from .search import SearchConfig, local_search


def random_instance(seed, n, m, k=None, z=0, q=1.0, dim=2, epsilon=0.0, opening_costs=1.0):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, dim))
    centres = pts[np.sort(rng.choice(n, size=m, replace=False))]
    metric = MetricSpace.from_euclidean(pts, centres, q=q)
    if k is None:
        return make_instance(metric, z=z, opening_costs=opening_costs)
    return make_instance(metric, k=k, epsilon=epsilon, z=z)


@dataclass
class BenchRow:
    seed: int
    n: int
    m: int
    k: object
    z: int
    q: float
    rho: int
    ls_cost: float
    opt_cost: float
    ratio: float
    iterations: int
    iteration_bound: float
    wall_time: float
    trace: object = field(default=None, repr=False)

    def to_json(self, timing=False):
        out = {"seed": self.seed, "n": self.n, "m": self.m, "k": self.k, "z": self.z,
               "q": self.q, "rho": self.rho, "ls_cost": self.ls_cost, "opt_cost": self.opt_cost,
               "ratio": self.ratio, "iterations": self.iterations}
        if timing:
            out["wall_time"] = self.wall_time
        return out


@dataclass
class BenchReport:
    rows: list

    @property
    def ratios(self):
        return np.array([r.ratio for r in self.rows])

    @property
    def mean_ratio(self):
        return float(self.ratios.mean()) if self.rows else float("nan")

    @property
    def max_ratio(self):
        return float(self.ratios.max()) if self.rows else float("nan")

    def to_json(self, timing=False):
        return {"rows": [r.to_json(timing) for r in self.rows],
                "aggregate": {"count": len(self.rows), "mean_ratio": self.mean_ratio,
                              "max_ratio": self.max_ratio}}

    def to_csv(self):
        buf = io.StringIO()
        cols = ["seed", "n", "m", "k", "z", "q", "rho", "ls_cost", "opt_cost", "ratio",
                "iterations", "wall_time"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            d = r.to_json(timing=True)
            w.writerow([repr(d[c]) if isinstance(d[c], float) else d[c] for c in cols])
        return buf.getvalue()


def run_row(seed, n, m, k, z, q, rho, epsilon_stop=1e-6, dim=2, epsilon=0.0, pivot="first",
            max_iterations=10_000, seed_policy="random", oracle_k=None):
    inst = random_instance(seed, n, m, k=k, z=z, q=q, dim=dim, epsilon=epsilon)
    cfg = SearchConfig(rho=rho, epsilon_stop=epsilon_stop, pivot=pivot,
                       max_iterations=max_iterations, seed_policy=seed_policy, rng_seed=seed)
    t0 = time.perf_counter()
    trace = local_search(inst, cfg)
    wall = time.perf_counter() - t0
    opt = solve_exact(inst, k=oracle_k)
    ratio = trace.final_cost / opt.cost if opt.cost > 0 else (1.0 if trace.final_cost == 0 else float("inf"))
    return BenchRow(seed, n, m, k, z, float(q), rho, trace.final_cost, opt.cost, ratio,
                    trace.iterations, trace.iteration_bound(), wall, trace)


def run_bench(specs, threads=1):
    """Run ``run_row(**kw)`` for each keyword dict; rows keep input order."""
    if threads <= 1:
        return BenchReport([run_row(**s) for s in specs])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return BenchReport(list(pool.map(lambda s: run_row(**s), specs)))


def sweep_specs(count, seed, n=12, m=6, k=2, z=2, q=1.0, rho=1, **extra):
    return [dict(seed=seed + t, n=n, m=m, k=k, z=z, q=q, rho=rho, **extra) for t in range(count)]
