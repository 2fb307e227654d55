"""Distance oracles over points and candidate centres.

Three backends share one interface: an explicit ``n x m`` matrix, Euclidean
coordinates, and shortest paths in a weighted undirected graph. Connection
cost is ``distance ** q``.
"""
from dataclasses import dataclass
from typing import Optional
import warnings

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import InstanceError

REL_TOL = 1e-9
ABS_TOL = 1e-12
DEFAULT_BUDGET_BYTES = 1 << 28
FLOYD_WARSHALL_MAX_VERTICES = 64


def close(a, b, rel=REL_TOL, abs_floor=ABS_TOL):
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), abs_floor)


def euclidean_block(x, c):
    """Pairwise distances between rows of ``x`` and rows of ``c``.

    Coordinates are accumulated one axis at a time so that a 1x1 block and a
    full table produce bit-identical entries.
    """
    acc = np.zeros((x.shape[0], c.shape[0]))
    for t in range(x.shape[1]):
        diff = x[:, t, None] - c[None, :, t]
        acc += diff * diff
    return np.sqrt(acc)


def floyd_warshall(num_vertices, edges):
    dist = np.full((num_vertices, num_vertices), np.inf)
    np.fill_diagonal(dist, 0.0)
    for u, v, w in edges:
        u, v = int(u), int(v)
        if w < dist[u, v]:
            dist[u, v] = dist[v, u] = w
    for k in range(num_vertices):
        np.minimum(dist, dist[:, k, None] + dist[None, k, :], out=dist)
    return dist


def _adjacency(num_vertices, edges):
    best = {}
    for u, v, w in edges:
        u, v = int(u), int(v)
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key not in best or w < best[key]:
            best[key] = float(w)
    if not best:
        return csr_matrix((num_vertices, num_vertices))
    keys = np.array(list(best.keys()), dtype=np.int64)
    data = np.array(list(best.values()))
    # explicit zeros are kept as edges by csgraph
    return csr_matrix((data, (keys[:, 0], keys[:, 1])), shape=(num_vertices, num_vertices))


def dijkstra_rows(num_vertices, edges, sources):
    adj = _adjacency(num_vertices, edges)
    return dijkstra(adj, directed=False, indices=np.asarray(sources, dtype=np.int64))


@dataclass
class PrecomputeResult:
    materialized: bool
    nbytes: int
    warning: Optional[str] = None


class MetricSpace:
    """Distance oracle ``delta(j, i)`` for point ``j`` and centre ``i``.

    Use the ``from_matrix`` / ``from_euclidean`` / ``from_graph`` constructors.
    """

    def __init__(self, backend, q, n_points, n_centers, **data):
        self.backend = backend
        self.q = float(q)
        self.n_points = int(n_points)
        self.n_centers = int(n_centers)
        self._data = data
        self._table = None
        self._cost_table = None
        self._fw = None
        if not self.q >= 1.0 or not np.isfinite(self.q):
            raise InstanceError("q", f"cost exponent must be a finite value >= 1, got {q!r}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_matrix(cls, matrix, q=1.0, validate_triangle=False):
        mat = np.array(matrix, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
            raise InstanceError("distance_matrix", "must be a non-empty 2-d array")
        if not np.all(np.isfinite(mat)):
            raise InstanceError("distance_matrix", "entries must be finite")
        bad = np.argwhere(mat < 0)
        if bad.size:
            j, i = bad[0]
            raise InstanceError(f"distance_matrix[{j}][{i}]", "negative distance")
        ms = cls("matrix", q, mat.shape[0], mat.shape[1], matrix=mat)
        ms._table = mat
        if validate_triangle:
            viol = ms.triangle_violations()
            if viol:
                raise InstanceError("distance_matrix", f"triangle inequality violated at {viol[0]}")
        return ms

    @classmethod
    def from_euclidean(cls, points, centers, q=1.0):
        x = np.array(points, dtype=np.float64)
        c = np.array(centers, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < 1:
            raise InstanceError("points", "must be a non-empty list of coordinate rows")
        if c.ndim != 2 or c.shape[0] < 1:
            raise InstanceError("centers", "must be a non-empty list of coordinate rows")
        if x.shape[1] != c.shape[1]:
            raise InstanceError("centers", "dimension differs from points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(c))):
            raise InstanceError("points", "coordinates must be finite")
        return cls("euclidean", q, x.shape[0], c.shape[0], points=x, centers=c)

    @classmethod
    def from_graph(cls, num_vertices, edges, point_vertices, center_vertices, q=1.0,
                   method="auto"):
        """Shortest-path metric; ``method`` is ``auto``, ``floyd-warshall`` or ``dijkstra``."""
        num_vertices = int(num_vertices)
        e = np.array(edges, dtype=np.float64).reshape(-1, 3)
        pv = np.array(point_vertices, dtype=np.int64)
        cv = np.array(center_vertices, dtype=np.int64)
        if num_vertices < 1:
            raise InstanceError("graph.num_vertices", "must be positive")
        for name, arr in (("graph.point_vertices", pv), ("graph.center_vertices", cv)):
            if arr.ndim != 1 or arr.size < 1:
                raise InstanceError(name, "must be a non-empty list")
            if arr.min() < 0 or arr.max() >= num_vertices:
                raise InstanceError(name, "vertex id out of range")
        if e.size:
            if np.any(e[:, :2] < 0) or np.any(e[:, :2] >= num_vertices) or \
                    np.any(e[:, :2] != np.floor(e[:, :2])):
                raise InstanceError("graph.edges", "endpoint is not a valid vertex id")
            if not np.all(np.isfinite(e[:, 2])):
                raise InstanceError("graph.edges", "weights must be finite")
            if np.any(e[:, 2] < 0):
                raise InstanceError("graph.edges", "negative edge weight")
        if method == "auto":
            method = "floyd-warshall" if num_vertices <= FLOYD_WARSHALL_MAX_VERTICES else "dijkstra"
        if method not in ("floyd-warshall", "dijkstra"):
            raise InstanceError("method", f"unknown shortest-path method {method!r}")
        ms = cls("graph", q, pv.size, cv.size, num_vertices=num_vertices, edges=e,
                 point_vertices=pv, center_vertices=cv, method=method)
        if method == "floyd-warshall":
            ms._fw = floyd_warshall(num_vertices, e)
        table = ms._compute_block(np.arange(pv.size), np.arange(cv.size))
        if not np.all(np.isfinite(table)):
            j, i = np.argwhere(~np.isfinite(table))[0]
            raise InstanceError("graph", f"point {j} cannot reach centre {i}")
        return ms

    # -- accessors ---------------------------------------------------------

    @property
    def data(self):
        return self._data

    def _check(self, j, i):
        if not (0 <= j < self.n_points):
            raise IndexError(f"point id {j} out of range [0, {self.n_points})")
        if not (0 <= i < self.n_centers):
            raise IndexError(f"centre id {i} out of range [0, {self.n_centers})")

    def _compute_block(self, rows, cols):
        d = self._data
        if self.backend == "matrix":
            return d["matrix"][np.ix_(rows, cols)]
        if self.backend == "euclidean":
            return euclidean_block(d["points"][rows], d["centers"][cols])
        pv = d["point_vertices"][rows]
        cv = d["center_vertices"][cols]
        if self._fw is not None:
            return self._fw[np.ix_(pv, cv)]
        srcs, inv = np.unique(cv, return_inverse=True)
        sp = dijkstra_rows(d["num_vertices"], d["edges"], srcs)
        return sp[inv][:, pv].T

    def distance(self, j, i):
        j, i = int(j), int(i)
        self._check(j, i)
        if self._table is not None:
            return float(self._table[j, i])
        return float(self._compute_block(np.array([j]), np.array([i]))[0, 0])

    def assign_cost(self, j, i):
        return float(np.power(self.distance(j, i), self.q))

    def precompute(self, budget_bytes=DEFAULT_BUDGET_BYTES):
        """Materialize the distance table if it fits in ``budget_bytes``."""
        nbytes = 8 * self.n_points * self.n_centers
        if self._table is not None:
            return PrecomputeResult(True, nbytes)
        if nbytes > budget_bytes:
            msg = f"distance table needs {nbytes} bytes > budget {budget_bytes}; distances stay on demand"
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            return PrecomputeResult(False, nbytes, msg)
        self._table = self._compute_block(np.arange(self.n_points), np.arange(self.n_centers))
        return PrecomputeResult(True, nbytes)

    @property
    def is_materialized(self):
        return self._table is not None

    def distance_table(self):
        """Full ``n x m`` distance table (always computed, cached when allowed)."""
        if self._table is not None:
            return self._table
        return self._compute_block(np.arange(self.n_points), np.arange(self.n_centers))

    def cost_table(self):
        if self._cost_table is None:
            d = self.distance_table()
            self._cost_table = d.copy() if self.q == 1.0 else np.power(d, self.q)
            self._cost_table.setflags(write=False)
        return self._cost_table

    def max_distance(self):
        return float(self.distance_table().max())

    def triangle_violations(self, tol=REL_TOL, limit=10):
        """Quadrilateral check on the bipartite table.

        For every ``j, j'`` and ``i, i'``: ``d(j,i) <= d(j,i') + d(j',i') + d(j',i)``.
        Runs in ``O(n m^2)`` through the centre-to-centre bound
        ``h(i,i') = min_j' d(j',i) + d(j',i')``.
        """
        d = self.distance_table()
        h = (d[:, :, None] + d[:, None, :]).min(axis=0)  # (m, m)
        bound = d[:, None, :] + h[None, :, :]  # j, i, i'
        lhs = d[:, :, None]
        slack = np.maximum(tol * np.maximum(lhs, bound), ABS_TOL)
        bad = np.argwhere(lhs > bound + slack)
        return [tuple(int(v) for v in b) for b in bad[:limit]]
