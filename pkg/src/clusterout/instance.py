"""Problem instances: UFL with outliers and k-clustering with outliers.

One JSON format covers both families, discriminated by ``"kind"``::

    {"kind": "ufl-out" | "kcluster-out", "z": int, "q": float,
     "k": int, "epsilon": float, "opening_costs": [float] | float,
     "points": [[float]], "centers": [[float]],      # or
     "distance_matrix": [[float]],                   # or
     "graph": {"num_vertices": int, "edges": [[u, v, w]],
               "point_vertices": [int], "center_vertices": [int]}}
"""
from dataclasses import dataclass, field
import json
import math
from typing import Optional, Union

import numpy as np

from . import jsonio
from .errors import InstanceError
from .metric import MetricSpace

UFL = "ufl-out"
KCLUSTER = "kcluster-out"
_BUDGET_SLACK = 1e-9


@dataclass(frozen=True)
class UflOut:
    opening_costs: Union[float, tuple] = 1.0

    @property
    def uniform(self):
        return not isinstance(self.opening_costs, tuple)

    def costs(self, m):
        if self.uniform:
            return np.full(m, float(self.opening_costs))
        return np.asarray(self.opening_costs, dtype=np.float64)


@dataclass(frozen=True)
class KClusterOut:
    k: int
    epsilon: float = 0.0

    @property
    def budget(self):
        # floor((1+eps)k), guarded against 3.5999... style rounding
        return int(math.floor((1.0 + self.epsilon) * self.k + _BUDGET_SLACK))


@dataclass(eq=False)
class Instance:
    metric: MetricSpace
    kind: Union[UflOut, KClusterOut]
    z: int
    labels: Optional[dict] = None
    allow_degenerate: bool = False
    _opening: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.validate()

    # -- derived ---------------------------------------------------------

    @property
    def n(self):
        return self.metric.n_points

    @property
    def m(self):
        return self.metric.n_centers

    @property
    def q(self):
        return self.metric.q

    @property
    def is_ufl(self):
        return isinstance(self.kind, UflOut)

    @property
    def budget(self):
        """Maximum number of open centres (``m`` for UFL)."""
        return self.m if self.is_ufl else self.kind.budget

    @property
    def opening_costs(self):
        if self._opening is None:
            op = self.kind.costs(self.m) if self.is_ufl else np.zeros(self.m)
            op.setflags(write=False)
            self._opening = op
        return self._opening

    @property
    def costs(self):
        """``n x m`` connection costs ``delta ** q``."""
        return self.metric.cost_table()

    # -- validation ------------------------------------------------------

    def validate(self):
        if isinstance(self.z, bool) or not isinstance(self.z, (int, np.integer)):
            raise InstanceError("z", "must be an integer")
        self.z = int(self.z)
        if self.z < 0:
            raise InstanceError("z", "must be nonnegative")
        if self.z >= self.n and not (self.allow_degenerate and self.z == self.n):
            raise InstanceError("z", f"degenerate outlier count: z={self.z} >= number of points {self.n}")
        if self.is_ufl:
            oc = self.kind.opening_costs
            if self.kind.uniform:
                if not (math.isfinite(float(oc)) and float(oc) >= 0):
                    raise InstanceError("opening_costs", "uniform opening cost must be finite and >= 0")
            else:
                arr = np.asarray(oc, dtype=np.float64)
                if arr.shape != (self.m,):
                    raise InstanceError("opening_costs", f"expected {self.m} entries, got {arr.size}")
                bad = np.flatnonzero(~np.isfinite(arr) | (arr < 0))
                if bad.size:
                    raise InstanceError(f"opening_costs[{bad[0]}]", "negative or non-finite opening cost")
        else:
            k, eps = self.kind.k, self.kind.epsilon
            if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
                raise InstanceError("k", "must be a positive integer")
            if not (math.isfinite(eps) and eps >= 0):
                raise InstanceError("epsilon", "must be finite and >= 0")
            if k > self.m:
                raise InstanceError("k", f"k={k} exceeds number of centres {self.m}")
            if self.kind.budget > self.m:
                raise InstanceError("epsilon", f"budget floor((1+eps)k)={self.kind.budget} exceeds number of centres {self.m}")

    # -- equality (field by field, floats bit-equal) ---------------------

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return to_document(self) == to_document(other) and \
            self.allow_degenerate == other.allow_degenerate


def to_document(inst):
    """Plain-python dict (floats kept as python floats) for an instance."""
    doc = {"z": inst.z, "q": inst.q}
    if inst.is_ufl:
        doc["kind"] = UFL
        oc = inst.kind.opening_costs
        doc["opening_costs"] = float(oc) if inst.kind.uniform else [float(v) for v in oc]
    else:
        doc["kind"] = KCLUSTER
        doc["k"] = int(inst.kind.k)
        doc["epsilon"] = float(inst.kind.epsilon)
    ms = inst.metric
    d = ms.data
    if ms.backend == "matrix":
        doc["distance_matrix"] = d["matrix"].tolist()
    elif ms.backend == "euclidean":
        doc["points"] = d["points"].tolist()
        doc["centers"] = d["centers"].tolist()
    else:
        doc["graph"] = {
            "num_vertices": int(d["num_vertices"]),
            "edges": [[int(u), int(v), float(w)] for u, v, w in d["edges"]],
            "point_vertices": d["point_vertices"].tolist(),
            "center_vertices": d["center_vertices"].tolist(),
        }
    if inst.labels:
        doc["labels"] = inst.labels
    return doc


def save_instance(inst):
    """Canonical JSON text for ``inst``."""
    return jsonio.dumps(to_document(inst))


def _need(doc, key, types, path=None):
    if key not in doc:
        raise InstanceError(path or key, "missing required field")
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, types):
        raise InstanceError(path or key, f"expected {' or '.join(t.__name__ for t in types)}")
    return val


def from_document(doc, allow_degenerate=False, validate_triangle=False):
    if not isinstance(doc, dict):
        raise InstanceError("", "document must be a JSON object")
    kind_tag = doc.get("kind")
    if kind_tag not in (UFL, KCLUSTER):
        raise InstanceError("kind", f"must be {UFL!r} or {KCLUSTER!r}, got {kind_tag!r}")
    z = _need(doc, "z", (int,))
    q = doc.get("q", 1.0)
    if isinstance(q, bool) or not isinstance(q, (int, float)):
        raise InstanceError("q", "expected a number")
    q = float(q)

    sources = [name for name in ("distance_matrix", "graph") if name in doc]
    if "points" in doc or "centers" in doc:
        if not ("points" in doc and "centers" in doc):
            raise InstanceError("points", "points and centers must be given together")
        sources.append("points")
    if len(sources) != 1:
        raise InstanceError("", "exactly one of points+centers, distance_matrix, graph is required")
    src = sources[0]
    try:
        if src == "distance_matrix":
            metric = MetricSpace.from_matrix(doc["distance_matrix"], q, validate_triangle)
        elif src == "points":
            metric = MetricSpace.from_euclidean(doc["points"], doc["centers"], q)
        else:
            g = doc["graph"]
            if not isinstance(g, dict):
                raise InstanceError("graph", "must be an object")
            metric = MetricSpace.from_graph(
                _need(g, "num_vertices", (int,), "graph.num_vertices"),
                _need(g, "edges", (list,), "graph.edges"),
                _need(g, "point_vertices", (list,), "graph.point_vertices"),
                _need(g, "center_vertices", (list,), "graph.center_vertices"),
                q,
            )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(src, f"malformed numeric data ({exc})") from exc

    if kind_tag == UFL:
        oc = doc.get("opening_costs", 1.0)
        if isinstance(oc, list):
            kind = UflOut(tuple(float(v) for v in oc))
        elif isinstance(oc, (int, float)) and not isinstance(oc, bool):
            kind = UflOut(float(oc))
        else:
            raise InstanceError("opening_costs", "expected a number or a list of numbers")
    else:
        k = _need(doc, "k", (int,))
        eps = doc.get("epsilon", 0.0)
        if isinstance(eps, bool) or not isinstance(eps, (int, float)):
            raise InstanceError("epsilon", "expected a number")
        kind = KClusterOut(k, float(eps))
    labels = doc.get("labels")
    return Instance(metric, kind, z, labels=labels, allow_degenerate=allow_degenerate)


def load_instance(document, allow_degenerate=False, validate_triangle=False):
    """Parse and validate an instance from JSON text/bytes or a decoded dict."""
    if isinstance(document, (bytes, bytearray)):
        document = document.decode("utf-8")
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise InstanceError("", f"invalid JSON: {exc}") from exc
    return from_document(document, allow_degenerate, validate_triangle)


def read_instance(path, **kwargs):
    with open(path, "rb") as fh:
        return load_instance(fh.read(), **kwargs)


def write_instance(inst, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(save_instance(inst))


def make_instance(metric, *, k=None, epsilon=0.0, z=0, opening_costs=1.0, labels=None,
                  allow_degenerate=False):
    """Convenience constructor: k-clustering when ``k`` is given, UFL otherwise."""
    if k is not None:
        kind = KClusterOut(int(k), float(epsilon))
    elif np.ndim(opening_costs) == 0:
        kind = UflOut(float(opening_costs))
    else:
        kind = UflOut(tuple(float(v) for v in opening_costs))
    return Instance(metric, kind, z, labels=labels, allow_degenerate=allow_degenerate)
