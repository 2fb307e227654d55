import json

import numpy as np
import pytest

from clusterout import jsonio
from clusterout.errors import InstanceError
from clusterout.gaps import gen_kmed_gap, gen_ufl_gap
from clusterout.instance import (KCLUSTER, UFL, load_instance, make_instance, read_instance,
                                 save_instance, write_instance)
from clusterout.metric import MetricSpace


def minimal_doc(**over):
    doc = {"kind": KCLUSTER, "k": 1, "z": 0, "points": [[0.0, 0.0], [1.0, 0.0]],
           "centers": [[0.0, 0.0]]}
    doc.update(over)
    return doc


def test_minimal_document_is_valid():
    inst = load_instance(minimal_doc())
    assert (inst.n, inst.m, inst.z, inst.budget) == (2, 1, 0, 1)
    assert not inst.is_ufl


def test_z_equal_n_rejected_without_flag():
    with pytest.raises(InstanceError, match="degenerate outlier count"):
        load_instance(minimal_doc(z=2))
    inst = load_instance(minimal_doc(z=2), allow_degenerate=True)
    assert inst.z == 2


def test_ufl_gap_roundtrip():
    inst = gen_ufl_gap(2, 5).instance
    text = save_instance(inst)
    again = load_instance(text)
    assert again == inst
    assert save_instance(again) == text
    assert np.array_equal(again.costs, inst.costs)


def test_roundtrip_all_backends(tmp_path, rng):
    metrics = [
        MetricSpace.from_matrix(rng.random((6, 3)) * 3, q=2),
        MetricSpace.from_euclidean(rng.random((6, 2)), rng.random((3, 2))),
        MetricSpace.from_graph(5, [[0, 1, 1.5], [1, 2, 0.25], [2, 3, 2.0], [3, 4, 1.0]], [0, 2, 4], [1, 3]),
    ]
    for ms in metrics:
        for inst in (make_instance(ms, k=1, epsilon=0.5, z=1),
                     make_instance(ms, z=1, opening_costs=[0.5] * ms.n_centers)):
            path = tmp_path / "x.json"
            write_instance(inst, path)
            back = read_instance(path)
            assert back == inst
            assert np.array_equal(back.costs, inst.costs)


def test_kmed_gap_roundtrip_floats_bit_equal():
    inst = gen_kmed_gap(3, 8, 1.0, 2.0).instance
    back = load_instance(save_instance(inst))
    assert np.array_equal(back.metric.data["points"], inst.metric.data["points"])


@pytest.mark.parametrize("doc,where", [
    (minimal_doc(k=2), "k"),
    (minimal_doc(z=-1), "z"),
    (minimal_doc(kind="nope"), "kind"),
    (minimal_doc(epsilon=1.0, k=1), "epsilon"),
    ({"kind": UFL, "z": 0, "opening_costs": -1.0, "distance_matrix": [[1.0]]}, "opening_costs"),
    ({"kind": UFL, "z": 0, "opening_costs": [1.0, 2.0], "distance_matrix": [[1.0]]}, "opening_costs"),
    ({"kind": UFL, "z": 0, "distance_matrix": [[-1.0]]}, "distance_matrix[0][0]"),
    ({"kind": UFL, "z": 0, "distance_matrix": [[1.0]], "points": [[0.0]], "centers": [[0.0]]}, ""),
    ({"kind": UFL, "z": 0}, ""),
    ({"kind": UFL, "z": 0.5, "distance_matrix": [[1.0]]}, "z"),
])
def test_validation_errors(doc, where):
    with pytest.raises(InstanceError) as err:
        load_instance(doc)
    assert err.value.path == where


def test_invalid_json_text():
    with pytest.raises(InstanceError):
        load_instance("{not json")


def test_budget_floor():
    ms = MetricSpace.from_matrix(np.ones((3, 10)))
    assert make_instance(ms, k=5, epsilon=0.2).budget == 6
    assert make_instance(ms, k=3, epsilon=0.2).budget == 3
    assert make_instance(ms, k=5, epsilon=0.0).budget == 5
    assert make_instance(ms, k=10, epsilon=0.0).budget == 10


def test_uniform_opening_default():
    inst = load_instance({"kind": UFL, "z": 0, "distance_matrix": [[1.0, 2.0]]})
    assert np.array_equal(inst.opening_costs, [1.0, 1.0])


def test_canonical_json_format():
    text = jsonio.dumps({"b": [1, 2.0, 0.1], "a": {"y": 1e-20, "x": True}})
    assert text == '{"a":{"x":true,"y":1e-20},"b":[1,2.0,0.1]}\n'
    assert json.loads(text)["b"][2] == 0.1
