import json

import pytest

from clusterout.cli import main
from clusterout.gaps import gen_kmed_gap
from clusterout.instance import write_instance


def read(path):
    return json.loads(path.read_text())


def test_gap_gen_then_verify(tmp_path, monkeypatch):
    monkeypatch.setenv("CLUSTEROUT_OUTPUT_DIR", str(tmp_path))
    assert main(["gap-gen", "--family", "ufl", "--rho", "2", "--z", "5", "--out", "g.json"]) == 0
    assert (tmp_path / "g.local.json").exists() and (tmp_path / "g.opt.json").exists()
    rc = main(["gap-verify", "--instance", str(tmp_path / "g.json"), "--local", str(tmp_path / "g.local.json"),
               "--opt", str(tmp_path / "g.opt.json"), "--rho", "2", "--out", "rep.json"])
    assert rc == 0
    rep = read(tmp_path / "rep.json")
    assert rep["ratio"] == 2.5 and rep["localCertified"] and rep["optConfirmed"]


def test_gap_verify_failure_exit_code(tmp_path):
    base = tmp_path / "g.json"
    assert main(["gap-gen", "--family", "ufl", "--params", "rho=2,z=5", "--out", str(base)]) == 0
    rc = main(["gap-verify", "--instance", str(base), "--local", str(tmp_path / "g.local.json"),
               "--opt", str(tmp_path / "g.opt.json"), "--rho", "5", "--out", str(tmp_path / "r.json")])
    assert rc == 2
    assert "counterexample" in read(tmp_path / "r.json")


def test_unknown_flag_exit_one(capsys):
    assert main(["solve", "--instance", "x.json", "--bogus"]) == 1
    assert "usage:" in capsys.readouterr().err
    assert main([]) == 1


def test_invalid_instance_exit_one(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "kcluster-out", "k": 1, "z": 2, "points": [[0,0],[1,0]], "centers": [[0,0]]}')
    assert main(["solve", "--instance", str(bad)]) == 1
    assert main(["exact", "--instance", str(tmp_path / "missing.json")]) == 1


def test_solve_and_exact(tmp_path):
    g = gen_kmed_gap(3, 8, 1.0, 2.0)
    inst = tmp_path / "k.json"
    write_instance(g.instance, inst)
    assert main(["solve", "--instance", str(inst), "--rho", "3", "--epsilon", "1e-12",
                 "--out", str(tmp_path / "t.json")]) == 0
    assert main(["exact", "--instance", str(inst), "--out", str(tmp_path / "e.json")]) == 0
    trace, ex = read(tmp_path / "t.json"), read(tmp_path / "e.json")
    assert ex["cost"] == 6.0
    assert trace["solution"]["cost"] == pytest.approx(6.0, rel=1e-9)
    assert main(["solve", "--instance", str(inst), "--centers", "0,3,4", "--rho", "1",
                 "--out", str(tmp_path / "t1.json")]) == 0
    assert read(tmp_path / "t1.json")["iterations"] == 0


def test_pair_verify(tmp_path):
    g = gen_kmed_gap(3, 8, 1.0, 2.0)
    inst = tmp_path / "k.json"
    write_instance(g.instance, inst)
    assert main(["pair-verify", "--instance", str(inst), "--trials", "20", "--rho", "2",
                 "--out", str(tmp_path / "p.json")]) == 0
    assert read(tmp_path / "p.json")["ok"]


def test_bench_full_swaps_ratio_one(tmp_path):
    out = tmp_path / "b.json"
    assert main(["bench", "--count", "8", "--n", "10", "--m", "5", "--k", "2", "--z", "2", "--rho", "5",
                 "--epsilon", "1e-12", "--out", str(out), "--csv", str(tmp_path / "b.csv")]) == 0
    rows = read(out)["rows"]
    assert len(rows) == 8
    assert all(abs(r["ratio"] - 1.0) <= 1e-9 for r in rows)
    lines = (tmp_path / "b.csv").read_text().splitlines()
    assert lines[0].startswith("seed,n,m,k") and len(lines) == 9


def test_artifacts_byte_identical(tmp_path):
    for name in ("a", "b"):
        d = tmp_path / name
        d.mkdir()
        assert main(["--threads", "3" if name == "a" else "1", "bench", "--count", "6", "--seed", "4",
                     "--out", str(d / "bench.json")]) == 0
        assert main(["gap-gen", "--family", "kmed", "--k", "4", "--z", "12", "--gamma", "2.75",
                     "--out", str(d / "g.json")]) == 0
        assert main(["solve", "--instance", str(d / "g.json"), "--seed-policy", "random", "--seed", "5",
                     "--out", str(d / "t.json")]) == 0
    for f in ("bench.json", "g.json", "g.local.json", "g.opt.json", "t.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
