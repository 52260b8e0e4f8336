import json

import numpy as np
import pytest

from rolesim.cli import THREADS_ENV, _resolve_threads, main
from rolesim.core import read_matrix
from rolesim.graph import Graph, Partition, write_graph
from rolesim.samples import family_graph


@pytest.fixture
def family_file(tmp_path):
    g, _ = family_graph()
    path = tmp_path / "family.txt"
    write_graph(g, path)
    return path


def run(*argv):
    return main([str(a) for a in argv])


def test_rolesim_writes_matrix_and_manifest(tmp_path, family_file, capsys):
    out = tmp_path / "family.rsim"
    assert run("rolesim", "--graph", family_file, "--beta", 0.1, "--init", "degree-binary",
               "--matching", "exact", "--out", out) == 0
    m = read_matrix(out)
    assert m.n == 13 and m[0, 4] == 1.0
    manifest = json.loads((tmp_path / "family.rsim.manifest.json").read_text())
    assert manifest["command"] == "rolesim"
    assert manifest["parameters"]["init"] == "degree-binary"
    assert manifest["report"]["converged"] is True
    assert manifest["wall_time_s"] >= 0
    assert "rolesim: 13 nodes" in capsys.readouterr().out


def test_rolesim_csv_output(tmp_path, family_file):
    out = tmp_path / "m.csv"
    assert run("rolesim", "--graph", family_file, "--out", out) == 0
    assert out.read_text().startswith("# n=13\nu,v,score\n")


def test_iceberg_and_topk(tmp_path, family_file, capsys):
    out = tmp_path / "ice.csv"
    assert run("iceberg", "--graph", family_file, "--theta", 0.95, "--beta", 0.1,
               "--alpha", 0.5, "--out", out) == 0
    assert out.read_text().startswith("# iceberg theta=0.95 beta=0.1 alpha=0.5")
    assert (tmp_path / "ice.csv.manifest.json").exists()
    capsys.readouterr()
    assert run("topk", "--scores", out, "-k", 2) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines == ["0,4,1.000000", "1,5,1.000000"]


def test_theta_not_above_beta_is_rejected(tmp_path, family_file, capsys):
    assert run("iceberg", "--graph", family_file, "--theta", 0.1, "--beta", 0.1,
               "--out", tmp_path / "x.csv") == 2
    err = capsys.readouterr().err.strip()
    assert "theta" in err and len(err.splitlines()) == 1


def test_missing_input_is_one_line_error(tmp_path, capsys):
    assert run("rolesim", "--graph", tmp_path / "nope.txt", "--out", tmp_path / "o") == 2
    err = capsys.readouterr().err.strip()
    assert "no such file" in err and len(err.splitlines()) == 1


def test_size_cap_is_reported(tmp_path, family_file, capsys):
    assert run("rolesim", "--graph", family_file, "--max-nodes", 5, "--out", tmp_path / "o") == 2
    assert "cap" in capsys.readouterr().err


def test_unknown_flag_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        run("rolesim", "--bogus")
    assert exc.value.code != 0


def test_axioms_exit_status(tmp_path, family_file, capsys):
    orbits = tmp_path / "orbits.csv"
    assert run("equiv", "orbits", "--graph", family_file, "--max-nodes", 14, "--out", orbits) == 0
    rsim = tmp_path / "f.rsim"
    run("rolesim", "--graph", family_file, "--out", rsim)
    assert run("axioms", "--matrix", rsim, "--orbits", orbits, "--tol", 1e-9,
               "--out", tmp_path / "rep.csv") == 0
    sr = tmp_path / "sr.rsim"
    assert run("simrank", "--graph", family_file, "--out", sr) == 0
    capsys.readouterr()
    assert run("axioms", "--matrix", sr, "--orbits", orbits) == 1
    assert "P3 automorphism confirmation" in capsys.readouterr().out


def test_equiv_modes(tmp_path, family_file, capsys):
    assert run("equiv", "structural", "--graph", family_file) == 0
    assert "9 classes" in capsys.readouterr().out
    assert run("equiv", "refine", "--graph", family_file, "--spectrum", "binary",
               "--degree-bands", "3,5", "--out", tmp_path / "reg.csv") == 0
    out = capsys.readouterr().out
    assert "0 4 8" in out and "3 classes" in out
    assert run("equiv", "verify", "--graph", family_file, "--partition", tmp_path / "reg.csv") == 0
    assert capsys.readouterr().out.splitlines() == ["equitable: no", "regular: yes"]
    assert run("equiv", "orbits", "--graph", family_file) == 2


def test_generators_and_block_evaluation(tmp_path, capsys):
    graph = tmp_path / "bl.txt"
    assert run("gen-block", "--sizes", "20,20", "--probs", "0.3,0.02,0.02,0.3",
               "--seed", 1, "--out", graph) == 0
    blocks = Partition.read_csv(tmp_path / "bl.txt.blocks.csv")
    assert blocks.n == 40 and blocks.k == 2
    for measure in ("rolesim", "simrankpp", "psimrank"):
        assert run(measure, "--graph", graph, "--out", tmp_path / f"{measure}.rsim") == 0
    report = tmp_path / "blocks.csv"
    assert run("eval-blocks", "--matrix", f"rs={tmp_path / 'rolesim.rsim'}",
               "--matrix", tmp_path / "psimrank.rsim", "--blocks", tmp_path / "bl.txt.blocks.csv",
               "--out", report) == 0
    rows = report.read_text().splitlines()
    assert rows[0] == "measure,block,avg_percentile"
    assert any(r.startswith("rs,overall,") for r in rows)
    assert any(r.startswith("psimrank,overall,") for r in rows)
    assert run("gen-block", "--sizes", "20,20", "--probs", "0.3", "--out", graph) == 2


def test_rank_compare_and_kshell(tmp_path, capsys):
    graph = tmp_path / "sf.txt"
    assert run("gen-sf", "--n", 120, "--m", 2, "--seed", 3, "--out", graph) == 0
    for init in ("all1", "degree-binary"):
        assert run("rolesim", "--graph", graph, "--init", init, "--out", tmp_path / f"{init}.rsim") == 0
    capsys.readouterr()
    assert run("rank-compare", "--a", tmp_path / "all1.rsim", "--b", tmp_path / "degree-binary.rsim",
               "--out", tmp_path / "cmp.csv") == 0
    r = float(capsys.readouterr().out.split(":")[1].split()[0])
    assert 0.9 < r <= 1.0
    assert run("kshell", "--graph", graph, "--out", tmp_path / "ks.csv") == 0
    ks = (tmp_path / "ks.csv").read_text().splitlines()
    assert ks[0] == "node,shell" and all(line.endswith(",2") for line in ks[1:])


def test_thread_resolution(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert _resolve_threads(3) == 3
    monkeypatch.setenv(THREADS_ENV, "2")
    assert _resolve_threads(None) == 2
    monkeypatch.delenv(THREADS_ENV)
    assert _resolve_threads(None) >= 1


def test_thread_flag_does_not_change_results(tmp_path, family_file):
    a, b = tmp_path / "a.rsim", tmp_path / "b.rsim"
    assert run("--threads", 1, "rolesim", "--graph", family_file, "--out", a) == 0
    assert run("--threads", 4, "rolesim", "--graph", family_file, "--out", b) == 0
    assert np.array_equal(read_matrix(a).scores, read_matrix(b).scores)
