import csv
import json

import pytest

from subramsey.bigraph import BipartiteGraph, save_edge_list
from subramsey.cli import main
from subramsey.trial import TrialConfig


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def read_json(path):
    return json.loads(path.read_text())


def test_gen_and_checks(work, capsys):
    assert main(["gen", "--N", "12", "--p", "0.5", "--seed", "3", "--out", "g.txt"]) == 0
    assert (work / "g.txt").read_text().startswith("p bip 12 12 ")
    code = main(["check", "--host", "g.txt", "--mode", "density", "--p", "0.5", "--n", "12", "--report", "d.json"])
    d = read_json(work / "d.json")
    assert code == (0 if d["pass"] else 1)
    main(["check", "--in", "g.txt", "--mode", "discrepancy", "--p", "0.5", "--c3n", "6", "--report", "q.json"])
    assert read_json(work / "q.json")["max_deviation"] == pytest.approx(2 / 3)
    assert main(["check", "--host", "g.txt", "--mode", "expanding", "--n", "1", "--D", "0"]) == 0
    capsys.readouterr()


def test_check_joined_and_extract(work):
    g = BipartiteGraph.from_edges(12, 12, [(i, j) for i in range(12) for j in range(12) if i > 2 or j > 2])
    save_edge_list(g, work / "hole.txt")
    assert main(["check-joined", "--alpha", "1/4", "--in", "hole.txt", "--report", "j.json"]) == 1
    assert read_json(work / "j.json")["witness_A"] == [0, 1, 2]
    save_edge_list(BipartiteGraph.complete(12, 12), work / "k.txt")
    assert main(["extract", "--alpha", "1/6", "--in", "k.txt", "--verify", "--out-report", "x.json"]) == 0
    x = read_json(work / "x.json")
    assert x["verify"]["pass"] and x["removed1"] == []


def test_embed(work):
    save_edge_list(BipartiteGraph.complete(256, 256), work / "host.txt")
    (work / "base.txt").write_text("0 1\n")
    (work / "sigma.txt").write_text("7\n")
    code = main(["embed", "--host", "host.txt", "--base", "base.txt", "--sigma", "sigma.txt",
                 "--alpha", "1/32", "--out", "emb.tsv", "--report", "e.json"])
    assert code == 0
    rep = read_json(work / "e.json")
    assert rep["audit"]["pass"] and rep["hypotheses"]["pass"]
    assert len((work / "emb.tsv").read_text().splitlines()) == 8


def test_embed_error_exit_code(work, capsys):
    save_edge_list(BipartiteGraph.complete(64, 64), work / "host.txt")
    (work / "base.txt").write_text("0 1\n")
    (work / "sigma.txt").write_text("7\n")
    code = main(["embed", "--host", "host.txt", "--base", "base.txt", "--sigma", "sigma.txt", "--alpha", "1/32"])
    assert code == 2
    assert "HypothesisViolation" in capsys.readouterr().err


def test_params(capsys):
    assert main(["params", "--r", "2", "--D", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["c3"] == 26 and out["exponent"] == pytest.approx(508.263, abs=1e-3)


def test_verify_numerics(work):
    code = main(["verify-numerics", "--D-range", "2..4", "--r-range", "2..3", "--csv", "n.csv", "--figures", "figs"])
    assert code == 0
    rows = list(csv.DictReader((work / "n.csv").open()))
    assert len(rows) == 6
    for name in ("f_deficit.png", "delta_margins.png", "size_bound.png"):
        assert (work / "figs" / name).stat().st_size > 0


def test_trial_and_batch(work):
    cfg = TrialConfig(N=40, p=0.5, alpha=1 / 32, seed=1)
    (work / "cfg.json").write_text(json.dumps(cfg.to_json()))
    assert main(["trial", "--config", "cfg.json", "--report", "t.json"]) == 0
    assert read_json(work / "t.json")["host_N"] == 40
    assert main(["batch", "--config", "cfg.json", "--trials", "3", "--jobs", "1",
                 "--report", "b.json", "--figures", "figs"]) == 0
    assert read_json(work / "b.json")["trials"] == 3
    assert (work / "figs" / "batch_classes.png").stat().st_size > 0
