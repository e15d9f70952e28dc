import csv
import json
import subprocess
import sys

import pytest

from wspan.cli import main
from wspan.generators import is_connected
from wspan.graph import DemandPairSet, Subgraph, load_graph
from wspan.verify import verify_stretch


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.txt"
    assert main(["generate", "--n", "60", "--m", "200", "--seed", "7", "--out", str(path)]) == 0
    return path


@pytest.fixture
def pairs_file(tmp_path):
    path = tmp_path / "p.txt"
    assert main(["pairs", "--n", "60", "--p", "120", "--seed", "2", "--out", str(path)]) == 0
    return path


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for out in (a, b):
        assert main(["generate", "--n", "100", "--m", "500", "--seed", "7", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    g = load_graph(str(a))
    assert (g.n, g.m) == (100, 500) and is_connected(g.n, g.edges())
    assert 0 < g.ew.min() and g.ew.max() <= 1.0


def test_generate_hub_counterexample(tmp_path):
    out = tmp_path / "f.txt"
    argv = ["generate", "--kind", "figure1", "--d", "2", "--ell", "3", "--epsilon", "0.1",
            "--w-max", "1", "--out", str(out)]
    assert main(argv) == 0
    g = load_graph(str(out))
    assert (g.n, g.m) == (6, 11)


@pytest.mark.parametrize("kind", ["random-power-weight", "grid"])
def test_generate_other_kinds(tmp_path, kind):
    out = tmp_path / "k.txt"
    argv = ["generate", "--kind", kind, "--n", "30", "--m", "60", "--rows", "4", "--cols", "5",
            "--seed", "1", "--out", str(out)]
    assert main(argv) == 0
    assert is_connected(*(lambda g: (g.n, g.edges()))(load_graph(str(out))))


@pytest.mark.parametrize(
    "argv",
    [
        ["generate", "--n", "10", "--m", "3"],
        ["generate", "--kind", "grid"],
        ["generate", "--kind", "nope"],
        ["build", "--graph", "missing.txt", "--all-pairs", "--mode", "2w"],
        ["build", "--mode", "3w"],
        [],
    ],
)
def test_argument_errors(argv):
    assert main(argv) == 2


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SPANNER_SEED", "7")
    a = tmp_path / "a.txt"
    assert main(["generate", "--n", "40", "--m", "80", "--out", str(a)]) == 0
    b = tmp_path / "b.txt"
    assert main(["generate", "--n", "40", "--m", "80", "--seed", "7", "--out", str(b)]) == 0
    assert a.read_text().splitlines()[1:] == b.read_text().splitlines()[1:]
    monkeypatch.setenv("SPANNER_SEED", "x")
    assert main(["generate", "--n", "40", "--m", "80"]) == 2


@pytest.mark.parametrize("mode", ["2w", "4w", "8w"])
def test_build_then_verify(tmp_path, graph_file, pairs_file, mode):
    out = tmp_path / f"s{mode}.txt"
    argv = ["build", "--graph", str(graph_file), "--pairs", str(pairs_file), "--mode", mode,
            "--seed", "3", "--out", str(out)]
    assert main(argv) == 0
    meta = json.loads((tmp_path / f"s{mode}.txt.json").read_text())
    assert meta["schema"] == 1 and meta["verified"] is True and meta["mode"] == mode
    report = tmp_path / "r.json"
    argv = ["verify", "--graph", str(graph_file), "--spanner", str(out), "--pairs",
            str(pairs_file), "--mode", mode, "--out", str(report)]
    assert main(argv) == 0
    doc = json.loads(report.read_text())
    assert doc["pass"] and doc["contained"]


def test_build_deterministic(tmp_path, graph_file):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.txt"
        argv = ["build", "--graph", str(graph_file), "--all-pairs", "--mode", "4w",
                "--seed", "11", "--out", str(out), "--meta", str(tmp_path / f"{name}.json")]
        assert main(argv) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_build_json_format(tmp_path, graph_file):
    out = tmp_path / "s.json"
    argv = ["build", "--graph", str(graph_file), "--all-pairs", "--mode", "8w",
            "--format", "json", "--out", str(out)]
    assert main(argv) == 0
    doc = json.loads(out.read_text())
    assert doc["verified"] and len(doc["spanner_edges"]) == doc["edges"]
    assert doc["p_star"] >= 1


def test_build_subset(tmp_path, graph_file):
    nodes = tmp_path / "s.txt"
    nodes.write_text("0 5 9\n12\n")
    out = tmp_path / "h.txt"
    assert main(["build", "--graph", str(graph_file), "--subset", str(nodes), "--mode", "4w",
                 "--out", str(out)]) == 0
    assert main(["build", "--graph", str(graph_file), "--subset", str(nodes), "--mode", "2w"]) == 2


def test_build_needs_one_demand(graph_file, pairs_file):
    assert main(["build", "--graph", str(graph_file), "--mode", "2w"]) == 2
    assert main(["build", "--graph", str(graph_file), "--pairs", str(pairs_file),
                 "--all-pairs", "--mode", "2w"]) == 2


def test_build_tree_returns_tree(tmp_path):
    g = tmp_path / "t.txt"
    g.write_text("4 3\n0 1 0.5\n1 2 0.25\n1 3 1.0\n")
    out = tmp_path / "h.txt"
    assert main(["build", "--graph", str(g), "--all-pairs", "--mode", "2w", "--out", str(out)]) == 0
    assert load_graph(str(out)) == load_graph(str(g))


def test_build_construction_failure(tmp_path, monkeypatch):
    import wspan.constructions as c
    import numpy as np

    monkeypatch.setattr(c, "_sample", lambda *a: np.zeros(0, dtype=np.int64))
    n = 400
    rng = np.random.default_rng(0)
    g = tmp_path / "cyc.txt"
    g.write_text(f"{n} {n}\n" + "".join(f"{i} {(i + 1) % n} {1 - rng.random()!r}\n" for i in range(n)))
    pairs = tmp_path / "p.txt"
    main(["pairs", "--n", str(n), "--p", "150", "--out", str(pairs)])
    argv = ["build", "--graph", str(g), "--pairs", str(pairs), "--mode", "2w", "--d", "1",
            "--ell", "2", "--max-rounds", "2", "--out", str(tmp_path / "h.txt")]
    assert main(argv) == 3


def test_verify_spanning_tree_fails(tmp_path):
    g = tmp_path / "c.txt"
    g.write_text("4 4\n0 1 1.0\n1 2 1.0\n2 3 1.0\n3 0 1.0\n")
    h = tmp_path / "h.txt"
    h.write_text("4 3\n0 1 1.0\n1 2 1.0\n2 3 1.0\n")
    out = tmp_path / "r.json"
    argv = ["verify", "--graph", str(g), "--spanner", str(h), "--all-pairs", "--bound", "0",
            "--out", str(out)]
    assert main(argv) == 1
    doc = json.loads(out.read_text())
    assert doc["max_additive_error"] == 2.0 and doc["worst"][0]["error"] == 2.0
    # self-verification passes
    assert main(["verify", "--graph", str(g), "--spanner", str(g), "--all-pairs", "--bound", "0",
                 "--out", str(out)]) == 0


def test_verify_matches_library(tmp_path, graph_file, pairs_file):
    h = tmp_path / "h.txt"
    lines = graph_file.read_text().splitlines()
    body = [ln for ln in lines if not ln.startswith("#")][1:]
    kept = body[::2]
    h.write_text(f"60 {len(kept)}\n" + "\n".join(kept) + "\n")
    out = tmp_path / "r.json"
    code = main(["verify", "--graph", str(graph_file), "--spanner", str(h), "--pairs",
                 str(pairs_file), "--bound", "0.5", "--out", str(out)])
    doc = json.loads(out.read_text())
    g = load_graph(str(graph_file))
    sub = Subgraph.from_edge_ids(g, range(0, g.m, 2))
    with open(pairs_file) as fh:
        pairs = DemandPairSet([tuple(map(int, ln.split())) for ln in fh])
    rep = verify_stretch(g, sub, pairs, 0.5)
    assert doc["pass"] == rep.passed and code == (0 if rep.passed else 1)
    assert doc["max_additive_error"] == rep.max_error and doc["violations"] == rep.violations


def test_verify_containment_violation(tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("3 2\n0 1 1.0\n1 2 1.0\n")
    h = tmp_path / "h.txt"
    h.write_text("3 1\n0 2 1.0\n")
    out = tmp_path / "r.json"
    argv = ["verify", "--graph", str(g), "--spanner", str(h), "--all-pairs", "--bound", "0",
            "--out", str(out)]
    assert main(argv) == 4
    assert json.loads(out.read_text())["contained"] is False
    h.write_text("3 1\n0 1 2.0\n")  # right edge, wrong weight
    assert main(argv) == 4


def test_verify_needs_bound(graph_file):
    assert main(["verify", "--graph", str(graph_file), "--spanner", str(graph_file),
                 "--all-pairs"]) == 2


def test_harness(tmp_path, graph_file):
    out = tmp_path / "h.json"
    assert main(["harness", "--graph", str(graph_file), "--d", "3", "--trials", "40",
                 "--seed", "1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and doc["eligible"] > 0


def test_harness_hub_counterexample_adversarial(tmp_path):
    g = tmp_path / "f.txt"
    main(["generate", "--kind", "figure1", "--d", "3", "--ell", "5", "--epsilon", "0.1",
          "--w-max", "10", "--out", str(g)])
    out = tmp_path / "h.json"
    assert main(["harness", "--graph", str(g), "--d", "3", "--trials", "20", "--init",
                 "adversarial", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["bounds_apply"] is False and 3 in doc["adjacent_counts"]


def test_bench_empty_grid(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--sizes", "", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 1 and rows[0].startswith("schema,n,m,p,mode")


def test_bench_rows_reproducible(tmp_path, capsys):
    args = ["bench", "--sizes", "32,48", "--modes", "2w,8w", "--seeds", "0,1", "--pairs", "50"]
    texts = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.csv"
        assert main(args + ["--out", str(out), "--fit"]) == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        texts.append([{k: v for k, v in r.items() if k != "wall_ms"} for r in rows])
    assert texts[0] == texts[1] and len(texts[0]) == 8
    for r in texts[0]:
        assert r["failed"] == "False" and int(r["edges"]) <= int(r["m"])
        assert float(r["max_additive_error"]) <= float(r["bound"])
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert set(summary["slopes"]) == {"2w", "8w"}


def test_bench_records_failures(tmp_path):
    out = tmp_path / "b.csv"
    # a single-node graph has no pairs; the row is flagged and the sweep goes on
    assert main(["bench", "--sizes", "1,16", "--modes", "2w", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert [r["failed"] for r in rows] == ["True", "False"]
    assert rows[0]["error"]


def test_console_script(graph_file):
    out = subprocess.run(
        [sys.executable, "-m", "wspan.cli", "verify", "--graph", str(graph_file), "--spanner",
         str(graph_file), "--all-pairs", "--mode", "2w"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0 and json.loads(out.stdout)["pass"]
