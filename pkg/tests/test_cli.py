import io
import json
import subprocess
import sys

import pytest

from cutkit import cli
from cutkit.graph import complete_graph, write_graph


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines() if line]


def test_greedy_k8(capsys):
    code, recs = run(["maxcut", "--method", "greedy", "--gen", "K:8", "--out", "-"], capsys)
    assert code == 0
    (rec,) = recs
    assert rec["queries"] <= 40
    assert rec["value"] >= 14
    assert rec["true_max"] == 16.0
    assert "wall_ms" not in rec


def test_cutdim_k5(capsys):
    code, recs = run(["cutdim", "--gen", "K:5"], capsys)
    assert code == 0
    assert recs[0]["dimension"] == 10


def test_treedim_k4(capsys):
    assert run(["treedim", "--gen", "K:4"], capsys)[1][0]["dimension"] == 6


def test_bench_records(capsys):
    code, recs = run(["bench", "--method", "fast-sparsify", "--gen", "er:16:0.5",
                      "--seeds", "1..4"], capsys)
    assert code == 0
    assert [r["seed"] for r in recs] == [1, 2, 3, 4]
    assert all(r["queries"] > 0 and r["kappa_schedule"] for r in recs)


@pytest.mark.parametrize("method", ["exact", "random", "deterministic", "sparsifier-full",
                                    "sparsifier-early"])
def test_maxcut_methods(method, capsys):
    code, recs = run(["maxcut", "--method", method, "--gen", "wr:7:0.8:1:10", "--seeds", "3"],
                     capsys)
    assert code == 0
    assert recs[0]["ratio"] <= 1.0 + 1e-12


def test_true_max_absent_above_limit(capsys, monkeypatch):
    monkeypatch.setenv("CUTKIT_MAX_BRUTE", "6")
    code, recs = run(["maxcut", "--method", "greedy", "--gen", "K:8"], capsys)
    assert code == 0
    assert "true_max" not in recs[0]
    assert "ratio" not in recs[0]


def test_algorithm_error_exit_one(capsys, monkeypatch):
    monkeypatch.setenv("CUTKIT_MAX_BRUTE", "6")
    code, recs = run(["maxcut", "--method", "exact", "--gen", "K:8"], capsys)
    assert code == 1
    assert recs[0]["error"] == "SizeLimitError"


@pytest.mark.parametrize("argv", [
    ["maxcut", "--method", "greedy", "--gen", "K:0"],
    ["maxcut", "--method", "greedy", "--gen", "er:5:1.5"],
    ["maxcut", "--method", "greedy", "--gen", "blob:5"],
    ["maxcut", "--method", "greedy", "--gen", "K:5", "--seeds", "5..1"],
    ["maxcut", "--method", "nope", "--gen", "K:5"],
    ["maxcut", "--method", "greedy"],
    ["sparsify", "--gen", "K:5", "--delta", "0.2"],
    ["sparsify", "--method", "fast", "--gen", "K:5", "--T", "10"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 2


def test_bad_graph_file(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("3 2\n0 1 1\n")
    with pytest.raises(SystemExit) as info:
        cli.main(["maxcut", "--method", "greedy", "--graph", str(path)])
    assert info.value.code == 2


def test_graph_file_and_output(tmp_path, capsys):
    gpath = tmp_path / "k5.txt"
    write_graph(complete_graph(5), gpath)
    out = tmp_path / "out.jsonl"
    assert cli.main(["maxcut", "--method", "exact", "--graph", str(gpath), "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["value"] == 6.0
    assert rec["queries"] == 15


def test_sparsify_save_and_audit(tmp_path, capsys):
    path = tmp_path / "h.txt"
    code, recs = run(["sparsify", "--gen", "K:7", "--seeds", "2", "--save", str(path)], capsys)
    assert code == 0
    assert (tmp_path / "h.txt.json").exists()
    code, recs = run(["audit", "--gen", "K:7", "--sparsifier", str(path)], capsys)
    assert code == 0
    assert recs[0]["cuts_checked"] == 63
    assert isinstance(recs[0]["worst_cut"], list)


def test_audit_random_cuts(capsys, monkeypatch):
    monkeypatch.setenv("CUTKIT_MAX_BRUTE", "8")
    code, recs = run(["audit", "--gen", "K:10", "--cuts", "50"], capsys)
    assert code == 0
    assert recs[0]["cuts_checked"] == 50


def test_timing_flag(capsys):
    code, recs = run(["maxcut", "--method", "greedy", "--gen", "K:4", "--timing"], capsys)
    assert recs[0]["wall_ms"] >= 0


def test_config_overrides(capsys):
    code, recs = run(["sparsify", "--gen", "K:6", "--faithful", "--epsilon", "0.5"], capsys)
    assert recs[0]["config"]["c0"] == 27.0
    assert recs[0]["config"]["epsilon"] == 0.5


def test_parse_seeds():
    assert cli.parse_seeds("1..3,7") == [1, 2, 3, 7]
    with pytest.raises(cli.UsageError):
        cli.parse_seeds("")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cutkit", "cutdim", "--gen", "K:3"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["dimension"] == 3
