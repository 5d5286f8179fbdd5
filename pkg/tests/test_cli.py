import io
import json
import subprocess
import sys

import pytest

from aqdtrees.cli import main


@pytest.fixture
def trees(tmp_path):
    paths = {}
    for role in ("T1", "T2"):
        for s, k, m in ((1, 1, 1), (2, 1, 2)):
            p = tmp_path / f"{role.lower()}_{s}{k}{m}.json"
            assert main(["tree", "build", "--role", role, "--s", str(s), "--k", str(k),
                         "--m", str(m), "--out", str(p)]) == 0
            paths[role, s] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_tree_build_stdout(capsys):
    code, out, _ = run(capsys, "tree", "build", "--role", "T1", "--s", "1", "--k", "1", "--m", "1")
    assert code == 0 and len(json.loads(out)["nodes"]) == 5


def test_tree_build_dot(tmp_path, capsys):
    dot = tmp_path / "t.dot"
    out = tmp_path / "t.json"
    run(capsys, "tree", "build", "--role", "T2", "--s", "1", "--k", "1", "--m", "1",
        "--out", str(out), "--dot", str(dot))
    assert dot.read_text().startswith("digraph")


def test_prop_eval(trees, capsys):
    assert run(capsys, "prop", "eval", "--tree", trees["T1", 1], "--i", "1")[1].strip() == "true"
    code, out, _ = run(capsys, "prop", "eval", "--tree", trees["T2", 1], "--i", "1", "--json")
    assert json.loads(out)["value"] is False


@pytest.mark.parametrize("action,expected", [("qd", "3"), ("aqd", "1")])
def test_formula_metrics(capsys, action, expected):
    text = "E x . E y . pi(y) = x & (A z . pi(z) = x -> z = y)"
    assert run(capsys, "formula", action, "--formula", text)[1].strip() == expected


def test_formula_eval(trees, capsys):
    code, out, _ = run(capsys, "formula", "eval", "--formula", "A y . pi(y) = R -> !(A z . !pi(z) = y)",
                       "--tree", trees["T1", 1])
    assert code == 0 and out.strip() == "true"


def test_formula_syntax_error(capsys):
    code, _, err = run(capsys, "formula", "qd", "--formula", "E x .")
    assert code == 2 and "error" in err


def test_game_solve(trees, capsys):
    code, out, _ = run(capsys, "game", "solve", "--left", trees["T1", 1], "--right", trees["T2", 1],
                       "--variant", "switch:1,2", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["winner"] == "Spoiler" and doc["line"]
    code, out, _ = run(capsys, "game", "solve", "--left", trees["T1", 2], "--right", trees["T2", 2],
                       "--variant", "batch:2,1", "--prune")
    assert out.startswith("winner: Duplicator")


def test_game_play_and_replay(trees, tmp_path, capsys, monkeypatch):
    log = tmp_path / "game.log"
    monkeypatch.setattr(sys, "stdin", io.StringIO("R 17\nL 2\n"))
    code, out, _ = run(capsys, "game", "play", "--left", trees["T1", 2], "--right", trees["T2", 2],
                       "--variant", "batch:2,1", "--transcript", str(log))
    assert code == 0 and "engine: recursive" in out and "result: Duplicator" in out
    assert "round=2" in log.read_text()
    code, out, _ = run(capsys, "game", "replay", "--left", trees["T1", 2], "--right", trees["T2", 2],
                       "--transcript", str(log), "--json")
    doc = json.loads(out)
    assert doc["satisfied"] and doc["rounds"] == 2


def test_game_play_minimax_fallback(trees, tmp_path, capsys, monkeypatch):
    log = tmp_path / "game.log"
    monkeypatch.setattr(sys, "stdin", io.StringIO("bogus\nR 3\nL 9\nL 4\n"))
    code, out, _ = run(capsys, "game", "play", "--left", trees["T1", 1], "--right", trees["T2", 1],
                       "--variant", "switch:1,2", "--transcript", str(log))
    assert code == 0 and "minimax (Spoiler wins)" in out and "illegal move" in out
    assert "enter e.g." in out and "result:" in out


def test_game_play_quit(trees, tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("q\n"))
    code, out, _ = run(capsys, "game", "play", "--left", trees["T1", 1], "--right", trees["T2", 1],
                       "--variant", "batch:1,1", "--transcript", str(tmp_path / "x.log"))
    assert code == 0 and "unfinished" in out


def test_verify_construction(capsys):
    code, out, _ = run(capsys, "verify", "construction", "--s", "2", "--k", "1", "--m", "2")
    assert code == 0 and "pass" in out


def test_verify_sweep(capsys):
    code, out, _ = run(capsys, "verify", "sweep", "--s", "1", "--k", "2", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["lines"] == 164 and doc["losses"] == 0


def test_verify_sweep_random(capsys):
    code, out, _ = run(capsys, "verify", "sweep", "--s", "2", "--k", "2", "--random", "200", "--seed", "3")
    assert code == 0 and "200 lines, 0 losses" in out


def test_verify_sweep_designated(tmp_path, capsys):
    p = tmp_path / "d.json"
    p.write_text("[[1, 1]]")
    code, out, _ = run(capsys, "verify", "sweep", "--s", "2", "--k", "1", "--designated", str(p),
                       "--start", "R")
    assert code == 0 and "675 lines, 0 losses" in out


def test_verify_theorem1(trees, capsys):
    code, out, _ = run(capsys, "verify", "theorem1", "--left", trees["T1", 1], "--right", trees["T2", 1],
                       "--s", "1", "--r", "2", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["witness"] and not doc["counterexample"]


def test_verify_lower_bound(capsys):
    code, out, _ = run(capsys, "verify", "lower-bound", "--s", "2", "--k", "1")
    assert code == 0 and "verdict" in out


def test_usage_errors(tmp_path, capsys):
    assert run(capsys, "verify", "construction", "--s", "2", "--k", "2", "--m", "1")[0] == 2
    assert run(capsys, "prop", "eval", "--tree", str(tmp_path / "missing.json"), "--i", "0")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "prop", "eval", "--tree", str(bad), "--i", "0")[0] == 2
    with pytest.raises(SystemExit):
        main(["game"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "aqdtrees", "formula", "qd", "--formula", "x = R"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "0"
