import json
import socket
import subprocess
import sys

import pytest

from marl_layout.cli import main


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_layout_karate_writes_34_positions(tmp_path, capsys):
    out = tmp_path / "layout.json"
    code, stdout, _ = run_cli(["layout", "--algo", "fr", "--graph", "g1",
                               "--seed", "7", "--out", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert len(doc) == 34
    stdout_doc = json.loads(stdout)
    assert stdout_doc["seed"] == 7
    assert len(stdout_doc["layout"]) == 34
    assert set(stdout_doc["metrics"]) >= {"nc", "no", "ne", "na"}


def test_layout_same_command_identical_bytes(capsys):
    args = ["layout", "--algo", "fr", "--graph", "g3", "--seed", "3"]
    _, first, _ = run_cli(args, capsys)
    _, second, _ = run_cli(args, capsys)
    assert first == second


def test_layout_unknown_algorithm_exit_3(capsys):
    code, _, err = run_cli(["layout", "--algo", "nope", "--graph", "g1"], capsys)
    assert code == 3
    assert "unknown algorithm" in err


def test_layout_missing_graph_exit_2(capsys):
    code, _, _ = run_cli(["layout", "--algo", "fr", "--graph", "missing.txt"], capsys)
    assert code == 2


def test_layout_malformed_graph_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("a b c\n")
    code, _, err = run_cli(["layout", "--algo", "fr", "--graph", str(bad)], capsys)
    assert code == 2
    assert "line 1" in err


def test_seed_env_fallback(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MARLL_SEED", "99")
    _, stdout, _ = run_cli(["layout", "--algo", "fr", "--graph", "g3"], capsys)
    assert json.loads(stdout)["seed"] == 99


def test_print_config_echoes_overrides(capsys):
    code, stdout, _ = run_cli(["layout", "--algo", "marl-fr", "--graph", "g1",
                               "--epsilon", "0.25", "--k", "40",
                               "--print-config"], capsys)
    assert code == 0
    doc = json.loads(stdout)
    assert doc["overrides"]["epsilon"] == 0.25
    assert doc["overrides"]["k"] == 40.0
    assert doc["seed"] == 0


def test_eval_single_run_matches_layout_metrics(capsys):
    code, stdout, _ = run_cli(["eval", "--graphs", "g3", "--algos", "fr",
                               "--runs", "1", "--seed", "3"], capsys)
    assert code == 0
    lines = stdout.strip().splitlines()
    assert lines[0] == "graph,algorithm,seed,nc,no,ne,na,iterations,runtime_ms"
    row = dict(zip(lines[0].split(","), lines[1].split(",")))

    _, layout_stdout, _ = run_cli(["layout", "--algo", "fr", "--graph", "g3",
                                   "--seed", "3"], capsys)
    doc = json.loads(layout_stdout)
    assert float(row["nc"]) == pytest.approx(doc["metrics"]["nc"])
    assert float(row["no"]) == pytest.approx(doc["metrics"]["no"])


def test_eval_empty_graph_list_header_only(capsys):
    code, stdout, _ = run_cli(["eval", "--graphs", "", "--algos", "fr",
                               "--runs", "1"], capsys)
    assert code == 0
    assert stdout == "graph,algorithm,seed,nc,no,ne,na,iterations,runtime_ms\n"


def test_eval_two_algos_two_rows(capsys):
    code, stdout, _ = run_cli(["eval", "--graphs", "g3", "--algos", "fr,dgc",
                               "--runs", "1", "--seed", "5"], capsys)
    assert code == 0
    lines = stdout.strip().splitlines()
    assert len(lines) == 3  # header + 2 rows
    assert lines[1].startswith("g3,fr,")
    assert lines[2].startswith("g3,dgc,")


def test_eval_unknown_algo_exit_3(capsys):
    code, _, _ = run_cli(["eval", "--graphs", "g3", "--algos", "zzz"], capsys)
    assert code == 3


def test_serve_port_in_use_exit_4(capsys):
    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.bind(("127.0.0.1", 0))
    blocker.listen(1)
    port = blocker.getsockname()[1]
    try:
        code, _, err = run_cli(["serve", "--port", str(port)], capsys)
        assert code == 4
        assert "cannot bind" in err
    finally:
        blocker.close()


def test_serve_ephemeral_port_prints_binding():
    # --port 0 must bind an ephemeral port and print it before serving
    proc = subprocess.Popen(
        [sys.executable, "-m", "marl_layout.cli", "serve", "--port", "0"],
        stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, text=True)
    try:
        line = proc.stdout.readline()
        assert "listening on 127.0.0.1:" in line
        port = int(line.strip().rsplit(":", 1)[1])
        assert port > 0
    finally:
        proc.terminate()
        proc.wait(timeout=10)
