import io as stdio
import json
from pathlib import Path

import pytest

import nashflow
from nashflow import cli, io
from nashflow.errors import EngineBug
from nashflow.fixtures import n1_network, random_thin_flow_instance, rng_for

DATA = Path(nashflow.__file__).parent / "data"


def run(*argv):
    buf = stdio.StringIO()
    code = cli.main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


def test_bundled_networks_match_fixtures():
    assert io.read_network(DATA / "n1_left.json") == n1_network(1)
    assert io.read_network(DATA / "n1_right.json") == n1_network(2)


def test_validate(tmp_path):
    assert run("validate", DATA / "n1_left.json") == (0, "valid: 3 nodes, 3 arcs\n")
    bad = io.network_to_json(n1_network())
    bad["arcs"][1]["storage"] = 2
    io.write_json(tmp_path / "bad.json", bad)
    code, text = run("validate", tmp_path / "bad.json")
    assert code == 1 and "StorageTooSmall at e2" in text


def test_parse_error_exit_code(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{nope")
    assert run("validate", p)[0] == 2
    assert run("solve", tmp_path / "missing.json")[0] == 2


def test_solve_summary_right_variant():
    code, text = run("solve", DATA / "n1_right.json", "--check")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "2 phases; boundary θ=6; steady state"
    assert "  c_v = 2/3" in lines and "  full e2, b+ = 2" in lines
    assert lines[-1] == "validation: pass"


def test_solve_horizon(tmp_path):
    out = tmp_path / "t.json"
    code, text = run("solve", DATA / "n1_left.json", "--horizon", "5/2", "--out", out)
    assert code == 0 and text.startswith("1 phase; horizon reached")
    assert json.loads(out.read_text())["end"] == "5/2"


def test_check_and_plot(tmp_path):
    traj = tmp_path / "t.json"
    run("solve", DATA / "n1_left.json", "--out", traj)
    code, text = run("check", traj, "--seed", 7)
    assert code == 0 and json.loads(text)["ok"] is True
    for what in ("labels", "queues", "loads"):
        svg = tmp_path / f"{what}.svg"
        assert run("plot", traj, "--what", what, "--out", svg)[0] == 0
        body = svg.read_text()
        assert body.startswith("<svg") and "polyline" in body


def test_thin_flow_command(tmp_path):
    p = tmp_path / "inst.json"
    io.write_json(p, io.instance_to_json(random_thin_flow_instance(rng_for(9))))
    code, text = run("thin-flow", p)
    assert code == 0 and json.loads(text)["violations"] == []
    code, text = run("thin-flow", p, "--all")
    assert code == 0 and isinstance(json.loads(text), list)


def test_engine_bug_exit_code(monkeypatch):
    def boom(*a, **k):
        raise EngineBug("forced")
    monkeypatch.setattr(cli, "compute_nash_flow", boom)
    assert run("solve", DATA / "n1_left.json")[0] == 3
