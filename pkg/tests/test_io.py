from fractions import Fraction as F
import json

import pytest

from nashflow import io
from nashflow.engine import compute_nash_flow
from nashflow.errors import ParseError
from nashflow.fixtures import n1_network, random_thin_flow_instance, rng_for
from nashflow.pwl import INF


@pytest.mark.parametrize("raw, want", [(3, F(3)), ("3/2", F(3, 2)), (" -4/6 ", F(-2, 3))])
def test_rationals(raw, want):
    assert io.q_from_json(raw) == want
    assert io.q_from_json(io.q_to_json(want)) == want


@pytest.mark.parametrize("raw", [1.5, True, "1.5", "1e3", "x", None, "1/0"])
def test_inexact_or_bad_numbers_refused(raw):
    with pytest.raises(ParseError):
        io.q_from_json(raw)


def test_inf_only_where_allowed():
    assert io.q_from_json("inf", allow_inf=True) == INF
    with pytest.raises(ParseError):
        io.q_from_json("inf")


def test_network_round_trip():
    for net in (n1_network(1), n1_network(2, lifted=True)):
        assert io.network_from_json(io.network_to_json(net)) == net


def test_instance_round_trip():
    inst = random_thin_flow_instance(rng_for(4))
    assert io.instance_from_json(io.instance_to_json(inst)) == inst


def test_float_in_file_refused(tmp_path):
    p = tmp_path / "net.json"
    doc = io.network_to_json(n1_network())
    text = io.dumps(doc).replace('"rate": 3', '"rate": 3.0')
    p.write_text(text)
    with pytest.raises(ParseError):
        io.read_network(p)


def test_missing_field(tmp_path):
    doc = io.network_to_json(n1_network())
    del doc["arcs"][0]["cap_out"]
    with pytest.raises(ParseError):
        io.network_from_json(doc)


def test_trajectory_tamper_detected():
    doc = io.trajectory_to_json(compute_nash_flow(n1_network(1)))
    assert doc["format"] == "nashflow-trajectory"
    doc["functions"]["e2"]["z"]["points"][-1][1] = "99"
    with pytest.raises(ParseError):
        io.trajectory_from_json(doc)


def test_trajectory_phase_table():
    doc = io.trajectory_to_json(compute_nash_flow(n1_network(2)))
    ph = doc["phases"][1]
    assert ph["start"] == 6 and ph["length"] == "inf"
    assert ph["c"]["v"] == "2/3"
    assert ph["classes"] == {"e1": "A", "e2": "ARF", "e3": ""}
    assert ph["inflow_bound"]["e2"] == 2
    assert json.loads(io.dumps(doc)) == doc
