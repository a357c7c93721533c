from fractions import Fraction as F

import pytest

from nashflow.dynamics import (PhaseProfile, arc_load, classify_arcs, earliest_arrival,
                               inflow_bound, node_spillback_factor, push_rate, queue_length,
                               reconstruct_arc_flows, transit_labels, waiting_time)
from nashflow.errors import DemandExceedsSupply, InconsistentPhases
from nashflow.fixtures import n1_network
from nashflow.pwl import INF, PiecewiseConstant
from nashflow.engine import compute_nash_flow

E1, E2, E3 = 0, 1, 2


@pytest.fixture(scope="module")
def left():
    return compute_nash_flow(n1_network(1))


@pytest.fixture(scope="module")
def right():
    return compute_nash_flow(n1_network(2))


def test_transit_labels():
    assert transit_labels(n1_network()) == {"s": 0, "v": 1, "t": 2}


def test_left_queue_grows_to_six(left):
    assert queue_length(left, E2, 5) == 6
    assert waiting_time(left, E2, 4) == 6
    assert left.labels["t"].eval(3) == 11
    assert left.f_in[E2] == PiecewiseConstant.from_pieces([(1, 4, 3), (4, INF, 1)])
    assert left.f_in[E3] == PiecewiseConstant.from_pieces([(4, INF, 2)])


def test_right_arc_fills_at_seven(right):
    assert queue_length(right, E2, 7) == 5
    assert arc_load(right, E2, 7) == 8
    assert waiting_time(right, E2, 7) == 3
    assert right.f_in[E2] == PiecewiseConstant.from_pieces([(1, 7, 3), (7, INF, 2)])
    assert right.f_out[E2] == PiecewiseConstant.from_pieces([(2, INF, 2)])
    assert inflow_bound(right, E2, 6) == 3
    assert inflow_bound(right, E2, 7) == 2
    assert push_rate(right, E2, 7) == 2
    assert push_rate(right, E1, F(1, 2)) == 0


def test_classification(right):
    active, resetting, full = classify_arcs(right, 6)
    assert active == {E1, E2} and resetting == {E2} and full == {E2}
    active, resetting, full = classify_arcs(right, 0)
    assert active == {E1, E2} and not resetting and not full


def test_earliest_arrival_matches_labels(left, right):
    for tr in (left, right):
        for t in (F(0), F(2), F(3), F(6), F(13, 2), F(40)):
            assert earliest_arrival(tr, t) == tr.labels_at(t)


def test_node_spillback_factor():
    assert node_spillback_factor([F(3)], F(2), [F(3)]) == (F(2, 3), [F(2)])
    c, out = node_spillback_factor([F(1), F(4)], F(3), [F(2), F(2)])
    assert c == 1 and out == [1, 2]
    c, out = node_spillback_factor([F(2), F(2)], F(2), [F(2), F(2)])
    assert c == F(1, 2) and out == [1, 1]
    with pytest.raises(DemandExceedsSupply):
        node_spillback_factor([F(1)], F(2), [F(3)])


def test_reconstruct_rejects_flow_on_flat_label():
    net = n1_network()
    ph = PhaseProfile(F(0), INF, {E1: F(3), E2: F(3)}, {"s": F(1), "v": F(0), "t": F(1)},
                      {"s": 1, "v": 1, "t": 1}, frozenset({E1, E2}), frozenset(), frozenset(), {})
    with pytest.raises(InconsistentPhases):
        reconstruct_arc_flows(net, [ph])


def test_reconstruct_rejects_gaps():
    net = n1_network()
    tr = compute_nash_flow(net)
    first, second = tr.phases
    with pytest.raises(InconsistentPhases):
        reconstruct_arc_flows(net, [first, PhaseProfile(**{**second.__dict__, "start": F(4)})])
