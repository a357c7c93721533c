from fractions import Fraction as F

import pytest

from nashflow.engine import compute_nash_flow
from nashflow.errors import PreconditionNotMet
from nashflow.fixtures import MUTATIONS, _replace, n1_network
from nashflow.pwl import PiecewiseConstant, INF
from nashflow.validator import (arc_time_grid, check_epsilon, check_feasibility,
                                check_original_model_reduction, epsilon_is_loose,
                                epsilon_lower_bound, phase_rates, source_samples,
                                validate_trajectory)


@pytest.fixture(scope="module")
def right():
    return compute_nash_flow(n1_network(2))


def test_equilibria_pass_everything(right):
    rep = validate_trajectory(right)
    assert rep.ok, rep.witnesses()[:3]
    assert set(rep.checks) >= {"inflow_condition", "fair_allocation", "no_slack", "no_deadlock",
                               "flow_conservation", "outflow_capacity", "non_deficit", "storage",
                               "static_flow_identity", "flow_on_active_arcs", "bellman_labels",
                               "phase_derivatives", "queued_outflow_bound"}
    assert rep.as_dict()["ok"] is True


def test_samples_are_seeded(right):
    a = source_samples(right, seed=1)
    assert a == source_samples(right, seed=1)
    assert a != source_samples(right, seed=2)
    assert {0, 6} <= set(a) and all(t >= 0 for t in a)


def test_grid_contains_breakpoints_and_midpoints(right):
    grid = arc_time_grid(right, source_samples(right))
    assert {F(1), F(2), F(7)} <= set(grid)
    i = grid.index(F(7))
    assert grid[i + 1] == (grid[i] + grid[i + 2]) / 2
    assert grid[-1] > 7


def test_phase_rates_recovered_from_functions(right):
    x, l, c = phase_rates(right, 1)
    assert l == {"s": 1, "v": F(3, 2), "t": F(3, 2)}
    assert c["v"] == F(2, 3)
    assert x[1] == 3 and x.get(2, 0) == 0


def test_conservation_violation_reported(right):
    extra = PiecewiseConstant.from_pieces([(2, 3, 1)])
    bad = _replace(right, f_in={2: right.f_in[2] + extra})
    ws = check_feasibility(bad).witnesses("flow_conservation")
    assert ws and ws[0].element == "v" and ws[0].theta >= 2


def test_outflow_floor_of_queued_arcs(right):
    assert check_epsilon(right).ok
    starved = _replace(right, f_out={1: PiecewiseConstant.from_pieces([(2, 7, 2)])})
    assert check_epsilon(starved).witnesses("queued_outflow_bound")


def test_epsilon_formula():
    assert epsilon_lower_bound(n1_network()) == F(1, 1000)
    assert not epsilon_is_loose(n1_network())
    assert epsilon_lower_bound(n1_network(2, lifted=True)) == F(1, 4 + 4 + 4) ** 3


def test_reduction_needs_its_preconditions(right):
    with pytest.raises(PreconditionNotMet):
        check_original_model_reduction(right.net, right)
    lifted = n1_network(2, lifted=True)
    assert check_original_model_reduction(lifted, compute_nash_flow(lifted)).ok


def test_ten_distinct_mutations():
    names = [m.name for m in MUTATIONS]
    assert len(names) == len(set(names)) == 10


def test_witness_serializes():
    rep = check_feasibility(MUTATIONS[0].build())
    d = rep.as_dict()
    assert d["ok"] is False
    w = d["checks"]["inflow_condition"]["witnesses"][0]
    assert w == {"condition": "inflow_condition", "element": "e2", "theta": "7", "lhs": "3",
                 "rhs": "2"}
