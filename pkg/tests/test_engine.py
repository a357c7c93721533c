from fractions import Fraction as F

import pytest

from nashflow.engine import (TerminationPolicy, alpha_is_feasible, compute_nash_flow,
                             initial_state, max_feasible_alpha, solve_phase, thin_flow_instance)
from nashflow.errors import NetworkInvalid
from nashflow.fixtures import n1_network, random_network, rng_for, single_arc_network
from nashflow.network import make_network
from nashflow.pwl import INF


def test_initial_thin_flow_instance_uses_active_arcs():
    state = initial_state(n1_network())
    inst, index = thin_flow_instance(state)
    assert [inst.arc_name(i) for i in range(len(inst.arcs))] == ["e1", "e2"]
    assert not any(a.resetting for a in inst.arcs)


@pytest.mark.parametrize("cap, first", [(1, 3), (2, 6)])
def test_first_step_length(cap, first):
    state = initial_state(n1_network(cap))
    tf = solve_phase(state)
    alpha = max_feasible_alpha(state, tf)
    assert alpha == first
    assert alpha_is_feasible(state, tf, alpha)
    assert not alpha_is_feasible(state, tf, alpha + F(1, 1000))


def test_single_arc_reaches_steady_state_at_once():
    tr = compute_nash_flow(single_arc_network(transit=2, cap=1, rate=3))
    assert tr.termination == "SteadyState" and len(tr.phases) == 1
    assert tr.labels["t"].eval(4) == 2 + 4 * 3


def test_horizon_clips_last_phase():
    tr = compute_nash_flow(n1_network(1), TerminationPolicy(horizon=F(2)))
    assert tr.termination == "Horizon"
    assert tr.end == 2 and len(tr.phases) == 1 and tr.phases[0].alpha == 2


def test_phase_cap():
    tr = compute_nash_flow(n1_network(1), TerminationPolicy(phase_cap=1))
    assert tr.termination == "PhaseCap" and len(tr.phases) == 1 and tr.end == 3


def test_stall_guard():
    tr = compute_nash_flow(n1_network(1), TerminationPolicy(alpha_min=F(10), repeat_count=1))
    assert tr.termination == "StalledProgress" and tr.end == 3


def test_invalid_network_is_refused():
    net = make_network(["s", "t"], [dict(tail="s", head="t", transit=1, cap_out=0)], "s", "t", 1)
    with pytest.raises(NetworkInvalid):
        compute_nash_flow(net)


def test_observer_sees_every_phase():
    seen = []
    tr = compute_nash_flow(n1_network(2), observer=lambda st, tf, a: seen.append((st.phi, a)))
    assert seen == [(0, 6), (6, INF)]
    assert [p.start for p in tr.phases] == [0, 6]


def test_random_networks_are_deterministic():
    a = [compute_nash_flow(random_network(rng_for(5))) for _ in range(2)]
    assert a[0].phases == a[1].phases and a[0].labels == a[1].labels
