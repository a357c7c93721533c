"""Acceptance criteria, one test per criterion, all exact."""
from fractions import Fraction as F
import io as stdio
import random

import pytest

from nashflow import cli, io
from nashflow.dynamics import earliest_arrival, reconstruct_arc_flows
from nashflow.errors import NoSolutionFound
from nashflow.fixtures import MUTATIONS, n1_network, random_thin_flow_instance, run_mutation_check
from nashflow.pwl import INF
from nashflow.thinflow import solve_thin_flow, verify_thin_flow
from nashflow.validator import (
    check_derived_conditions, check_epsilon, check_feasibility, check_nash_condition,
    check_original_model_reduction, check_phase_derivatives, epsilon_lower_bound, source_samples,
    tables_for,
)


def rates(ph, net):
    l = tuple(ph.l_prime[v] for v in net.nodes)
    x = tuple(ph.x_prime.get(e, 0) for e in range(len(net.arcs)))
    return l, x


@pytest.mark.criterion(1, "N1-left: two phases, boundary 3, travel time 8")
def test_n1_left_phases(n1_left):
    tr, net = n1_left.traj, n1_left.net
    assert tr.termination == "SteadyState"
    assert [p.start for p in tr.phases] == [0, 3]
    assert tr.phases[0].alpha == 3 and tr.phases[1].alpha == INF
    assert rates(tr.phases[0], net) == ((1, 1, 3), (3, 3, 0))
    assert rates(tr.phases[1], net) == ((1, 1, 1), (3, 1, 2))
    lt = tr.labels["t"]
    assert lt.eval(3) == 11
    assert all(t <= 3 for t in lt.times) and lt.slope == 1
    for theta in (F(3), F(7, 2), F(10), F(1000)):
        assert lt.eval(theta) - theta == 8


@pytest.mark.criterion(2, "N1-right: e2 full at arc time 7, c_v = 2/3, slope 1/2")
def test_n1_right_phases(n1_right):
    tr, net = n1_right.traj, n1_right.net
    e2, e3 = net.arc_index("e2"), net.arc_index("e3")
    assert [p.start for p in tr.phases] == [0, 6]
    assert tr.labels["v"].eval(6) == 7
    d = tr.F_in[e2] - tr.F_out[e2]
    assert d.eval(7) == 8 and all(d.eval(t) < 8 for t in (F(1), F(4), F(69, 10)))
    ph = tr.phases[1]
    assert ph.spillback == frozenset({e2})
    assert ph.inflow_bound[e2] == 2
    assert ph.c["v"] == F(2, 3)
    assert all(e3 not in p.active for p in tr.phases)
    lt = tr.labels["t"]
    assert lt.slope == F(3, 2) and all(t <= 6 for t in lt.times)
    excess = [lt.eval(t) - t for t in (F(6), F(7), F(8), F(20))]
    assert excess == sorted(set(excess))
    assert excess[1] - excess[0] == F(1, 2)


@pytest.mark.criterion(3, "thin-flow solver output always verifies (200 instances)")
def test_thin_flow_solver_vs_verifier():
    rng = random.Random(3)
    failures = []
    for i in range(200):
        inst = random_thin_flow_instance(rng)
        try:
            sol = solve_thin_flow(inst)
        except NoSolutionFound as exc:
            failures.append((i, "no solution", str(exc)))
            continue
        viol = verify_thin_flow(inst, sol)
        if viol:
            failures.append((i, viol[:3]))
    assert failures == []


@pytest.mark.criterion(4, "every phase derivative is a spillback thin flow")
def test_phase_derivatives_everywhere(all_runs):
    bad = [(r.name, check_phase_derivatives(r.traj).witnesses()[:2]) for r in all_runs
           if not check_phase_derivatives(r.traj).ok]
    assert bad == []


def _prefixes(run):
    ph = run.traj.phases
    for k in range(1, len(ph) + 1):
        yield k, reconstruct_arc_flows(run.net, ph[:k])


@pytest.mark.criterion(5, "feasibility, derived and Nash checks after every commit (50 networks)")
def test_conditions_after_each_commit(corpus):
    bad = []
    for run in corpus:
        for k, tr in _prefixes(run):
            samples = source_samples(tr)
            tables = tables_for(tr, samples)
            for check in (check_feasibility, check_derived_conditions):
                rep = check(tr, samples, tables=tables)
                if not rep.ok:
                    bad.append((run.name, k, check.__name__, rep.witnesses()[:2]))
            rep = check_nash_condition(tr, samples)
            if not rep.ok:
                bad.append((run.name, k, "nash", rep.witnesses()[:2]))
            for t in tr.phase_starts:
                if earliest_arrival(tr, t) != tr.labels_at(t):
                    bad.append((run.name, k, "bellman", t))
    assert bad == []
    assert sum(len(r.traj.phases) for r in corpus) > len(corpus)


@pytest.mark.criterion(6, "alpha positive and maximal at every phase")
def test_alpha_positive_and_maximal(all_runs):
    for run in all_runs:
        assert run.alphas and all(a > 0 for a in run.alphas), run.name
        for phi, at, beyond in run.maximal:
            assert at and not beyond, (run.name, phi)
    assert sum(len(r.maximal) for r in all_runs) > 0


@pytest.mark.criterion(7, "without spillback N1 reduces to the queueing model")
def test_reduction(n1_left, n1_lifted):
    for run in n1_lifted:
        assert check_original_model_reduction(run.net, run.traj).ok, run.name
        for ph in run.traj.phases:
            assert set(ph.c.values()) == {1}
            assert not ph.spillback
    lifted = n1_lifted[0].traj
    assert [p.start for p in lifted.phases] == [p.start for p in n1_left.traj.phases]
    for a, b in zip(lifted.phases, n1_left.traj.phases):
        assert (a.alpha, a.l_prime, a.x_prime) == (b.alpha, b.l_prime, b.x_prime)


@pytest.mark.criterion(8, "queued outflow bound, 1/1000 on N1, holds on every run")
def test_epsilon_bound(all_runs):
    assert epsilon_lower_bound(n1_network(1)) == F(1, 1000)
    assert epsilon_lower_bound(n1_network(2)) == F(1, 1000)
    bad = [(r.name, check_epsilon(r.traj).witnesses()[:2]) for r in all_runs
           if not check_epsilon(r.traj).ok]
    assert bad == []


@pytest.mark.criterion(9, "each mutation is caught by its check")
@pytest.mark.parametrize("mutation", MUTATIONS, ids=[m.name for m in MUTATIONS])
def test_mutations_detected(mutation):
    rep = run_mutation_check(mutation)
    hits = [w for w in rep.witnesses() if w.condition == mutation.condition]
    assert hits, f"{mutation.name}: no {mutation.condition} witness"


@pytest.mark.criterion(10, "solve output is deterministic; trajectories round-trip")
def test_determinism_and_round_trip(tmp_path, all_runs):
    net_path = tmp_path / "n1.json"
    io.write_json(net_path, io.network_to_json(n1_network(2)))
    outs = []
    for k in range(2):
        buf = stdio.StringIO()
        path = tmp_path / f"run{k}.json"
        assert cli.main(["solve", str(net_path), "--out", str(path)], out=buf) == 0
        outs.append((path.read_bytes(), buf.getvalue()))
    assert outs[0] == outs[1]
    for run in all_runs:
        doc = io.trajectory_to_json(run.traj)
        back = io.trajectory_from_json(io.load_json_text(io.dumps(doc)))
        assert io.dumps(io.trajectory_to_json(back)) == io.dumps(doc), run.name
        assert back.phases == run.traj.phases
        for e in range(len(run.net.arcs)):
            assert back.f_in[e] == run.traj.f_in[e] and back.f_out[e] == run.traj.f_out[e]
        assert back.labels == run.traj.labels
