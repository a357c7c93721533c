"""Bundled example networks and random instance generators."""
from dataclasses import dataclass, replace
from fractions import Fraction
import random
from typing import Callable

from .dynamics import EquilibriumTrajectory, reconstruct_arc_flows
from .network import Network, make_network, validate_network
from .pwl import INF, PiecewiseConstant, PiecewiseLinear
from .thinflow import TFArc, ThinFlowInstance

F = Fraction


def n1_network(outflow_cap=1, storage=8, lifted=False):
    """Three-arc example s->v->t with a short, storage-limited arc and a long detour.

    ``outflow_cap`` is the outflow capacity of the short arc (1 or 2 in the
    two standard variants). ``lifted`` removes every storage limit and raises
    inflow capacities above everything that can arrive.
    """
    arcs = [
        dict(name="e1", tail="s", head="v", transit=1, storage="inf", cap_in=4, cap_out=3),
        dict(name="e2", tail="v", head="t", transit=1, storage=storage, cap_in=3,
             cap_out=outflow_cap),
        dict(name="e3", tail="v", head="t", transit=7, storage="inf", cap_in=3, cap_out=2),
    ]
    if lifted:
        for a in arcs:
            a["storage"] = "inf"
            a["cap_in"] = "auto"
    return make_network(["s", "v", "t"], arcs, "s", "t", 3)


def single_arc_network(transit=1, cap=1, rate=1):
    arcs = [dict(name="e1", tail="s", head="t", transit=transit, storage="inf",
                 cap_in=F(rate) + 1, cap_out=cap)]
    return make_network(["s", "t"], arcs, "s", "t", rate)


def random_network(rng, max_nodes=5, max_extra=5):
    """A random valid network: a spanning path plus extra arcs, some backwards.

    Capacities are small integers and most arcs off the source get finite
    storage only slightly above ``cap_in * transit`` so spillback is common.
    """
    while True:
        k = rng.randint(1, max_nodes - 2)
        nodes = ["s"] + [f"v{i}" for i in range(k)] + ["t"]
        arcs = []

        def arc(u, w, back=False):
            transit = rng.randint(1 if back else 0, 3)
            d = dict(tail=u, head=w, transit=transit, cap_out=rng.randint(1, 3))
            if u == "s":
                d["storage"] = "inf"
            else:
                d["cap_in"] = rng.randint(1, 4)
                if rng.random() < 0.8:
                    d["storage"] = d["cap_in"] * transit + rng.randint(1, 6)
            arcs.append(d)

        for u, w in zip(nodes, nodes[1:]):
            arc(u, w)
        for _ in range(rng.randint(1, max_extra)):
            i, j = sorted(rng.sample(range(len(nodes)), 2))
            if i > 0 and rng.random() < 0.2:
                arc(nodes[j], nodes[i], back=True)
            else:
                arc(nodes[i], nodes[j])
        net = make_network(nodes, arcs, "s", "t", rng.randint(2, 8))
        if not isinstance(validate_network(net), list):
            return net


def random_thin_flow_instance(rng, max_nodes=6, max_arcs=10):
    """Random acyclic thin-flow instance with rational capacities and bounds.

    Every node gets an arc from an earlier node, so all are reachable.
    """
    n = rng.randint(2, max_nodes)
    nodes = [f"n{i}" for i in range(n)]
    pairs = [(rng.randrange(i), i) for i in range(1, n)]
    for _ in range(rng.randint(0, max_arcs - len(pairs))):
        pairs.append(tuple(sorted(rng.sample(range(n), 2))))
    pairs = pairs[:max_arcs]

    def q():
        return F(rng.randint(1, 6), rng.randint(1, 3))

    arcs = tuple(TFArc(nodes[i], nodes[j], q(), q(), rng.random() < 0.35, f"a{k + 1}")
                 for k, (i, j) in enumerate(pairs))
    return ThinFlowInstance(tuple(nodes), arcs, nodes[0], nodes[-1], q())


def rng_for(seed):
    return random.Random(seed)


# mutation fixtures: deliberately broken trajectories, each paired with the
# check and condition that must report it

@dataclass(frozen=True)
class Mutation:
    name: str
    check: str          # feasibility | derived | nash | phase_derivatives
    condition: str
    description: str
    build: Callable


def _replace(traj, net=None, f_in=None, f_out=None, labels=None, phases=None):
    f_in_all = dict(traj.f_in)
    f_in_all.update(f_in or {})
    f_out_all = dict(traj.f_out)
    f_out_all.update(f_out or {})
    lab = dict(traj.labels)
    lab.update(labels or {})
    return EquilibriumTrajectory(net or traj.net, f_in_all, f_out_all, lab, traj.phase_starts,
                                 traj.end, traj.termination, traj.phases if phases is None else phases)


def _solved(outflow_cap):
    from .engine import compute_nash_flow
    return compute_nash_flow(n1_network(outflow_cap))


def _inflow_raised():
    tr = _solved(2)
    return _replace(tr, f_in={1: PiecewiseConstant.from_pieces([(1, INF, 3)])})


def _clock(offset):
    return PiecewiseLinear([0], [offset], 1)


def _full_cycle():
    arcs = [dict(name="e1", tail="s", head="a", transit=1, storage="inf", cap_in=3, cap_out=2),
            dict(name="e2", tail="a", head="b", transit=1, storage=2, cap_in=1, cap_out=1),
            dict(name="e3", tail="b", head="a", transit=1, storage=2, cap_in=1, cap_out=1),
            dict(name="e4", tail="b", head="t", transit=1, storage="inf", cap_in=3, cap_out=2)]
    net = make_network(["s", "a", "b", "t"], arcs, "s", "t", 2)
    fill = PiecewiseConstant.from_pieces([(0, 2, 1)])
    zero = PiecewiseConstant(0)
    f_in = {0: zero, 1: fill, 2: fill, 3: zero}
    f_out = {e: zero for e in range(4)}
    labels = {"s": _clock(0), "a": _clock(1), "b": _clock(2), "t": _clock(3)}
    return EquilibriumTrajectory(net, f_in, f_out, labels, [0], INF)


def _outflow_doubled():
    tr = _solved(1)
    return _replace(tr, f_out={1: tr.f_out[1].scale(2)})


def _rerouted():
    tr = _solved(1)
    first = tr.phases[0]
    bad = replace(first, x_prime={0: F(3), 1: F(2), 2: F(1)})
    return reconstruct_arc_flows(tr.net, (bad,) + tr.phases[1:], tr.termination)


def _label_slope_perturbed():
    tr = _solved(1)
    second = tr.phases[1]
    lp = dict(second.l_prime)
    lp["t"] = F(2)
    return reconstruct_arc_flows(tr.net, tr.phases[:1] + (replace(second, l_prime=lp),),
                                 tr.termination)


def _early_outflow():
    tr = _solved(1)
    return _replace(tr, f_out={1: tr.f_out[1].shift(-1)})


def _storage_overflow():
    tr = _solved(2)
    arcs = list(tr.net.arcs)
    arcs[1] = replace(arcs[1], storage=F(7))
    net = Network(tr.net.nodes, tuple(arcs), tr.net.source, tr.net.sink, tr.net.rate)
    return _replace(tr, net=net)


def _unfair_split():
    arcs = [dict(name="e1", tail="s", head="v", transit=1, storage="inf", cap_in=5, cap_out=2),
            dict(name="e2", tail="s", head="v", transit=2, storage="inf", cap_in=5, cap_out=2),
            dict(name="e3", tail="v", head="t", transit=1, storage="inf", cap_in=5, cap_out=2)]
    net = make_network(["s", "v", "t"], arcs, "s", "t", 4)
    two = PiecewiseConstant.from_pieces([(0, INF, 2)])
    f_in = {0: two, 1: two, 2: PiecewiseConstant.from_pieces([(1, INF, 2)])}
    f_out = {0: PiecewiseConstant.from_pieces([(1, INF, 2)]), 1: PiecewiseConstant(0),
             2: PiecewiseConstant.from_pieces([(2, INF, 2)])}
    labels = {"s": _clock(0), "v": _clock(1), "t": _clock(2)}
    return EquilibriumTrajectory(net, f_in, f_out, labels, [0], INF)


def _needless_throttle():
    tr = _solved(1)
    two = PiecewiseConstant.from_pieces([(1, INF, 2)])
    return _replace(tr, f_in={1: two, 2: PiecewiseConstant(0)}, f_out={0: two})


def _labels_shifted():
    tr = _solved(1)
    return _replace(tr, labels={"t": tr.labels["t"] + 1})


MUTATIONS = (
    Mutation("inflow_raised", "feasibility", "inflow_condition",
             "full short arc keeps taking inflow 3 above its bound 2", _inflow_raised),
    Mutation("full_cycle", "feasibility", "no_deadlock",
             "two opposite arcs fill up at the same time", _full_cycle),
    Mutation("outflow_doubled", "derived", "outflow_capacity",
             "short arc releases flow at twice its outflow capacity", _outflow_doubled),
    Mutation("rerouted", "nash", "flow_on_active_arcs",
             "part of the flow takes the long arc while it is not a shortest route", _rerouted),
    Mutation("label_slope_perturbed", "phase_derivatives", "bound_attained",
             "sink label grows at rate 2 in the open phase", _label_slope_perturbed),
    Mutation("early_outflow", "derived", "non_deficit",
             "outflow starts before the flow can have traversed the arc", _early_outflow),
    Mutation("storage_overflow", "derived", "storage",
             "storage of the short arc lowered below its equilibrium load", _storage_overflow),
    Mutation("unfair_split", "feasibility", "fair_allocation",
             "a merge serves one congested arc and starves the other", _unfair_split),
    Mutation("needless_throttle", "feasibility", "no_slack",
             "outflow of the first arc is throttled though nothing downstream blocks",
             _needless_throttle),
    Mutation("labels_shifted", "nash", "bellman_labels",
             "sink label one unit later than the earliest arrival", _labels_shifted),
)


def run_mutation_check(mutation, traj=None):
    """Run the check a mutation targets; return the report."""
    from . import validator
    traj = traj if traj is not None else mutation.build()
    if mutation.check == "feasibility":
        return validator.check_feasibility(traj)
    if mutation.check == "derived":
        return validator.check_derived_conditions(traj)
    if mutation.check == "nash":
        return validator.check_nash_condition(traj)
    if mutation.check == "phase_derivatives":
        return validator.check_phase_derivatives(traj)
    raise ValueError(mutation.check)
