"""Phase-by-phase construction of a Nash flow over time with spillback.

Each step classifies arcs at the current source time ``phi``, solves a
thin flow on the active subnetwork, and extends labels and the underlying
static flow linearly for the longest step over which the classification
(and with it the thin flow) stays valid.

The step length is the minimum of four bound families:

* queued arcs: the label gap ``l_v - l_u - transit`` must stay nonnegative;
* inactive arcs: the same gap must stay negative;
* full arcs: the inflow bound seen by entering particles must stay constant;
* other active arcs with finite storage: the load must stay below storage.

The last two are evaluated on a provisional trajectory in which the
candidate phase runs forever.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import logging

from .dynamics import (PhaseProfile, classify_arcs, inflow_bound, reconstruct_arc_flows)
from .errors import EngineBug, NonpositiveAlpha
from .network import require_valid
from .pwl import INF, as_q
from .thinflow import TFArc, ThinFlowInstance, ThinFlowSolution, solve_thin_flow, verify_thin_flow

log = logging.getLogger(__name__)
ZERO = Fraction(0)


@dataclass(frozen=True)
class TerminationPolicy:
    phase_cap: int = 1000
    horizon: object = INF
    alpha_min: Fraction = Fraction(1, 10 ** 9)
    repeat_count: int = 50
    check_alpha: bool = True     # assert the step is feasible and maximal

    def __post_init__(self):
        if self.phase_cap < 1:
            raise ValueError("phase_cap must be at least 1")
        if self.horizon != INF:
            object.__setattr__(self, "horizon", as_q(self.horizon))
            if self.horizon <= 0:
                raise ValueError("horizon must be positive")


@dataclass(frozen=True)
class EngineState:
    net: object
    phases: tuple
    phi: object
    labels: dict
    x: dict
    active: frozenset
    resetting: frozenset
    spillback: frozenset
    inflow_bound: dict
    traj: object = field(repr=False, default=None)


@dataclass(frozen=True)
class ArcRates:
    """A thin flow lifted to the whole network (zero on inactive arcs)."""
    x: dict
    l: dict
    c: dict


def state_from_phases(net, phases=()):
    traj = reconstruct_arc_flows(net, phases)
    phi = traj.end
    if phi == INF:
        raise EngineBug("cannot extend past an open final phase")
    labels = traj.labels_at(phi)
    act, res, full = classify_arcs(traj, phi, labels)
    x = {e: traj.F_in[e].eval(labels[a.tail]) for e, a in enumerate(net.arcs)}
    bounds = {e: inflow_bound(traj, e, labels[net.arcs[e].tail]) for e in sorted(act)}
    return EngineState(net, tuple(phases), phi, labels, x, act, res, full, bounds, traj)


def initial_state(net):
    return state_from_phases(require_valid(net))


def thin_flow_instance(state):
    """The thin-flow problem on the active subnetwork at ``state.phi``."""
    net = state.net
    arcs = []
    index = []
    for e in sorted(state.active):
        a = net.arcs[e]
        arcs.append(TFArc(a.tail, a.head, a.cap_out, state.inflow_bound[e],
                          e in state.resetting, net.arc_name(e)))
        index.append(e)
    inst = ThinFlowInstance(tuple(net.nodes), tuple(arcs), net.source, net.sink, net.rate)
    return inst, index


def lift(state, inst, index, sol):
    x = {e: ZERO for e in range(len(state.net.arcs))}
    for k, e in enumerate(index):
        x[e] = sol.x[k]
    return ArcRates(x, dict(sol.l), dict(sol.c))


def solve_phase(state):
    inst, index = thin_flow_instance(state)
    return lift(state, inst, index, solve_thin_flow(inst))


def _provisional(state, tf):
    ph = _profile(state, tf, INF)
    return reconstruct_arc_flows(state.net, state.phases + (ph,))


def _profile(state, tf, alpha):
    return PhaseProfile(state.phi, alpha, dict(tf.x), dict(tf.l), dict(tf.c),
                        state.active, state.resetting, state.spillback,
                        dict(state.inflow_bound))


def _load(traj, e):
    return traj.F_in[e] - traj.F_out[e]


def _bound_points(traj, e, start):
    """Arc times after ``start`` where the inflow bound of ``e`` may change."""
    a = traj.net.arcs[e]
    d = _load(traj, e)
    pts = set(traj.f_out[e].times) | set(d.times) | set(d.level_times(a.storage))
    return sorted(p for p in pts if p > start)


def _constancy_end(traj, e, start, value):
    """Sup of arc times ``t`` with the inflow bound equal to ``value`` on [start, t)."""
    prev = start
    for p in _bound_points(traj, e, start) + [None]:
        if prev != start and inflow_bound(traj, e, prev, strict=False) != value:
            return prev
        mid = prev + 1 if p is None else (prev + p) / 2
        if inflow_bound(traj, e, mid, strict=False) != value:
            return prev
        if p is None:
            return INF
        prev = p


def _checked_instance(state, overrides):
    inst, index = thin_flow_instance(state)
    pos = {e: k for k, e in enumerate(index)}
    arcs = list(inst.arcs)
    for e, b in overrides.items():
        arcs[pos[e]] = TFArc(arcs[pos[e]].tail, arcs[pos[e]].head, arcs[pos[e]].cap_out, b,
                             arcs[pos[e]].resetting, arcs[pos[e]].name)
    return ThinFlowInstance(inst.nodes, tuple(arcs), inst.source, inst.sink, inst.rate), index


def _storage_family(state, tf, traj):
    """Split finite-storage active arcs into storage-bound and bound-constancy arcs.

    A full arc whose load drops right away is handled like a non-full arc,
    provided the thin flow is still valid with the unrestricted bound.
    """
    net = state.net
    constant, storage = [], []
    released = {}
    for e in sorted(state.active):
        a = net.arcs[e]
        if a.storage == INF:
            continue
        if e not in state.spillback:
            storage.append(e)
            continue
        if tf.l[a.tail] == 0:
            constant.append(e)
            continue
        t0 = state.labels[a.tail]
        if _constancy_end(traj, e, t0, state.inflow_bound[e]) > t0:
            constant.append(e)
            continue
        released[e] = a.cap_in
        storage.append(e)
    if released:
        inst, index = _checked_instance(state, released)
        sol_x = tuple(tf.x[e] for e in index)
        if verify_thin_flow(inst, ThinFlowSolution(sol_x, tf.l, tf.c)):
            raise NonpositiveAlpha("full arc changes its inflow bound immediately",
                                   payload=sorted(net.arc_name(e) for e in released))
    return constant, storage, frozenset(released)


def _storage_hit(d, storage, t0, released):
    """First arc time from ``t0`` at which the load reaches storage.

    A released arc starts at storage and drops, so the search starts at the
    next breakpoint of the load.
    """
    if released:
        nxt = [p for p in d.times if p > t0]
        if not nxt:
            return None
        t0 = nxt[0]
    return d.first_crossing(storage, t0)


def _gap(state, e):
    a = state.net.arcs[e]
    return state.labels[a.head] - state.labels[a.tail] - a.transit


def max_feasible_alpha(state, tf, traj=None):
    """Largest step over which the thin flow ``tf`` stays valid (INF if none binds)."""
    net = state.net
    L, lp = state.labels, tf.l
    traj = traj or _provisional(state, tf)
    best = INF
    for e, a in enumerate(net.arcs):
        du, dv = lp[a.tail], lp[a.head]
        if e in state.resetting and dv < du:
            best = min(best, _gap(state, e) / (du - dv))
        elif e not in state.active and dv > du:
            best = min(best, -_gap(state, e) / (dv - du))
    constant, storage, released = _storage_family(state, tf, traj)
    for e in constant:
        a = net.arcs[e]
        if lp[a.tail] == 0:
            continue
        t0 = L[a.tail]
        end = _constancy_end(traj, e, t0, state.inflow_bound[e])
        if end != INF:
            best = min(best, (end - t0) / lp[a.tail])
    for e in storage:
        a = net.arcs[e]
        if lp[a.tail] == 0:
            continue
        t0 = L[a.tail]
        hit = _storage_hit(_load(traj, e), a.storage, t0, e in released)
        if hit is not None:
            best = min(best, (hit - t0) / lp[a.tail])
    if best <= 0:
        raise NonpositiveAlpha(f"step bound {best} at phase start {state.phi}",
                               payload=(state.phi, tf))
    return best


def alpha_is_feasible(state, tf, alpha, traj=None):
    """Direct check that extending by ``alpha`` keeps every bound family valid."""
    net = state.net
    alpha = as_q(alpha)
    L, lp = state.labels, tf.l
    traj = traj or _provisional(state, tf)
    for e, a in enumerate(net.arcs):
        gap = _gap(state, e) + alpha * (lp[a.head] - lp[a.tail])
        if e in state.resetting and gap < 0:
            return False
        if e not in state.active and gap > 0:
            return False
    constant, storage, released = _storage_family(state, tf, traj)
    for e in constant:
        a = net.arcs[e]
        t0 = L[a.tail]
        t1 = t0 + alpha * lp[a.tail]
        pts = [t0] + [p for p in _bound_points(traj, e, t0) if p < t1] + [t1]
        probes = pts[:-1] + [(p + q) / 2 for p, q in zip(pts, pts[1:])]
        if any(inflow_bound(traj, e, p, strict=False) != state.inflow_bound[e] for p in probes):
            return False
    for e in storage:
        a = net.arcs[e]
        t0 = L[a.tail]
        t1 = t0 + alpha * lp[a.tail]
        d = _load(traj, e)
        if t1 == t0:
            continue
        pts = ([] if e in released else [t0]) + [p for p in d.times if t0 < p < t1]
        if any(d.eval(p) >= a.storage for p in pts) or d.eval(t1) > a.storage:
            return False
    return True


def detect_steady_state(state, tf):
    return max_feasible_alpha(state, tf) == INF


def apply_extension(state, tf, alpha):
    if alpha != INF and not alpha > 0:
        raise ValueError(f"step length must be positive, got {alpha}")
    ph = _profile(state, tf, alpha)
    if alpha == INF:
        raise ValueError("an open phase ends the construction; use compute_nash_flow")
    return state_from_phases(state.net, state.phases + (ph,))


def compute_nash_flow(net, policy=None, observer=None):
    """Run the extension loop until a termination rule fires.

    ``observer(state, rates, alpha)`` is called for each phase before it is
    committed; ``alpha`` is the maximal step (before horizon clipping).
    """
    policy = policy or TerminationPolicy()
    state = initial_state(net)
    short = 0
    while True:
        if len(state.phases) >= policy.phase_cap:
            reason = "PhaseCap"
            break
        tf = solve_phase(state)
        traj = _provisional(state, tf)
        alpha = max_feasible_alpha(state, tf, traj)
        if policy.check_alpha and alpha != INF:
            if not alpha_is_feasible(state, tf, alpha, traj):
                raise EngineBug(f"step {alpha} at {state.phi} fails its own bounds")
            if alpha_is_feasible(state, tf, alpha + alpha / 1000, traj):
                raise EngineBug(f"step {alpha} at {state.phi} is not maximal")
        if observer is not None:
            observer(state, tf, alpha)
        log.debug("phase %d at %s: alpha=%s", len(state.phases), state.phi, alpha)
        if alpha == INF:
            phases = state.phases + (_profile(state, tf, INF),)
            reason = "SteadyState"
            break
        if policy.horizon != INF and state.phi + alpha >= policy.horizon:
            phases = state.phases + (_profile(state, tf, policy.horizon - state.phi),)
            reason = "Horizon"
            break
        state = apply_extension(state, tf, alpha)
        short = short + 1 if alpha < policy.alpha_min else 0
        if short >= policy.repeat_count:
            reason = "StalledProgress"
            break
    if reason in ("PhaseCap", "StalledProgress"):
        phases = state.phases
    return reconstruct_arc_flows(state.net, phases, reason)
