"""Arc-level flow dynamics reconstructed from a list of thin-flow phases.

Every time-indexed quantity (in/outflow rates, cumulative flows, queues,
loads, waiting and exit times, earliest arrival labels) is derived from the
phases; nothing else is stored.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import heapq

from .errors import ClassificationMismatch, DemandExceedsSupply, InconsistentPhases, UnboundedWait
from .pwl import INF, PiecewiseConstant, PiecewiseLinear, as_q

ZERO = Fraction(0)


@dataclass(frozen=True)
class PhaseProfile:
    start: Fraction
    alpha: object               # phase length, INF for a final open phase
    x_prime: dict               # arc index -> rate
    l_prime: dict               # node -> slope
    c: dict                     # node -> spillback factor
    active: frozenset = frozenset()
    resetting: frozenset = frozenset()
    spillback: frozenset = frozenset()
    inflow_bound: dict = field(default_factory=dict)

    @property
    def end(self):
        return INF if self.alpha == INF else self.start + self.alpha


def transit_labels(net):
    """Earliest arrival labels on the empty network (shortest transit times)."""
    dist = {net.source: ZERO}
    heap = [(ZERO, 0, net.source)]
    order = {v: i for i, v in enumerate(net.nodes)}
    done = set()
    while heap:
        d, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for i in net.out_arcs(u):
            a = net.arcs[i]
            nd = d + a.transit
            if a.head not in dist or nd < dist[a.head]:
                dist[a.head] = nd
                heapq.heappush(heap, (nd, order[a.head], a.head))
    return dist


class EquilibriumTrajectory:
    """Arc flow functions plus earliest-arrival labels.

    The flow is committed on source times ``[0, end)``: ``f_in[e]`` is
    meaningful on ``[0, l_u(end))`` and ``f_out[e]`` on ``[0, l_v(end))``.
    Both are zero outside. ``phases`` is empty for trajectories built
    directly from function data.
    """

    def __init__(self, net, f_in, f_out, labels, phase_starts, end,
                 termination=None, phases=()):
        self.net = net
        self.f_in = dict(f_in)
        self.f_out = dict(f_out)
        self.labels = dict(labels)
        self.phase_starts = tuple(as_q(p) for p in phase_starts)
        self.end = end if end == INF else as_q(end)
        self.termination = termination
        self.phases = tuple(phases)
        self.F_in = {e: f.integral() for e, f in self.f_in.items()}
        self.F_out = {e: f.integral() for e, f in self.f_out.items()}

    def x(self, e):
        """Underlying static flow ``x_e(θ) = F⁺_e(l_u(θ))`` as a function."""
        return self.F_in[e].compose(self.labels[self.net.arcs[e].tail])

    def labels_at(self, theta):
        return {v: self.labels[v].eval(theta) for v in self.net.nodes}

    def arc_horizon(self, e, side="out"):
        """Arc time up to which ``f_in``/``f_out`` of ``e`` are committed."""
        a = self.net.arcs[e]
        node = a.head if side == "out" else a.tail
        if self.end == INF:
            return INF
        return self.labels[node].eval(self.end)


def reconstruct_arc_flows(net, phases, termination=None):
    """Turn a phase list into an EquilibriumTrajectory."""
    phases = list(phases)
    l0 = transit_labels(net)
    if len(l0) != len(net.nodes):
        raise InconsistentPhases("network has nodes unreachable from the source")
    cur_l = dict(l0)
    phi = ZERO
    pieces_in = {e: [] for e in range(len(net.arcs))}
    pieces_out = {e: [] for e in range(len(net.arcs))}
    lab_pts = {v: ([], []) for v in net.nodes}
    for k, ph in enumerate(phases):
        if ph.start != phi:
            raise InconsistentPhases(f"phase {k} starts at {ph.start}, expected {phi}")
        if ph.alpha != INF and ph.alpha <= 0:
            raise InconsistentPhases(f"phase {k} has nonpositive length {ph.alpha}")
        if ph.alpha == INF and k != len(phases) - 1:
            raise InconsistentPhases(f"open phase {k} is not the last one")
        for v in net.nodes:
            if ph.l_prime[v] < 0:
                raise InconsistentPhases(f"label of {v} decreases in phase {k}")
            lab_pts[v][0].append(phi)
            lab_pts[v][1].append(cur_l[v])
        new_l = {}
        for v in net.nodes:
            new_l[v] = INF if ph.alpha == INF else cur_l[v] + ph.alpha * ph.l_prime[v]
        for e, a in enumerate(net.arcs):
            xp = ph.x_prime.get(e, ZERO)
            if xp == 0:
                continue
            lu, lv = ph.l_prime[a.tail], ph.l_prime[a.head]
            if lu == 0 or lv == 0:
                raise InconsistentPhases(f"arc {net.arc_name(e)} carries flow with a flat label")
            pieces_in[e].append((cur_l[a.tail], new_l[a.tail], xp / lu))
            pieces_out[e].append((cur_l[a.head], new_l[a.head], xp / lv))
        if ph.alpha != INF:
            cur_l = new_l
            phi = phi + ph.alpha
        else:
            phi = INF
    end = phi
    last = phases[-1] if phases else None
    labels = {}
    for v in net.nodes:
        ts, vs = lab_pts[v]
        slope = last.l_prime[v] if last else ZERO
        if end != INF and phases:
            ts, vs = ts + [end], vs + [cur_l[v]]
        labels[v] = PiecewiseLinear(ts or [0], vs or [cur_l[v]], slope)
    try:
        f_in = {e: PiecewiseConstant.from_pieces(p) for e, p in pieces_in.items()}
        f_out = {e: PiecewiseConstant.from_pieces(p) for e, p in pieces_out.items()}
    except ValueError as exc:
        raise InconsistentPhases(str(exc)) from exc
    return EquilibriumTrajectory(net, f_in, f_out, labels, [p.start for p in phases],
                                 end, termination, phases)


# pointwise quantities

def queue_length(traj, e, theta):
    a = traj.net.arcs[e]
    theta = as_q(theta)
    return traj.F_in[e].eval(theta - a.transit) - traj.F_out[e].eval(theta)


def arc_load(traj, e, theta):
    return traj.F_in[e].eval(theta) - traj.F_out[e].eval(theta)


def inflow_bound(traj, e, theta, strict=True):
    """Admissible inflow rate at arc time ``theta``.

    A load above storage is unreachable for a feasible flow; with ``strict``
    it raises instead of being treated as full.
    """
    a = traj.net.arcs[e]
    if a.storage == INF:
        return a.cap_in
    d = arc_load(traj, e, theta)
    if d > a.storage and strict:
        raise ClassificationMismatch(f"arc {traj.net.arc_name(e)} overfull at {theta}: {d}")
    if d >= a.storage:
        return min(traj.f_out[e].eval(theta), a.cap_in)
    return a.cap_in


def push_rate(traj, e, theta):
    a = traj.net.arcs[e]
    theta = as_q(theta)
    if theta < a.transit:
        return ZERO
    if queue_length(traj, e, theta) > 0:
        return a.cap_out
    return min(traj.f_in[e].eval(theta - a.transit), a.cap_out)


def waiting_time(traj, e, theta):
    """Time a particle entering at ``theta`` spends in the queue."""
    a = traj.net.arcs[e]
    theta = as_q(theta)
    target = traj.F_in[e].eval(theta)
    reach = theta + a.transit
    hit = traj.F_out[e].first_crossing(target, reach)
    if hit is None:
        raise UnboundedWait(f"outflow of {traj.net.arc_name(e)} never reaches {target}",
                            payload=(e, theta))
    return hit - reach


def exit_time(traj, e, theta):
    theta = as_q(theta)
    return theta + traj.net.arcs[e].transit + waiting_time(traj, e, theta)


def earliest_arrival(traj, theta):
    """Bellman labels at source time ``theta`` by time-dependent Dijkstra."""
    net = traj.net
    theta = as_q(theta)
    order = {v: i for i, v in enumerate(net.nodes)}
    best = {net.source: theta}
    heap = [(theta, 0, net.source)]
    done = set()
    while heap:
        t, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for i in net.out_arcs(u):
            w = net.arcs[i].head
            if w in done:
                continue
            cand = exit_time(traj, i, t)
            if w not in best or cand < best[w]:
                best[w] = cand
                heapq.heappush(heap, (cand, order[w], w))
    return best


def classify_arcs(traj, theta, labels=None):
    """Active, resetting and spillback arcs at source time ``theta``.

    Two characterisations are compared: from label gaps alone and from the
    definitions through exit times, waiting times and loads. Any
    disagreement raises ClassificationMismatch.
    """
    net = traj.net
    L = labels if labels is not None else traj.labels_at(theta)
    act_lab, res_lab, act_def, res_def, full = set(), set(), set(), set(), set()
    for e, a in enumerate(net.arcs):
        lu, lv = L[a.tail], L[a.head]
        gap = lv - lu - a.transit
        if gap >= 0:
            act_lab.add(e)
        if gap > 0:
            res_lab.add(e)
        q = waiting_time(traj, e, lu)
        if lv == lu + a.transit + q:
            act_def.add(e)
        if q > 0:
            res_def.add(e)
        if a.storage != INF and arc_load(traj, e, lu) == a.storage:
            full.add(e)
    if act_lab != act_def or res_lab != res_def:
        raise ClassificationMismatch(
            f"arc classes disagree at {theta}: active {sorted(act_lab)} vs {sorted(act_def)}, "
            f"queued {sorted(res_lab)} vs {sorted(res_def)}")
    if not full <= act_def:
        raise ClassificationMismatch(f"full but inactive arcs at {theta}: {sorted(full - act_def)}")
    return frozenset(act_def), frozenset(res_def), frozenset(full)


def node_spillback_factor(push, demand, caps):
    """Largest ``c`` in (0, 1] with ``sum(min(push_e, c * cap_e)) == demand``.

    Returns ``(c, outflows)``.
    """
    push = [as_q(b) for b in push]
    caps = [as_q(v) for v in caps]
    demand = as_q(demand)
    total = sum(push, ZERO)
    if demand > total:
        raise DemandExceedsSupply(f"outflow {demand} exceeds push {total}")
    if demand == 0:
        if total == 0:
            return Fraction(1), [ZERO] * len(push)
        raise DemandExceedsSupply("positive push with zero outflow admits no factor")

    def h(c):
        return sum((min(b, c * v) for b, v in zip(push, caps)), ZERO)

    if h(1) < demand:
        raise DemandExceedsSupply(f"capacities admit only {h(1)} < {demand}")
    if h(1) == demand:
        c = Fraction(1)
    else:
        kinks = sorted({b / v for b, v in zip(push, caps) if 0 < b / v < 1}) + [Fraction(1)]
        prev = ZERO
        c = None
        for k in kinks:
            if h(k) >= demand:
                slope = sum((v for b, v in zip(push, caps) if b / v >= k), ZERO)
                c = prev + (demand - h(prev)) / slope
                break
            prev = k
    return c, [min(b, c * v) for b, v in zip(push, caps)]
