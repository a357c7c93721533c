"""Static network: arcs with transit time, storage and in/out capacities."""
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
import heapq

from .errors import CycleFound, NetworkInvalid
from .pwl import INF, as_q

AUTO = "auto"


@dataclass(frozen=True)
class ArcParams:
    tail: str
    head: str
    transit: Fraction
    storage: object  # Fraction or INF
    cap_in: Fraction
    cap_out: Fraction
    name: str = ""


@dataclass(frozen=True)
class Violation:
    rule: str
    element: str
    detail: str

    def __str__(self):
        return f"{self.rule} at {self.element}: {self.detail}"


@dataclass(frozen=True)
class Network:
    nodes: tuple
    arcs: tuple
    source: str
    sink: str
    rate: Fraction
    _out: dict = field(default=None, compare=False, repr=False)
    _in: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        out = {v: [] for v in self.nodes}
        inn = {v: [] for v in self.nodes}
        for i, a in enumerate(self.arcs):
            if a.tail in out:
                out[a.tail].append(i)
            if a.head in inn:
                inn[a.head].append(i)
        object.__setattr__(self, "_out", {v: tuple(x) for v, x in out.items()})
        object.__setattr__(self, "_in", {v: tuple(x) for v, x in inn.items()})

    def out_arcs(self, v):
        return self._out[v]

    def in_arcs(self, v):
        return self._in[v]

    def arc_name(self, i):
        return self.arcs[i].name or f"e{i + 1}"

    def arc_index(self, name):
        for i in range(len(self.arcs)):
            if self.arc_name(i) == name:
                return i
        raise KeyError(name)


class ValidatedNetwork(Network):
    """A Network that passed :func:`validate_network`."""


def make_network(nodes, arcs, source, sink, rate):
    """Build a Network from loose arc specs.

    ``arcs`` items are dicts with tail, head, transit, storage ("inf" or a
    number), cap_in ("auto" or a number), cap_out and optional name. An
    ``auto`` inflow capacity is one more than the total outflow capacity
    entering the tail (plus the network rate at the source), so the arc
    never restricts inflow.
    """
    rate = as_q(rate)
    nodes = tuple(nodes)
    raw = []
    for k, a in enumerate(arcs):
        storage = a.get("storage", INF)
        storage = INF if storage in ("inf", INF) else as_q(storage)
        raw.append(dict(tail=a["tail"], head=a["head"], transit=as_q(a["transit"]),
                        storage=storage, cap_in=a.get("cap_in", AUTO),
                        cap_out=as_q(a["cap_out"]), name=a.get("name") or f"e{k + 1}"))
    for a in raw:
        if a["cap_in"] == AUTO:
            total = sum((b["cap_out"] for b in raw if b["head"] == a["tail"]), Fraction(0))
            if a["tail"] == source:
                total += rate
            a["cap_in"] = total + 1
        else:
            a["cap_in"] = as_q(a["cap_in"])
    return Network(nodes, tuple(ArcParams(**a) for a in raw), source, sink, rate)


def topological_order(nodes, arcs):
    """Order ``nodes`` so every arc in ``arcs`` points forward.

    ``arcs`` is an iterable of objects with ``tail``/``head``. Ties are broken
    by the position in ``nodes`` so the result is deterministic. Raises
    CycleFound with the arcs of one cycle otherwise.
    """
    nodes = list(nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    arcs = list(arcs)
    indeg = {v: 0 for v in nodes}
    succ = {v: [] for v in nodes}
    for a in arcs:
        succ[a.tail].append(a)
        indeg[a.head] += 1
    heap = [pos[v] for v in nodes if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = nodes[heapq.heappop(heap)]
        order.append(v)
        for a in succ[v]:
            indeg[a.head] -= 1
            if indeg[a.head] == 0:
                heapq.heappush(heap, pos[a.head])
    if len(order) == len(nodes):
        return order
    raise CycleFound(_find_cycle([v for v in nodes if indeg[v] > 0], succ, indeg))


def _find_cycle(rest, succ, indeg):
    # every leftover node has an in-arc from another leftover node, so walking
    # backwards must eventually repeat
    left = set(rest)
    pred = {}
    for v in rest:
        for a in succ[v]:
            if a.head in left:
                pred.setdefault(a.head, a)
    v = rest[0]
    seen = {}
    path = []
    while v not in seen:
        seen[v] = len(path)
        a = pred[v]
        path.append(a)
        v = a.tail
    cyc = path[seen[v]:]
    cyc.reverse()
    return cyc


def validate_network(net):
    """Return a ValidatedNetwork, or the list of violations."""
    bad = []
    nodes = set(net.nodes)
    if net.rate <= 0:
        bad.append(Violation("NonpositiveRate", "network", f"rate {net.rate} must be > 0"))
    for v in (net.source, net.sink):
        if v not in nodes:
            bad.append(Violation("UnknownNode", str(v), "terminal is not a node"))
    if net.source == net.sink:
        bad.append(Violation("SourceIsSink", str(net.source), "source and sink coincide"))
    for i, a in enumerate(net.arcs):
        name = net.arc_name(i)
        if a.tail not in nodes or a.head not in nodes:
            bad.append(Violation("UnknownNode", name, f"endpoint of {a.tail}->{a.head} missing"))
            continue
        if a.tail == a.head:
            bad.append(Violation("SelfLoop", name, "arc is a loop"))
        if a.transit < 0:
            bad.append(Violation("NegativeTransit", name, f"transit {a.transit} < 0"))
        if a.cap_in <= 0 or a.cap_out <= 0:
            bad.append(Violation("NonpositiveCapacity", name,
                                 f"caps in={a.cap_in} out={a.cap_out} must be > 0"))
        if a.storage != INF:
            if a.storage <= 0:
                bad.append(Violation("StorageTooSmall", name, f"storage {a.storage} <= 0"))
            elif a.storage <= a.cap_in * a.transit:
                bad.append(Violation("StorageTooSmall", name,
                                     f"storage {a.storage} <= cap_in*transit = {a.cap_in * a.transit}"))
    if bad and any(v.rule == "UnknownNode" for v in bad):
        return bad
    for i in net.in_arcs(net.source):
        bad.append(Violation("SourceArcViolation", net.arc_name(i), "source has an incoming arc"))
    for i in net.out_arcs(net.source):
        a = net.arcs[i]
        if a.storage != INF:
            bad.append(Violation("SourceArcViolation", net.arc_name(i), "source arc has finite storage"))
        if a.cap_in <= net.rate:
            bad.append(Violation("SourceArcViolation", net.arc_name(i),
                                 f"cap_in {a.cap_in} <= rate {net.rate}"))
    reach = {net.source}
    todo = deque([net.source])
    while todo:
        v = todo.popleft()
        for i in net.out_arcs(v):
            w = net.arcs[i].head
            if w not in reach:
                reach.add(w)
                todo.append(w)
    for v in net.nodes:
        if v not in reach:
            bad.append(Violation("UnreachableNode", str(v), "not reachable from the source"))
    zero = [a for a in net.arcs if a.transit == 0 and a.tail != a.head]
    try:
        topological_order(net.nodes, zero)
    except CycleFound as exc:
        names = [net.arc_name(net.arcs.index(a)) for a in exc.cycle]
        bad.append(Violation("ZeroTransitCycle", ",".join(names), "cycle of zero transit time"))
    if bad:
        return bad
    if isinstance(net, ValidatedNetwork):
        return net
    return ValidatedNetwork(net.nodes, net.arcs, net.source, net.sink, net.rate)


def require_valid(net):
    res = validate_network(net)
    if isinstance(res, list):
        raise NetworkInvalid(res)
    return res


def _source_ok(net):
    if net.in_arcs(net.source):
        return False
    return all(net.arcs[i].storage == INF and net.arcs[i].cap_in > net.rate
               for i in net.out_arcs(net.source))


def add_super_source(net, rate=None):
    """Put a fresh source in front of ``net.source`` with one uncongestable arc.

    Networks that already meet the source conditions come back unchanged.
    """
    rate = net.rate if rate is None else as_q(rate)
    if rate <= 0:
        raise NetworkInvalid([Violation("NonpositiveCapacity", "super source arc",
                                        f"outflow capacity would be rate {rate}")])
    if rate == net.rate and _source_ok(net):
        return Network(net.nodes, net.arcs, net.source, net.sink, net.rate)
    new = "s*"
    while new in net.nodes:
        new += "*"
    taken = {net.arc_name(i) for i in range(len(net.arcs))}
    name = "e*"
    while name in taken:
        name += "*"
    arc = ArcParams(new, net.source, Fraction(0), INF, rate + 1, rate, name)
    arcs = tuple(a if a.name else replace(a, name=net.arc_name(i)) for i, a in enumerate(net.arcs))
    return Network((new,) + tuple(net.nodes), (arc,) + arcs, new, net.sink, rate)
