"""Spillback thin flows: verification and an exact configuration search.

A thin flow on an acyclic active network is a static s-t flow ``x`` of value
``r`` with node labels ``l`` (label slopes) and spillback factors ``c`` such
that

* ``l[s] = 1 / c[s]``;
* at every other node, ``l[v]`` is the minimum of ``rho`` over the incoming
  arcs, and equals ``rho`` on every arc that carries flow;
* ``l[v] >= x[e] / b[e]`` for every outgoing arc (inflow bound ``b``), with
  equality for at least one arc whenever ``c[v] < 1``.

Substituting ``mu[v] = c[v] * l[v]`` turns every condition linear once the
branch of each ``max``/``min`` is fixed. The search fixes those branches node
by node in topological order and prunes with an exact LP.
"""
from dataclasses import dataclass
from fractions import Fraction
import itertools

from . import lp
from .errors import CycleFound, NoSolutionFound
from .network import topological_order
from .pwl import as_q

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class TFArc:
    tail: str
    head: str
    cap_out: Fraction
    inflow_bound: Fraction
    resetting: bool = False
    name: str = ""


@dataclass(frozen=True)
class ThinFlowInstance:
    nodes: tuple
    arcs: tuple
    source: str
    sink: str
    rate: Fraction

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("demand must be positive")
        names = set(self.nodes)
        for a in self.arcs:
            if a.tail not in names or a.head not in names:
                raise ValueError(f"arc {a.tail}->{a.head} has an unknown endpoint")
            if a.cap_out <= 0:
                raise ValueError(f"arc {a.tail}->{a.head}: outflow capacity must be positive")
            if a.inflow_bound < 0:
                raise ValueError(f"arc {a.tail}->{a.head}: negative inflow bound")
        try:
            order = topological_order(self.nodes, self.arcs)
        except CycleFound as exc:
            raise ValueError("active network has a cycle") from exc
        object.__setattr__(self, "order", tuple(order))
        seen = {self.source}
        for v in order:
            if v in seen:
                seen.update(a.head for a in self.arcs if a.tail == v)
        missing = [v for v in self.nodes if v not in seen]
        if missing:
            raise ValueError(f"nodes not reachable from the source: {missing}")

    def arc_name(self, i):
        return self.arcs[i].name or f"e{i + 1}"

    def in_arcs(self, v):
        return [i for i, a in enumerate(self.arcs) if a.head == v]

    def out_arcs(self, v):
        return [i for i, a in enumerate(self.arcs) if a.tail == v]


@dataclass(frozen=True)
class ThinFlowSolution:
    x: tuple            # per arc, same order as instance.arcs
    l: dict
    c: dict
    config: object = None

    def __eq__(self, other):
        return (isinstance(other, ThinFlowSolution) and self.x == other.x
                and self.l == other.l and self.c == other.c)

    def __hash__(self):
        return hash((self.x, tuple(sorted(self.l.items())), tuple(sorted(self.c.items()))))


def rho(l_tail, x, c_head, cap, resetting):
    """Label slope induced on the head by one incoming arc."""
    queue_term = as_q(x) / (as_q(c_head) * as_q(cap))
    if resetting:
        return queue_term
    return max(as_q(l_tail), queue_term)


@dataclass(frozen=True)
class Witness:
    condition: str
    element: str
    lhs: object
    rhs: object

    def as_dict(self):
        return {"condition": self.condition, "element": self.element,
                "lhs": str(self.lhs), "rhs": str(self.rhs)}


def verify_thin_flow(inst, sol):
    """Check every thin-flow condition exactly; return the list of violations."""
    bad = []
    x, l, c = sol.x, sol.l, sol.c
    for i, a in enumerate(inst.arcs):
        if x[i] < 0:
            bad.append(Witness("nonnegative_flow", inst.arc_name(i), x[i], 0))
    for v in inst.nodes:
        if l[v] < 0:
            bad.append(Witness("nonnegative_label", v, l[v], 0))
        if not 0 < c[v] <= 1:
            bad.append(Witness("factor_range", v, c[v], "(0,1]"))
    if bad:
        return bad
    for v in inst.nodes:
        if v == inst.sink:
            continue
        net = sum((x[i] for i in inst.out_arcs(v)), ZERO) - sum((x[i] for i in inst.in_arcs(v)), ZERO)
        want = inst.rate if v == inst.source else ZERO
        if net != want:
            bad.append(Witness("conservation", v, net, want))
    s = inst.source
    if l[s] != 1 / c[s]:
        bad.append(Witness("source_label", s, l[s], 1 / c[s]))
    for v in inst.nodes:
        ins = inst.in_arcs(v)
        if v != s and ins:
            rhos = {i: rho(l[inst.arcs[i].tail], x[i], c[v], inst.arcs[i].cap_out,
                           inst.arcs[i].resetting) for i in ins}
            low = min(rhos.values())
            if l[v] != low:
                bad.append(Witness("min_label", v, l[v], low))
            for i in ins:
                if x[i] > 0 and l[v] != rhos[i]:
                    bad.append(Witness("tight_label", inst.arc_name(i), l[v], rhos[i]))
        ratios = []
        for i in inst.out_arcs(v):
            b = inst.arcs[i].inflow_bound
            if b == 0:
                if x[i] > 0:
                    bad.append(Witness("inflow_bound", inst.arc_name(i), x[i], 0))
                continue
            ratios.append(x[i] / b)
            if l[v] < x[i] / b:
                bad.append(Witness("inflow_bound", inst.arc_name(i), l[v], x[i] / b))
        if c[v] < 1:
            top = max(ratios) if ratios else None
            if top is None or l[v] != top:
                bad.append(Witness("bound_attained", v, l[v], top))
    return bad


# configuration search

@dataclass(frozen=True)
class Configuration:
    """One branch choice for every node.

    ``mode[v]`` is "zero" (no flow reaches v, label slope 0) or "pos".
    ``state[e]`` is "R" for resetting arcs, "A" (queue term attains),
    "B" (tail label attains) or "C" (idle, x = 0), and "Z" into zero nodes.
    ``z[v] = 1`` means ``c[v] = 1``; otherwise ``attainer[v]`` is the outgoing
    arc whose inflow bound is tight.
    """
    mode: tuple
    state: tuple
    z: tuple
    attainer: tuple

    @property
    def w(self):
        return {i: int(s == "B") for i, s in enumerate(self.state) if s in "ABC"}

    @property
    def y(self):
        return {i: int(s in ("C", "Z")) for i, s in enumerate(self.state)}

    def throttled(self):
        return [v for v, zv in self.z if zv == 0]


class _Layout:
    def __init__(self, inst):
        self.inst = inst
        m, n = len(inst.arcs), len(inst.nodes)
        self.m, self.n = m, n
        self.pos = {v: i for i, v in enumerate(inst.nodes)}
        self.t_var = m + 2 * n
        self.size = m + 2 * n + 1

    def x(self, i):
        return i

    def l(self, v):
        return self.m + self.pos[v]

    def mu(self, v):
        return self.m + self.n + self.pos[v]


def _cut_arcs(inst):
    """Arcs lying on every s-t path (they must carry the whole demand)."""
    cut = set()
    for i in range(len(inst.arcs)):
        seen = {inst.source}
        stack = [inst.source]
        while stack:
            v = stack.pop()
            for j, a in enumerate(inst.arcs):
                if j != i and a.tail == v and a.head not in seen:
                    seen.add(a.head)
                    stack.append(a.head)
        if inst.sink not in seen:
            cut.add(i)
    return cut


def _node_options(inst, v, cut, allow_throttle):
    """Yield (z, attainer, mode, {arc: state}) for node ``v`` in canonical order."""
    ins = inst.in_arcs(v)
    resetting = [i for i in ins if inst.arcs[i].resetting]
    free = [i for i in ins if not inst.arcs[i].resetting]
    outs = [i for i in inst.out_arcs(v) if inst.arcs[i].inflow_bound > 0]
    # non-resetting arcs from one tail share a state: it only depends on
    # how the tail's label slope compares with v's
    tails = []
    for i in free:
        if inst.arcs[i].tail not in tails:
            tails.append(inst.arcs[i].tail)
    groups = [[i for i in free if inst.arcs[i].tail == u] for u in tails]
    choices = [("B", "A") if any(i in cut for i in g) else ("B", "A", "C") for g in groups]

    def pos_states():
        if v == inst.source:
            yield {}
            return
        for combo in itertools.product(*choices):
            if not resetting and all(s == "C" for s in combo):
                continue
            st = {i: "R" for i in resetting}
            for g, s in zip(groups, combo):
                st.update((i, s) for i in g)
            yield st

    for st in pos_states():
        yield 1, None, "pos", st
    can_zero = (resetting and v != inst.sink
                and not any(i in cut for i in ins))
    if can_zero:
        yield 1, None, "zero", {i: "Z" for i in ins}
    if allow_throttle:
        for e in outs:
            for st in pos_states():
                yield 0, e, "pos", st


def _node_rows(inst, lay, v, z, att, mode, st):
    rows = []
    x, l, mu = lay.x, lay.l, lay.mu
    if v != inst.sink:
        co = {}
        for i in inst.out_arcs(v):
            co[x(i)] = co.get(x(i), 0) + 1
        for i in inst.in_arcs(v):
            co[x(i)] = co.get(x(i), 0) - 1
        rows.append((co, "==", inst.rate if v == inst.source else 0))
    if v == inst.source:
        rows.append(({mu(v): 1}, "==", 1))
    if mode == "zero":
        rows.append(({l(v): 1}, "==", 0))
        rows.append(({mu(v): 1}, "==", 0))
        for i in inst.in_arcs(v):
            rows.append(({x(i): 1}, "==", 0))
    else:
        if z == 1:
            rows.append(({mu(v): 1, l(v): -1}, "==", 0))
        else:
            rows.append(({l(v): 1, mu(v): -1}, ">=", 0))
            rows.append(({l(v): inst.arcs[att].inflow_bound, x(att): -1}, "==", 0))
        for i, s in st.items():
            a = inst.arcs[i]
            if s in ("R", "A"):
                rows.append(({x(i): 1, mu(v): -a.cap_out}, "==", 0))
            if s == "A":
                rows.append(({l(v): 1, l(a.tail): -1}, ">=", 0))
            elif s == "B":
                rows.append(({l(v): 1, l(a.tail): -1}, "==", 0))
                rows.append(({mu(v): a.cap_out, x(i): -1}, ">=", 0))
            elif s == "C":
                rows.append(({x(i): 1}, "==", 0))
                rows.append(({l(a.tail): 1, l(v): -1}, ">=", 0))
    for i in inst.out_arcs(v):
        b = inst.arcs[i].inflow_bound
        rows.append(({l(v): b, x(i): -1} if b else {x(i): 1}, ">=" if b else "==", 0))
    return rows


def _search(inst, use_lp=True):
    """Yield (Configuration, point-or-None) in canonical order.

    With ``use_lp`` infeasible partial branches are pruned and only complete
    feasible configurations are yielded together with an LP point.
    """
    lay = _Layout(inst)
    order = list(inst.order)
    cut = _cut_arcs(inst)
    has_out = {v: any(inst.arcs[i].inflow_bound > 0 for i in inst.out_arcs(v)) for v in order}
    budget_nodes = [v for v in order if has_out[v]]
    # later deepening rounds revisit the same prefixes; keep their dictionaries
    memo = {}

    for k in range(len(budget_nodes) + 1):
        # nodes after position p that could still be throttled
        rest = [sum(1 for w in order[p:] if has_out[w]) for p in range(len(order) + 1)]

        def rec(p, rows, dic, used, picks, picks_key):
            if used + rest[p] < k:
                return
            if p == len(order):
                if used != k:
                    return
                cfg = _make_config(inst, picks)
                if not use_lp:
                    yield cfg, None
                    return
                pt = _leaf_point(inst, lay, rows, cfg)
                if pt is not None:
                    yield cfg, pt
                return
            v = order[p]
            for opt in _node_options(inst, v, cut, has_out[v] and used < k):
                z, att, mode, st = opt
                key = picks_key + ((z, att, mode, tuple(sorted(st.items()))),)
                new = _node_rows(inst, lay, v, z, att, mode, st)
                child = None
                if use_lp:
                    if key in memo:
                        child = memo[key]
                    else:
                        child = dic.copy()
                        if not child.add_rows(new):
                            child = None
                        memo[key] = child
                    if child is None:
                        continue
                yield from rec(p + 1, rows + new, child, used + (z == 0),
                               picks + [(v, z, att, mode, st)], key)

        start = [({lay.t_var: 1}, "==", 0)]
        root = lp.IncrementalLP(lay.size) if use_lp else None
        yield from rec(0, start, root, 0, [], ())


def _make_config(inst, picks):
    by = {v: (z, att, mode, st) for v, z, att, mode, st in picks}
    state = ["?"] * len(inst.arcs)
    for v, (_, _, _, st) in by.items():
        for i, s in st.items():
            state[i] = s
    return Configuration(
        mode=tuple((v, by[v][2]) for v in inst.nodes),
        state=tuple(state),
        z=tuple((v, by[v][0]) for v in inst.nodes),
        attainer=tuple((v, by[v][1]) for v in inst.nodes),
    )


def _leaf_point(inst, lay, rows, cfg):
    thr = cfg.throttled()
    if not thr:
        status, pt = lp.solve_lp(lay.size, rows)
        return pt if status == "optimal" else None
    # throttled nodes need 0 < mu < l strictly: maximise a common margin
    rows = [r for r in rows if r[0] != {lay.t_var: 1}]
    rows.append(({lay.t_var: 1}, "<=", 1))
    for v in thr:
        rows.append(({lay.mu(v): 1, lay.t_var: -1}, ">=", 0))
        rows.append(({lay.l(v): 1, lay.mu(v): -1, lay.t_var: -1}, ">=", 0))
    status, pt = lp.solve_lp(lay.size, rows, {lay.t_var: 1})
    if status != "optimal" or pt[lay.t_var] <= 0:
        return None
    return pt


def enumerate_configurations(inst):
    """All structurally consistent configurations, in the solver's order."""
    for cfg, _ in _search(inst, use_lp=False):
        yield cfg


def _to_solution(inst, lay, pt, cfg):
    x = tuple(pt[lay.x(i)] for i in range(len(inst.arcs)))
    l = {v: pt[lay.l(v)] for v in inst.nodes}
    z = dict(cfg.z)
    c = {}
    for v in inst.nodes:
        if z[v] == 0 and l[v] > 0:
            c[v] = pt[lay.mu(v)] / l[v]
        else:
            c[v] = ONE
    return ThinFlowSolution(x, l, c, cfg)


def solve_thin_flow(inst, all_solutions=False):
    """Return the first verified thin flow in canonical order.

    With ``all_solutions`` the full list of distinct verified solutions (one
    per feasible configuration) is returned instead.
    """
    lay = _Layout(inst)
    found = []
    for cfg, pt in _search(inst):
        sol = _to_solution(inst, lay, pt, cfg)
        if verify_thin_flow(inst, sol):
            continue
        if not all_solutions:
            return sol
        if sol not in found:
            found.append(sol)
    if found:
        return found
    raise NoSolutionFound("no configuration yields a thin flow", payload=inst)
