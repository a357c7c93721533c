"""JSON formats for networks, thin-flow instances, trajectories and reports.

Rationals are written as ``"p/q"`` strings (plain integers when the
denominator is 1); ``"inf"`` marks unbounded storage or an open final phase.
Floats are rejected on input.
"""
from fractions import Fraction
import json

from .dynamics import EquilibriumTrajectory, PhaseProfile
from .errors import ParseError
from .network import AUTO, make_network
from .pwl import INF, PiecewiseConstant, PiecewiseLinear
from .thinflow import TFArc, ThinFlowInstance

TRAJECTORY_FORMAT = "nashflow-trajectory"
TRAJECTORY_VERSION = 1


def q_to_json(x):
    if x == INF:
        return "inf"
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def q_from_json(v, what="number", allow_inf=False):
    if isinstance(v, bool) or isinstance(v, float):
        raise ParseError(f"{what}: {v!r} is not an exact rational")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        s = v.strip()
        if allow_inf and s == "inf":
            return INF
        try:
            if "." in s or "e" in s.lower():
                raise ValueError
            return Fraction(s)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"{what}: cannot read {v!r} as p/q") from None
    raise ParseError(f"{what}: unexpected {type(v).__name__}")


def _need(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing '{key}'")
    return obj[key]


# networks

def network_to_json(net):
    arcs = []
    for i, a in enumerate(net.arcs):
        arcs.append({"name": net.arc_name(i), "tail": a.tail, "head": a.head,
                     "transit": q_to_json(a.transit), "storage": q_to_json(a.storage),
                     "cap_in": q_to_json(a.cap_in), "cap_out": q_to_json(a.cap_out)})
    return {"nodes": list(net.nodes), "arcs": arcs, "source": net.source, "sink": net.sink,
            "rate": q_to_json(net.rate)}


def network_from_json(doc):
    nodes = _need(doc, "nodes", "network")
    if not isinstance(nodes, list) or not all(isinstance(v, str) for v in nodes):
        raise ParseError("network: 'nodes' must be a list of strings")
    arcs = []
    for k, a in enumerate(_need(doc, "arcs", "network")):
        where = f"arc {k + 1}"
        cap_in = a.get("cap_in", AUTO) if isinstance(a, dict) else None
        arcs.append({
            "name": a.get("name") or f"e{k + 1}",
            "tail": _need(a, "tail", where),
            "head": _need(a, "head", where),
            "transit": q_from_json(_need(a, "transit", where), f"{where} transit"),
            "storage": q_from_json(a.get("storage", "inf"), f"{where} storage", allow_inf=True),
            "cap_in": AUTO if cap_in == AUTO else q_from_json(cap_in, f"{where} cap_in"),
            "cap_out": q_from_json(_need(a, "cap_out", where), f"{where} cap_out"),
        })
    rate = q_from_json(_need(doc, "rate", "network"), "rate")
    return make_network(nodes, arcs, _need(doc, "source", "network"),
                        _need(doc, "sink", "network"), rate)


# thin-flow instances

def instance_to_json(inst):
    return {"nodes": list(inst.nodes), "source": inst.source, "sink": inst.sink,
            "rate": q_to_json(inst.rate),
            "arcs": [{"name": inst.arc_name(i), "tail": a.tail, "head": a.head,
                      "cap_out": q_to_json(a.cap_out), "inflow_bound": q_to_json(a.inflow_bound),
                      "resetting": a.resetting} for i, a in enumerate(inst.arcs)]}


def instance_from_json(doc):
    arcs = []
    for k, a in enumerate(_need(doc, "arcs", "instance")):
        where = f"arc {k + 1}"
        arcs.append(TFArc(_need(a, "tail", where), _need(a, "head", where),
                          q_from_json(_need(a, "cap_out", where), f"{where} cap_out"),
                          q_from_json(_need(a, "inflow_bound", where), f"{where} inflow_bound"),
                          bool(a.get("resetting", False)), a.get("name") or f"a{k + 1}"))
    try:
        return ThinFlowInstance(tuple(_need(doc, "nodes", "instance")), tuple(arcs),
                                _need(doc, "source", "instance"), _need(doc, "sink", "instance"),
                                q_from_json(_need(doc, "rate", "instance"), "rate"))
    except ValueError as exc:
        raise ParseError(f"instance: {exc}") from exc


def solution_to_json(inst, sol, violations=()):
    return {"x": {inst.arc_name(i): q_to_json(v) for i, v in enumerate(sol.x)},
            "l": {v: q_to_json(sol.l[v]) for v in inst.nodes},
            "c": {v: q_to_json(sol.c[v]) for v in inst.nodes},
            "violations": [w.as_dict() for w in violations]}


# functions

def pl_to_json(f):
    return {"points": [[q_to_json(t), q_to_json(v)] for t, v in zip(f.times, f.values)],
            "slope": q_to_json(f.slope)}


def pl_from_json(doc, what):
    pts = _need(doc, "points", what)
    try:
        return PiecewiseLinear([q_from_json(t, what) for t, _ in pts],
                               [q_from_json(v, what) for _, v in pts],
                               q_from_json(_need(doc, "slope", what), what))
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}") from exc


def pc_to_json(f):
    return {"left": q_to_json(f.left),
            "steps": [[q_to_json(t), q_to_json(v)] for t, v in zip(f.times, f.values)]}


def pc_from_json(doc, what):
    steps = _need(doc, "steps", what)
    try:
        return PiecewiseConstant(q_from_json(_need(doc, "left", what), what),
                                 [q_from_json(t, what) for t, _ in steps],
                                 [q_from_json(v, what) for _, v in steps])
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}") from exc


# trajectories

def _class_flags(ph, e):
    return ("A" if e in ph.active else "") + ("R" if e in ph.resetting else "") + \
        ("F" if e in ph.spillback else "")


def trajectory_to_json(traj):
    net = traj.net
    names = [net.arc_name(e) for e in range(len(net.arcs))]
    phases = []
    for ph in traj.phases:
        L = traj.labels_at(ph.start)
        phases.append({
            "start": q_to_json(ph.start),
            "length": q_to_json(ph.alpha),
            "labels": {v: q_to_json(L[v]) for v in net.nodes},
            "l_prime": {v: q_to_json(ph.l_prime[v]) for v in net.nodes},
            "c": {v: q_to_json(ph.c[v]) for v in net.nodes},
            "x": {names[e]: q_to_json(traj.F_in[e].eval(L[a.tail]))
                  for e, a in enumerate(net.arcs)},
            "x_prime": {names[e]: q_to_json(ph.x_prime.get(e, 0)) for e in range(len(net.arcs))},
            "classes": {names[e]: _class_flags(ph, e) for e in range(len(net.arcs))},
            "inflow_bound": {names[e]: q_to_json(b) for e, b in sorted(ph.inflow_bound.items())},
        })
    functions = {}
    for e, a in enumerate(net.arcs):
        functions[names[e]] = {
            "f_in": pc_to_json(traj.f_in[e]),
            "f_out": pc_to_json(traj.f_out[e]),
            "F_in": pl_to_json(traj.F_in[e]),
            "F_out": pl_to_json(traj.F_out[e]),
            "z": pl_to_json(traj.F_in[e].shift(a.transit) - traj.F_out[e]),
            "d": pl_to_json(traj.F_in[e] - traj.F_out[e]),
        }
    return {
        "format": TRAJECTORY_FORMAT,
        "version": TRAJECTORY_VERSION,
        "network": network_to_json(net),
        "termination": traj.termination,
        "end": q_to_json(traj.end),
        "phase_starts": [q_to_json(p) for p in traj.phase_starts],
        "phases": phases,
        "labels": {v: pl_to_json(traj.labels[v]) for v in net.nodes},
        "functions": functions,
    }


def _phase_from_json(doc, net, k):
    where = f"phase {k + 1}"
    index = {net.arc_name(e): e for e in range(len(net.arcs))}

    def per_node(key):
        d = _need(doc, key, where)
        return {v: q_from_json(_need(d, v, f"{where} {key}"), f"{where} {key}") for v in net.nodes}

    def per_arc(key):
        d = _need(doc, key, where)
        try:
            return {index[n]: q_from_json(v, f"{where} {key}") for n, v in d.items()}
        except KeyError as exc:
            raise ParseError(f"{where}: unknown arc {exc}") from None

    classes = _need(doc, "classes", where)
    sets = {flag: frozenset(index[n] for n, f in classes.items() if flag in f) for flag in "ARF"}
    return PhaseProfile(q_from_json(_need(doc, "start", where), where),
                        q_from_json(_need(doc, "length", where), where, allow_inf=True),
                        per_arc("x_prime"), per_node("l_prime"), per_node("c"),
                        sets["A"], sets["R"], sets["F"], per_arc("inflow_bound"))


def trajectory_from_json(doc):
    if _need(doc, "format", "trajectory") != TRAJECTORY_FORMAT:
        raise ParseError("not a trajectory file")
    if _need(doc, "version", "trajectory") != TRAJECTORY_VERSION:
        raise ParseError(f"unsupported trajectory version {doc['version']}")
    net = network_from_json(_need(doc, "network", "trajectory"))
    funcs = _need(doc, "functions", "trajectory")
    f_in, f_out = {}, {}
    for e, a in enumerate(net.arcs):
        name = net.arc_name(e)
        fd = _need(funcs, name, "functions")
        f_in[e] = pc_from_json(_need(fd, "f_in", name), f"{name} f_in")
        f_out[e] = pc_from_json(_need(fd, "f_out", name), f"{name} f_out")
        if f_in[e].left != 0 or f_out[e].left != 0:
            raise ParseError(f"{name}: flow rates must vanish before time 0")
        Fin, Fout = f_in[e].integral(), f_out[e].integral()
        checks = {"F_in": Fin, "F_out": Fout, "z": Fin.shift(a.transit) - Fout, "d": Fin - Fout}
        for key, want in checks.items():
            if pl_from_json(_need(fd, key, name), f"{name} {key}") != want:
                raise ParseError(f"{name}: {key} does not match the flow rates")
    labels = {v: pl_from_json(_need(doc["labels"], v, "labels"), f"label {v}") for v in net.nodes}
    phases = [_phase_from_json(p, net, k) for k, p in enumerate(_need(doc, "phases", "trajectory"))]
    starts = [q_from_json(p, "phase start") for p in _need(doc, "phase_starts", "trajectory")]
    end = q_from_json(_need(doc, "end", "trajectory"), "end", allow_inf=True)
    return EquilibriumTrajectory(net, f_in, f_out, labels, starts, end,
                                 doc.get("termination"), phases)


def dumps(doc):
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def load_json_text(text):
    try:
        return json.loads(text, parse_float=_no_float)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh, parse_float=_no_float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc


def _no_float(s):
    raise ParseError(f"inexact number {s}; write rationals as \"p/q\"")


def read_network(path):
    return network_from_json(load_json(path))


def read_trajectory(path):
    return trajectory_from_json(load_json(path))


def read_instance(path):
    return instance_from_json(load_json(path))


def write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))

