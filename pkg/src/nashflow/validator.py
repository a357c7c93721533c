"""Definition-level checks for flows over time with spillback.

The checks read only function data from a trajectory (in/outflow rates,
cumulative flows, labels, phase start times), so hand-built trajectories
can be validated as well.

All functions involved are piecewise linear or piecewise constant. Each
check therefore runs on a grid made of every relevant breakpoint, the
midpoint between neighbouring grid points (this is also where left limits
at breakpoints are taken) and ``k`` seeded random times per phase. Between
grid points nothing changes, so passing on the grid means passing
everywhere.
"""
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
import os
import random

from . import dynamics as dyn
from .errors import (CycleFound, DemandExceedsSupply, NashFlowError,
                     PreconditionNotMet)
from .network import topological_order
from .pwl import INF, as_q
from .thinflow import TFArc, ThinFlowInstance, ThinFlowSolution, verify_thin_flow

ZERO = Fraction(0)
ONE = Fraction(1)
SAMPLES_PER_PHASE = 20

# grid tables are swept with GMP rationals when available
if os.environ.get("NASHFLOW_PURE_PYTHON"):
    Rat = Fraction
else:
    try:
        from gmpy2 import mpq as Rat
    except ImportError:
        Rat = Fraction


def _plain(x):
    if Rat is not Fraction and isinstance(x, Rat):
        return Fraction(int(x.numerator), int(x.denominator))
    return x


@dataclass(frozen=True)
class Witness:
    condition: str
    element: str
    theta: object
    lhs: object
    rhs: object

    def __post_init__(self):
        for k in ("theta", "lhs", "rhs"):
            object.__setattr__(self, k, _plain(getattr(self, k)))

    def as_dict(self):
        return {"condition": self.condition, "element": self.element, "theta": str(self.theta),
                "lhs": str(self.lhs), "rhs": str(self.rhs)}


@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)      # check name -> list of Witness
    samples: list = field(default_factory=list)     # source times sampled
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return not any(self.checks.values())

    def witnesses(self, check=None):
        if check is not None:
            return list(self.checks.get(check, []))
        return [w for ws in self.checks.values() for w in ws]

    def merge(self, other):
        for k, v in other.checks.items():
            self.checks.setdefault(k, []).extend(v)
        self.samples = sorted(set(self.samples) | set(other.samples))
        self.notes.extend(n for n in other.notes if n not in self.notes)
        return self

    def as_dict(self):
        return {
            "ok": self.ok,
            "checks": {k: {"status": "fail" if v else "pass", "witnesses": [w.as_dict() for w in v]}
                       for k, v in sorted(self.checks.items())},
            "samples": [str(t) for t in self.samples],
            "notes": list(self.notes),
        }


def default_seed():
    return int(os.environ.get("NASHFLOW_SEED", "0"))


def _rand_between(rng, a, b):
    return a + (b - a) * Fraction(rng.randint(1, 999), 1000)


def source_samples(traj, k=SAMPLES_PER_PHASE, seed=None):
    """Phase starts plus ``k`` seeded random source times inside each phase."""
    rng = random.Random(default_seed() if seed is None else seed)
    starts = list(traj.phase_starts) or [ZERO]
    end = traj.end
    if end == INF:
        last = starts[-1]
        end_s = last + max(ONE, last)
    else:
        end_s = end
    bounds = starts + [end_s]
    pts = set(starts)
    for a, b in zip(bounds, bounds[1:]):
        if b > a:
            pts.update(_rand_between(rng, a, b) for _ in range(k))
    if traj.end != INF:
        pts.add(traj.end)
    return sorted(p for p in pts if traj.end == INF or p <= traj.end)


def _all_breakpoints(traj):
    pts = set()
    net = traj.net
    for e, a in enumerate(net.arcs):
        fi, fo = traj.f_in[e], traj.f_out[e]
        pts.update(fi.times)
        pts.update(fo.times)
        pts.update(t + a.transit for t in fi.times)
        z = traj.F_in[e].shift(a.transit) - traj.F_out[e]
        pts.update(z.level_times(0))
        if a.storage != INF:
            pts.update((traj.F_in[e] - traj.F_out[e]).level_times(a.storage))
    for v in net.nodes:
        pts.update(traj.labels[v].times)
    return pts


def arc_time_grid(traj, samples):
    """Refined arc-time grid shared by all local checks."""
    pts = _all_breakpoints(traj)
    for v in traj.net.nodes:
        pts.update(traj.labels[v].eval(t) for t in samples)
    pts = sorted(p for p in pts | {ZERO} if p >= 0)
    grid = set(pts)
    grid.update((a + b) / 2 for a, b in zip(pts, pts[1:]))
    grid.add(pts[-1] + 1)
    return sorted(grid)


class _Domains:
    """Arc times up to which each local quantity is determined by the trajectory."""

    def __init__(self, traj):
        net = traj.net
        if traj.end == INF:
            self.node = {v: INF for v in net.nodes}
        else:
            self.node = {v: traj.labels[v].eval(traj.end) for v in net.nodes}
        self.queue, self.load = [], []
        for a in net.arcs:
            self.queue.append(min(self.node[a.head], self.node[a.tail] + a.transit))
            self.load.append(min(self.node[a.head], self.node[a.tail]))

    def indexed(self, grid):
        """Same limits as counts of grid points below them."""
        def cut(x):
            return len(grid) if x == INF else bisect_left(grid, x)
        self.node = {v: cut(x) for v, x in self.node.items()}
        self.queue = [cut(x) for x in self.queue]
        self.load = [cut(x) for x in self.load]
        return self


def _sweep(fn, points):
    """Evaluate a step or piecewise-linear function at sorted ``points``."""
    ts = [Rat(t) for t in fn.times]
    vals = [Rat(v) for v in fn.values]
    n = len(ts)
    out = []
    i = -1
    if hasattr(fn, "slope"):
        segs = [Rat(fn._seg(k)) for k in range(n)]
        for t in points:
            while i + 1 < n and ts[i + 1] <= t:
                i += 1
            out.append(vals[0] if i < 0 else vals[i] + segs[i] * (t - ts[i]))
    else:
        left = Rat(fn.left)
        for t in points:
            while i + 1 < n and ts[i + 1] <= t:
                i += 1
            out.append(left if i < 0 else vals[i])
    return out


class _Tables:
    """Per-arc values of every local quantity on the grid.

    Same formulas as the pointwise functions in ``dynamics``, evaluated in
    one sorted sweep per function.
    """

    def __init__(self, traj, grid):
        self.grid = grid
        self.dom = _Domains(traj).indexed(grid)
        self.rate = Rat(traj.net.rate)
        self.cap_out = [Rat(a.cap_out) for a in traj.net.arcs]
        self.fin, self.fout, self.z, self.d, self.bplus, self.bminus = [], [], [], [], [], []
        pts = [Rat(t) for t in grid]
        zero = Rat(0)
        for e, a in enumerate(traj.net.arcs):
            tau, cap_in, cap_out = Rat(a.transit), Rat(a.cap_in), self.cap_out[e]
            lagged = [t - tau for t in pts]
            fin = _sweep(traj.f_in[e], pts)
            fout = _sweep(traj.f_out[e], pts)
            fin_lag = _sweep(traj.f_in[e], lagged)
            Fin = _sweep(traj.F_in[e], pts)
            Fout = _sweep(traj.F_out[e], pts)
            Fin_lag = _sweep(traj.F_in[e], lagged)
            z = [p - q for p, q in zip(Fin_lag, Fout)]
            d = [p - q for p, q in zip(Fin, Fout)]
            if a.storage == INF:
                bplus = [cap_in] * len(grid)
            else:
                sigma = Rat(a.storage)
                bplus = [min(fo, cap_in) if dd >= sigma else cap_in for fo, dd in zip(fout, d)]
            bminus = [zero if t < tau else cap_out if zz > 0 else min(fl, cap_out)
                      for t, zz, fl in zip(pts, z, fin_lag)]
            for name, val in (("fin", fin), ("fout", fout), ("z", z), ("d", d),
                              ("bplus", bplus), ("bminus", bminus)):
                getattr(self, name).append(val)


def tables_for(traj, samples):
    """Precomputed arc tables shared by several checks on one sample set."""
    return _Tables(traj, arc_time_grid(traj, samples))


def _tables(traj, samples, grid, tables):
    if tables is not None:
        return tables
    samples = samples if samples is not None else source_samples(traj)
    return _Tables(traj, grid if grid is not None else arc_time_grid(traj, samples))


def _fair_factor(push, out, caps):
    """Spillback factor from actual outflows and push rates of a node's in-arcs."""
    if out == push:
        return ONE, out
    push, out, caps = ([_plain(v) for v in vs] for vs in (push, out, caps))
    return dyn.node_spillback_factor(push, sum(out, ZERO), caps)


def check_feasibility(traj, samples=None, grid=None, tables=None):
    """Inflow, fair allocation, no slack and no deadlock conditions plus conservation."""
    net = traj.net
    samples = samples if samples is not None else source_samples(traj)
    tb = _tables(traj, samples, grid, tables)
    dom = tb.dom
    rep = ValidationReport(samples=list(samples))
    inflow, fair, slack, deadlock, cons = [], [], [], [], []
    m = len(net.arcs)
    for i, t in enumerate(tb.grid):
        for e in range(m):
            if i < dom.load[e] and tb.fin[e][i] > tb.bplus[e][i]:
                inflow.append(Witness("inflow_condition", net.arc_name(e), t,
                                      tb.fin[e][i], tb.bplus[e][i]))
        for v in net.nodes:
            ins, outs = net.in_arcs(v), net.out_arcs(v)
            if i < dom.node[v] and v != net.sink:
                got = sum((tb.fout[e][i] for e in ins), Rat(0))
                if v == net.source:
                    got += tb.rate
                sent = sum((tb.fin[e][i] for e in outs), Rat(0))
                if got != sent:
                    cons.append(Witness("flow_conservation", str(v), t, sent, got))
            if not ins or any(i >= dom.queue[e] for e in ins):
                continue
            try:
                c, alloc = _fair_factor([tb.bminus[e][i] for e in ins],
                                        [tb.fout[e][i] for e in ins],
                                        [tb.cap_out[e] for e in ins])
            except DemandExceedsSupply as exc:
                fair.append(Witness("fair_allocation", str(v), t, "no factor", str(exc)))
                continue
            for e, want in zip(ins, alloc):
                if tb.fout[e][i] != want:
                    fair.append(Witness("fair_allocation", net.arc_name(e), t, tb.fout[e][i], want))
            if c < 1 and outs and all(i < dom.load[e] for e in outs):
                if not any(tb.fin[e][i] == tb.bplus[e][i] for e in outs):
                    slack.append(Witness("no_slack", str(v), t, c, "no outgoing arc at its bound"))
        full = [net.arcs[e] for e in range(m) if net.arcs[e].storage != INF
                and i < dom.load[e] and tb.d[e][i] >= net.arcs[e].storage]
        if len(full) > 1:
            try:
                topological_order(net.nodes, full)
            except CycleFound as exc:
                names = ",".join(net.arc_name(net.arcs.index(a)) for a in exc.cycle)
                deadlock.append(Witness("no_deadlock", names, t, "cycle of full arcs", ""))
    rep.checks.update({"inflow_condition": inflow, "fair_allocation": fair, "no_slack": slack,
                       "no_deadlock": deadlock, "flow_conservation": cons})
    return rep


def check_derived_conditions(traj, samples=None, grid=None, tables=None):
    """Outflow capacity, nonnegative queues and storage respected."""
    net = traj.net
    samples = samples if samples is not None else source_samples(traj)
    tb = _tables(traj, samples, grid, tables)
    dom = tb.dom
    cap, deficit, store = [], [], []
    for e, a in enumerate(net.arcs):
        name = net.arc_name(e)
        for i, t in enumerate(tb.grid):
            if i < dom.node[a.head] and tb.fout[e][i] > a.cap_out:
                cap.append(Witness("outflow_capacity", name, t, tb.fout[e][i], a.cap_out))
            if i < dom.queue[e] and tb.z[e][i] < 0:
                deficit.append(Witness("non_deficit", name, t, tb.z[e][i], 0))
            if a.storage != INF and i < dom.load[e] and tb.d[e][i] > a.storage:
                store.append(Witness("storage", name, t, tb.d[e][i], a.storage))
    rep = ValidationReport(samples=list(samples))
    rep.checks.update({"outflow_capacity": cap, "non_deficit": deficit, "storage": store})
    return rep


def check_nash_condition(traj, samples=None):
    """Underlying static flow identity, flow only on active arcs, Bellman labels."""
    net = traj.net
    samples = samples if samples is not None else source_samples(traj)
    ident, active, bell = [], [], []
    for th in samples:
        L = traj.labels_at(th)
        for e, a in enumerate(net.arcs):
            name = net.arc_name(e)
            lu, lv = L[a.tail], L[a.head]
            fin = traj.F_in[e].eval(lu)
            fout = traj.F_out[e].eval(lv)
            if fin != fout:
                ident.append(Witness("static_flow_identity", name, th, fin, fout))
            if (traj.end == INF or th < traj.end) and traj.f_in[e].eval(lu) > 0:
                ok = lv >= lu + a.transit
                if ok:
                    try:
                        ok = dyn.exit_time(traj, e, lu) == lv
                    except NashFlowError:
                        ok = False
                if not ok:
                    active.append(Witness("flow_on_active_arcs", name, th, lv, lu + a.transit))
        try:
            want = dyn.earliest_arrival(traj, th)
        except NashFlowError as exc:
            bell.append(Witness("bellman_labels", "network", th, "undefined", str(exc)))
            continue
        for v in net.nodes:
            if want.get(v) != L[v]:
                bell.append(Witness("bellman_labels", str(v), th, L[v], want.get(v)))
    rep = ValidationReport(samples=list(samples))
    rep.checks.update({"static_flow_identity": ident, "flow_on_active_arcs": active,
                       "bellman_labels": bell})
    return rep


def phase_rates(traj, k):
    """``(x', l', c)`` of phase ``k`` recovered from function data."""
    net = traj.net
    phi = traj.phase_starts[k]
    L = traj.labels_at(phi)
    lp = {v: traj.labels[v].slope_at(phi) for v in net.nodes}
    x = {}
    for e, a in enumerate(net.arcs):
        x[e] = traj.f_in[e].eval(L[a.tail]) * lp[a.tail]
    c = {}
    for v in net.nodes:
        if v == net.source:
            c[v] = ONE / lp[v] if lp[v] > 0 else ONE
        elif lp[v] == 0:
            c[v] = ONE
        else:
            ins = net.in_arcs(v)
            c[v] = _fair_factor([dyn.push_rate(traj, e, L[v]) for e in ins],
                                [traj.f_out[e].eval(L[v]) for e in ins],
                                [net.arcs[e].cap_out for e in ins])[0]
    return x, lp, c


def check_phase_derivatives(traj):
    """Each phase's label and flow slopes must form a thin flow at its start."""
    net = traj.net
    bad = []
    for k, phi in enumerate(traj.phase_starts):
        try:
            x, lp, c = phase_rates(traj, k)
            L = traj.labels_at(phi)
            act, res, _ = dyn.classify_arcs(traj, phi, L)
        except (NashFlowError, ZeroDivisionError) as exc:
            bad.append(Witness("phase_data", f"phase {k}", phi, type(exc).__name__, str(exc)))
            continue
        idx = sorted(act)
        arcs = tuple(TFArc(net.arcs[e].tail, net.arcs[e].head, net.arcs[e].cap_out,
                           dyn.inflow_bound(traj, e, L[net.arcs[e].tail], strict=False),
                           e in res, net.arc_name(e)) for e in idx)
        for e in range(len(net.arcs)):
            if e not in act and x[e] != 0:
                bad.append(Witness("flow_on_active_arcs", net.arc_name(e), phi, x[e], 0))
        try:
            inst = ThinFlowInstance(tuple(net.nodes), arcs, net.source, net.sink, net.rate)
        except ValueError as exc:
            bad.append(Witness("phase_data", f"phase {k}", phi, "instance", str(exc)))
            continue
        sol = ThinFlowSolution(tuple(x[e] for e in idx), lp, c)
        for w in verify_thin_flow(inst, sol):
            bad.append(Witness(w.condition, w.element, phi, w.lhs, w.rhs))
    return ValidationReport(checks={"phase_derivatives": bad}, samples=list(traj.phase_starts))


def epsilon_lower_bound(net):
    """``(nu_min / total)^m * nu_min`` with ``nu_min`` capped at 1."""
    nu_min = min([ONE] + [a.cap_in for a in net.arcs] + [a.cap_out for a in net.arcs])
    total = max(sum((a.cap_in for a in net.arcs), ZERO), ONE)
    return (nu_min / total) ** len(net.arcs) * nu_min


def epsilon_is_loose(net):
    """True when every capacity exceeds 1, so the cap at 1 weakens the bound."""
    return all(a.cap_in > 1 and a.cap_out > 1 for a in net.arcs)


def check_epsilon(traj, samples=None, grid=None, tables=None):
    """Outflow rate of every queued arc is at least the lower bound."""
    net = traj.net
    samples = samples if samples is not None else source_samples(traj)
    tb = _tables(traj, samples, grid, tables)
    eps = epsilon_lower_bound(net)
    bad = []
    for e in range(len(net.arcs)):
        for i, t in enumerate(tb.grid):
            if i < tb.dom.queue[e] and tb.z[e][i] > 0 and tb.fout[e][i] < eps:
                bad.append(Witness("queued_outflow_bound", net.arc_name(e), t, tb.fout[e][i], eps))
    rep = ValidationReport(checks={"queued_outflow_bound": bad}, samples=list(samples))
    if epsilon_is_loose(net):
        rep.notes.append("all capacities exceed 1; the outflow bound is not tight")
    return rep


def check_original_model_reduction(net, traj):
    """Without storage limits and with non-binding inflow capacities nothing spills back."""
    for e, a in enumerate(net.arcs):
        into = sum((net.arcs[i].cap_out for i in net.in_arcs(a.tail)), ZERO)
        if a.storage != INF or not a.cap_in > into:
            raise PreconditionNotMet(
                f"arc {net.arc_name(e)} needs infinite storage and inflow capacity above {into}")
    bad = []
    for k, phi in enumerate(traj.phase_starts):
        _, _, c = phase_rates(traj, k)
        for v, cv in c.items():
            if cv != 1:
                bad.append(Witness("no_spillback", str(v), phi, cv, 1))
        for e in dyn.classify_arcs(traj, phi)[2]:
            bad.append(Witness("no_full_arcs", net.arc_name(e), phi, "full", ""))
    return ValidationReport(checks={"reduction": bad}, samples=list(traj.phase_starts))


def validate_trajectory(traj, seed=None, k=SAMPLES_PER_PHASE):
    """Run every check; the returned report is ok iff all pass."""
    samples = source_samples(traj, k, seed)
    tables = tables_for(traj, samples)
    rep = ValidationReport(samples=list(samples))
    rep.merge(check_feasibility(traj, samples, tables=tables))
    rep.merge(check_derived_conditions(traj, samples, tables=tables))
    rep.merge(check_nash_condition(traj, samples))
    rep.merge(check_phase_derivatives(traj))
    rep.merge(check_epsilon(traj, samples, tables=tables))
    return rep
