"""Command line front end.

Exit codes: 0 success, 1 validation failure, 2 unreadable input, 3 internal
engine error.
"""
import argparse
import sys

from . import io
from .engine import TerminationPolicy, compute_nash_flow
from .errors import EngineBug, NetworkInvalid, ParseError
from .network import validate_network
from .plot import render_svg
from .pwl import INF
from .thinflow import solve_thin_flow, verify_thin_flow
from .validator import default_seed, validate_trajectory

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_BUG = 0, 1, 2, 3

ENDINGS = {"SteadyState": "steady state", "Horizon": "horizon reached",
           "PhaseCap": "phase cap reached", "StalledProgress": "stalled"}


def _q(x):
    return "inf" if x == INF else str(x)


def summarize(traj):
    net = traj.net
    n = len(traj.phases)
    head = [f"{n} phase" + ("" if n == 1 else "s")]
    bounds = [_q(p.start) for p in traj.phases[1:]]
    if bounds:
        head.append(("boundary" if len(bounds) == 1 else "boundaries") + " θ=" + ", ".join(bounds))
    head.append(ENDINGS.get(traj.termination, str(traj.termination)))
    lines = ["; ".join(head)]
    for k, ph in enumerate(traj.phases):
        lines.append(f"phase {k + 1}: [{_q(ph.start)}, {_q(ph.end)})")
        lines.append("  l' " + " ".join(f"{v}={_q(ph.l_prime[v])}" for v in net.nodes))
        flows = [f"{net.arc_name(e)}={_q(x)}" for e, x in sorted(ph.x_prime.items()) if x]
        lines.append("  x' " + (" ".join(flows) or "-"))
        for v in net.nodes:
            if ph.c[v] != 1:
                lines.append(f"  c_{v} = {_q(ph.c[v])}")
        for e in sorted(ph.spillback):
            lines.append(f"  full {net.arc_name(e)}, b+ = {_q(ph.inflow_bound[e])}")
    return "\n".join(lines) + "\n"


def _policy(args):
    kw = {"phase_cap": args.phase_cap}
    if args.horizon is not None:
        kw["horizon"] = io.q_from_json(args.horizon, "--horizon", allow_inf=True)
    if args.stall:
        amin, _, count = args.stall.partition(":")
        kw["alpha_min"] = io.q_from_json(amin, "--stall")
        if count:
            kw["repeat_count"] = int(count)
    return TerminationPolicy(**kw)


def cmd_validate(args, out):
    net = io.read_network(args.network)
    res = validate_network(net)
    if isinstance(res, list):
        for v in res:
            out.write(f"{v}\n")
        return EXIT_INVALID
    out.write(f"valid: {len(net.nodes)} nodes, {len(net.arcs)} arcs\n")
    return EXIT_OK


def cmd_solve(args, out):
    net = io.read_network(args.network)
    try:
        traj = compute_nash_flow(net, _policy(args))
    except NetworkInvalid as exc:
        for v in exc.violations:
            out.write(f"{v}\n")
        return EXIT_INVALID
    if args.out:
        io.write_json(args.out, io.trajectory_to_json(traj))
    out.write(summarize(traj))
    if args.check:
        rep = validate_trajectory(traj, seed=args.seed)
        out.write("validation: " + ("pass" if rep.ok else "FAIL") + "\n")
        if not rep.ok:
            return EXIT_INVALID
    return EXIT_OK


def cmd_thin_flow(args, out):
    inst = io.read_instance(args.instance)
    sols = solve_thin_flow(inst, all_solutions=args.all)
    sols = sols if args.all else [sols]
    docs = []
    bad = False
    for sol in sols:
        viol = verify_thin_flow(inst, sol)
        bad = bad or bool(viol)
        docs.append(io.solution_to_json(inst, sol, viol))
    out.write(io.dumps(docs if args.all else docs[0]))
    return EXIT_INVALID if bad else EXIT_OK


def cmd_check(args, out):
    traj = io.read_trajectory(args.trajectory)
    rep = validate_trajectory(traj, seed=args.seed)
    out.write(io.dumps(rep.as_dict()))
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_plot(args, out):
    traj = io.read_trajectory(args.trajectory)
    horizon = None
    if args.plot_horizon is not None:
        horizon = io.q_from_json(args.plot_horizon, "--plot-horizon")
    svg = render_svg(traj, args.what, horizon)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    out.write(f"wrote {args.out}\n")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="nashflow",
                                description="Exact Nash flows over time with spillback.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a network file")
    v.add_argument("network")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("solve", help="compute the equilibrium phase by phase")
    s.add_argument("network")
    s.add_argument("--horizon", help="stop at this source time (p/q)")
    s.add_argument("--phase-cap", type=int, default=1000)
    s.add_argument("--stall", help="ALPHA_MIN[:COUNT] guard against vanishing phases")
    s.add_argument("--out", help="write the trajectory JSON here")
    s.add_argument("--check", action="store_true", help="validate the result")
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("thin-flow", help="solve and verify one thin-flow instance")
    t.add_argument("instance")
    t.add_argument("--all", action="store_true", help="list every solution found")
    t.set_defaults(func=cmd_thin_flow)

    c = sub.add_parser("check", help="validate a trajectory file")
    c.add_argument("trajectory")
    c.add_argument("--seed", type=int, default=None)
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("plot", help="draw labels, queues or loads as SVG")
    g.add_argument("trajectory")
    g.add_argument("--what", choices=("labels", "queues", "loads"), default="labels")
    g.add_argument("--out", required=True)
    g.add_argument("--plot-horizon")
    g.set_defaults(func=cmd_plot)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = default_seed()
    try:
        return args.func(args, out)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except EngineBug as exc:
        sys.stderr.write(f"engine error ({type(exc).__name__}): {exc}\n")
        return EXIT_BUG


if __name__ == "__main__":
    sys.exit(main())
