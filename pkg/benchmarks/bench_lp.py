"""Compare the compiled GMP simplex with the pure-Python fallback.

Three workloads: batch LPs lifted from thin-flow instances, the incremental
feasibility LP fed row by row, and full thin-flow solves. Both backends must
agree on every result; timings are best of ``--repeat`` runs.

    python3 benchmarks/bench_lp.py [--instances 200] [--repeat 3] [--seed 0]
"""
import argparse
from contextlib import contextmanager
import random
import sys
import time

from nashflow import lp, thinflow
from nashflow.fixtures import random_thin_flow_instance


def random_lps(rng, count):
    out = []
    for _ in range(count):
        n = rng.randint(4, 14)
        rows = []
        for _ in range(rng.randint(n, 2 * n)):
            coeffs = {j: rng.randint(-5, 5) for j in rng.sample(range(n), rng.randint(1, n))}
            rows.append((coeffs, rng.choice(["<=", ">=", "=="]), rng.randint(-6, 12)))
        rows.append(({j: 1 for j in range(n)}, "<=", 50))
        out.append((n, rows, {j: rng.randint(-3, 3) for j in range(n)}))
    return out


@contextmanager
def backend(name):
    saved = lp.solve_lp, lp.IncrementalLP
    if name == "python":
        lp.solve_lp, lp.IncrementalLP = lp.solve_lp_python, lp.IncrementalLPPython
    try:
        yield
    finally:
        lp.solve_lp, lp.IncrementalLP = saved


def best_of(repeat, fn):
    best, result = None, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def workloads(lps, instances):
    def batch():
        return [lp.solve_lp(n, rows, obj) for n, rows, obj in lps]

    def incremental():
        res = []
        for n, rows, _ in lps:
            inc = lp.IncrementalLP(n)
            ok = True
            for row in rows:
                ok = inc.add_rows([row])
            res.append((ok, inc.point() if ok else None))
        return res

    def thin_flows():
        return [thinflow.solve_thin_flow(inst) for inst in instances]

    return {"batch simplex": batch, "incremental simplex": incremental,
            "thin-flow solve": thin_flows}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if lp.solve_lp_compiled is None:
        print("compiled kernel not available; rebuild with: pip install -e . --no-build-isolation")
        return 1
    rng = random.Random(args.seed)
    lps = random_lps(rng, args.instances)
    instances = [random_thin_flow_instance(rng) for _ in range(args.instances)]
    print(f"{args.instances} problems per workload, best of {args.repeat}")
    print(f"{'workload':<22}{'python [s]':>12}{'gmp [s]':>12}{'speedup':>10}")
    for name in workloads(lps, instances):
        timings, results = {}, {}
        for be in ("python", "gmp"):
            with backend(be):
                fn = workloads(lps, instances)[name]
                timings[be], results[be] = best_of(args.repeat, fn)
        if results["python"] != results["gmp"]:
            print(f"{name}: backends disagree")
            return 2
        t_py, t_gmp = timings["python"], timings["gmp"]
        print(f"{name:<22}{t_py:>12.3f}{t_gmp:>12.3f}{t_py / t_gmp:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
