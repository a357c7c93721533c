from dataclasses import replace
from fractions import Fraction as F
import random

import pytest

from nashflow.fixtures import random_thin_flow_instance
from nashflow.thinflow import (TFArc, ThinFlowInstance, ThinFlowSolution, rho, solve_thin_flow,
                               verify_thin_flow)


def merge_instance():
    """s -> v -> t where the second arc is queued and its inflow is capped at 2."""
    arcs = (TFArc("s", "v", F(3), F(4), False, "e1"), TFArc("v", "t", F(2), F(2), True, "e2"))
    return ThinFlowInstance(("s", "v", "t"), arcs, "s", "t", F(3))


def test_throttled_merge_solution():
    sol = solve_thin_flow(merge_instance())
    assert sol.x == (3, 3)
    assert sol.l == {"s": 1, "v": F(3, 2), "t": F(3, 2)}
    assert sol.c == {"s": 1, "v": F(2, 3), "t": 1}


def test_verifier_flags_each_broken_condition():
    inst = merge_instance()
    good = solve_thin_flow(inst)
    assert verify_thin_flow(inst, good) == []
    cases = {
        "conservation": replace(good, x=(F(3), F(2))),
        "bound_attained": replace(good, c={**good.c, "v": F(1, 2)},
                                  l={**good.l, "v": F(2), "t": F(2)}),
        "source_label": replace(good, l={**good.l, "s": F(2)}),
        "factor_range": replace(good, c={**good.c, "t": F(0)}),
    }
    for cond, sol in cases.items():
        assert cond in {w.condition for w in verify_thin_flow(inst, sol)}, cond


def test_rho_branches():
    assert rho(2, 3, 1, 3, resetting=False) == 2
    assert rho(2, 3, 1, 3, resetting=True) == 1
    assert rho(1, 3, F(1, 2), 2, resetting=False) == 3


def test_instance_rejects_cycles_and_unreachable_nodes():
    with pytest.raises(ValueError):
        ThinFlowInstance(("s", "a", "t"), (TFArc("s", "a", F(1), F(1)), TFArc("a", "s", F(1), F(1)),
                                          TFArc("a", "t", F(1), F(1))), "s", "t", F(1))
    with pytest.raises(ValueError):
        ThinFlowInstance(("s", "a", "t"), (TFArc("s", "t", F(1), F(1)),), "s", "t", F(1))


def test_all_solutions_are_distinct_and_verified():
    rng = random.Random(11)
    for _ in range(30):
        inst = random_thin_flow_instance(rng, max_nodes=5, max_arcs=7)
        sols = solve_thin_flow(inst, all_solutions=True)
        assert sols and len(set(sols)) == len(sols)
        assert all(verify_thin_flow(inst, s) == [] for s in sols)
        assert sols[0] == solve_thin_flow(inst)
