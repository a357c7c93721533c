from fractions import Fraction as F

from hypothesis import given, settings, strategies as st
import pytest

from nashflow import lp

compiled = pytest.mark.skipif(lp.solve_lp_compiled is None, reason="compiled kernel not built")
coef = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def lp_problem(draw):
    n = draw(st.integers(1, 4))
    rows = []
    for _ in range(draw(st.integers(1, 5))):
        coeffs = {j: draw(coef) for j in range(n) if draw(st.booleans())}
        rows.append((coeffs, draw(st.sampled_from(["<=", ">=", "=="])), draw(coef) * 3))
    rows.append(({j: F(1) for j in range(n)}, "<=", F(10)))   # keep it bounded
    obj = {j: draw(coef) for j in range(n)}
    return n, rows, obj


def satisfies(rows, x):
    for coeffs, sense, rhs in rows:
        lhs = sum((F(a) * x[j] for j, a in coeffs.items()), F(0))
        ok = {"<=": lhs <= rhs, ">=": lhs >= rhs, "==": lhs == rhs}[sense]
        if not ok:
            return False
    return all(v >= 0 for v in x)


def test_small_lp_exact():
    rows = [({0: 1, 1: 1}, "<=", 4), ({0: 1, 1: 3}, "<=", 6)]
    status, x = lp.solve_lp_python(2, rows, {0: 3, 1: 2})
    assert status == "optimal" and x == [4, 0]
    status, x = lp.solve_lp_python(2, rows, {0: 1, 1: 2})
    assert x == [3, 1]
    assert lp.solve_lp_python(1, [({0: 1}, ">=", 2), ({0: 1}, "<=", 1)])[0] == "infeasible"
    assert lp.solve_lp_python(1, [({0: 1}, ">=", 2)], {0: 1})[0] == "unbounded"


@given(lp_problem())
@settings(max_examples=100, deadline=None)
def test_python_solution_is_feasible_and_optimal_value_stable(problem):
    n, rows, obj = problem
    status, x = lp.solve_lp_python(n, rows, obj)
    if status == "optimal":
        assert satisfies(rows, x)


@compiled
@given(lp_problem())
@settings(max_examples=100, deadline=None)
def test_backends_agree(problem):
    n, rows, obj = problem
    assert lp.solve_lp_compiled(n, rows, obj) == lp.solve_lp_python(n, rows, obj)
    assert lp.solve_lp_compiled(n, rows) == lp.solve_lp_python(n, rows)


@given(lp_problem())
@settings(max_examples=80, deadline=None)
def test_incremental_matches_batch_feasibility(problem):
    n, rows, _ = problem
    classes = [lp.IncrementalLPPython] + ([lp.IncrementalLP] if lp.BACKEND == "gmp" else [])
    want = lp.solve_lp_python(n, rows)[0] != "infeasible"
    for cls in classes:
        inc = cls(n)
        feasible = True
        for row in rows:
            feasible = inc.add_rows([row])
        assert feasible == want
        if feasible:
            assert satisfies(rows, inc.point())


def test_incremental_copy_is_independent():
    a = lp.IncrementalLP(2)
    a.add_rows([({0: 1, 1: 1}, ">=", 2)])
    b = a.copy()
    assert not b.add_rows([({0: 1, 1: 1}, "<=", 1)])
    assert a.add_rows([({0: 1}, "<=", 5)])
