from fractions import Fraction as F

from hypothesis import given, settings, strategies as st
import pytest

from nashflow.pwl import INF, PiecewiseConstant, PiecewiseLinear, pointwise_max, pointwise_min

rat = st.fractions(min_value=-20, max_value=20, max_denominator=12)
pos = st.fractions(min_value=F(1, 12), max_value=10, max_denominator=12)


@st.composite
def pl(draw, monotone=False):
    n = draw(st.integers(1, 5))
    steps = draw(st.lists(pos, min_size=n - 1, max_size=n - 1))
    t0 = draw(rat)
    times = [t0]
    for s in steps:
        times.append(times[-1] + s)
    if monotone:
        v = draw(rat)
        vals = [v]
        for _ in range(n - 1):
            vals.append(vals[-1] + draw(st.fractions(min_value=0, max_value=5, max_denominator=6)))
        slope = draw(st.fractions(min_value=0, max_value=4, max_denominator=6))
    else:
        vals = draw(st.lists(rat, min_size=n, max_size=n))
        slope = draw(rat)
    return PiecewiseLinear(times, vals, slope)


def probe_points(*fs):
    pts = {F(-30), F(50)}
    for f in fs:
        for t in f.times:
            pts.update({t, t - F(1, 7), t + F(1, 7)})
    return sorted(pts)


def test_canonical_form_drops_collinear_points():
    f = PiecewiseLinear([0, 1, 2, 3], [0, 1, 2, 2], 0)
    assert f.times == (0, 2) and f.values == (0, 2)
    assert f == PiecewiseLinear([0, 2], [0, 2])
    assert PiecewiseLinear([5], [3]).is_constant()


def test_eval_left_constant_and_final_ray():
    f = PiecewiseLinear([1, 3], [2, 6], F(1, 2))
    assert f.eval(-4) == 2
    assert f.eval(2) == 4
    assert f.eval(7) == 8
    assert f.slope_at(3) == F(1, 2) and f.left_slope_at(3) == 2


def test_float_input_refused():
    with pytest.raises(TypeError):
        PiecewiseLinear([0.5], [1])


def test_level_times_and_first_crossing():
    f = PiecewiseLinear([0, 2, 4], [0, 4, 0], 1)
    assert f.level_times(2) == [1, 3, 6]
    assert f.first_crossing(3, 0) == F(3, 2)
    assert f.first_crossing(3, 3) == 7
    assert PiecewiseLinear([0], [0], -1).first_crossing(1, 0) is None


def test_step_function_integral():
    g = PiecewiseConstant.from_pieces([(1, 3, 2), (3, INF, 1)])
    G = g.integral()
    assert G.eval(1) == 0 and G.eval(3) == 4 and G.eval(10) == 11
    assert g.left_limit(3) == 2 and g.eval(3) == 1
    with pytest.raises(ValueError):
        PiecewiseConstant.from_pieces([(0, 2, 1), (1, 3, 1)])


@given(pl(), pl())
@settings(max_examples=80, deadline=None)
def test_sum_and_difference_pointwise(f, g):
    s, d = f + g, f - g
    for t in probe_points(f, g):
        assert s.eval(t) == f.eval(t) + g.eval(t)
        assert d.eval(t) == f.eval(t) - g.eval(t)


@given(pl(), pl(), pl())
@settings(max_examples=100, deadline=None)
def test_min_max_pointwise(f, g, h):
    lo, hi = pointwise_min([f, g, h]), pointwise_max([f, g, h])
    for t in probe_points(f, g, h, lo, hi):
        vals = [f.eval(t), g.eval(t), h.eval(t)]
        assert lo.eval(t) == min(vals)
        assert hi.eval(t) == max(vals)


@given(pl(), pl(monotone=True))
@settings(max_examples=100, deadline=None)
def test_composition_with_nondecreasing_inner(f, g):
    c = f.compose(g)
    for t in probe_points(g, c):
        assert c.eval(t) == f.eval(g.eval(t))


@given(pl(), rat, pos)
@settings(max_examples=100, deadline=None)
def test_shift_and_scale(f, d, k):
    for t in probe_points(f):
        assert f.shift(d).eval(t + d) == f.eval(t)
        assert f.scale(k).eval(t) == k * f.eval(t)


@given(st.lists(st.tuples(pos, st.fractions(min_value=0, max_value=5, max_denominator=4)),
                min_size=1, max_size=5))
@settings(max_examples=100, deadline=None)
def test_integral_then_derivative_round_trip(pieces):
    t = F(0)
    spans = []
    for length, v in pieces:
        spans.append((t, t + length, v))
        t += length
    g = PiecewiseConstant.from_pieces(spans)
    assert g.integral().derivative() == g
