"""Exact piecewise-linear and piecewise-constant functions of rational time.

Both classes are immutable and canonical: redundant breakpoints are dropped on
construction, so ``==`` compares functions, not representations.
"""
from bisect import bisect_left, bisect_right
from fractions import Fraction
import math

INF = math.inf


def as_q(x):
    """Coerce an int/str/Fraction to Fraction (floats are refused)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError(f"inexact value {x!r}")
    return Fraction(x)


def _check_increasing(times):
    for a, b in zip(times, times[1:]):
        if not a < b:
            raise ValueError(f"breakpoints not strictly increasing: {a} then {b}")


class PiecewiseLinear:
    """Continuous PWL function.

    Constant ``values[0]`` left of ``times[0]``, linear between breakpoints,
    and slope ``slope`` after the last breakpoint.
    """

    __slots__ = ("times", "values", "slope")

    def __init__(self, times, values, slope=0):
        times = [as_q(t) for t in times]
        values = [as_q(v) for v in values]
        if not times or len(times) != len(values):
            raise ValueError("need matching, nonempty times and values")
        _check_increasing(times)
        slope = as_q(slope)
        n = len(times)
        segs = [(values[i + 1] - values[i]) / (times[i + 1] - times[i]) for i in range(n - 1)]
        segs.append(slope)
        kt, kv = [], []
        before = Fraction(0)
        for i in range(n):
            if segs[i] != before:
                kt.append(times[i])
                kv.append(values[i])
            before = segs[i]
        if not kt:
            kt, kv = [Fraction(0)], [values[0]]
        self.times = tuple(kt)
        self.values = tuple(kv)
        self.slope = slope
        _check_increasing(self.times)

    # constructors
    @classmethod
    def constant(cls, c):
        return cls([0], [c], 0)

    @classmethod
    def ray(cls, t0, v0, slope):
        """Constant ``v0`` up to ``t0``, then slope ``slope``."""
        return cls([t0], [v0], slope)

    @classmethod
    def from_samples(cls, times, func, slope):
        ts = sorted(set(times))
        return cls(ts, [func(t) for t in ts], slope)

    # evaluation
    def _seg(self, i):
        if i >= len(self.times) - 1:
            return self.slope
        t, v = self.times, self.values
        return (v[i + 1] - v[i]) / (t[i + 1] - t[i])

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        t = as_q(t)
        ts = self.times
        if t <= ts[0]:
            return self.values[0]
        i = bisect_right(ts, t) - 1
        return self.values[i] + self._seg(i) * (t - ts[i])

    def slope_at(self, t):
        """Right derivative at ``t``."""
        i = bisect_right(self.times, as_q(t)) - 1
        return Fraction(0) if i < 0 else self._seg(i)

    def left_slope_at(self, t):
        i = bisect_left(self.times, as_q(t)) - 1
        return Fraction(0) if i < 0 else self._seg(i)

    @property
    def breakpoints(self):
        return self.times

    def is_constant(self):
        return len(self.times) == 1 and self.slope == 0

    def is_nondecreasing(self):
        return all(self._seg(i) >= 0 for i in range(len(self.times)))

    # arithmetic
    def _combine(self, other, op):
        if not isinstance(other, PiecewiseLinear):
            other = PiecewiseLinear.constant(other)
        ts = sorted(set(self.times) | set(other.times))
        return PiecewiseLinear(ts, [op(self.eval(t), other.eval(t)) for t in ts],
                               op(self.slope, other.slope))

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.scale(-1)

    def scale(self, k):
        k = as_q(k)
        return PiecewiseLinear(self.times, [k * v for v in self.values], k * self.slope)

    def shift(self, d):
        """``t -> f(t - d)``."""
        d = as_q(d)
        return PiecewiseLinear([t + d for t in self.times], self.values, self.slope)

    def derivative(self):
        """Right derivative as a PiecewiseConstant."""
        return PiecewiseConstant(0, self.times, [self._seg(i) for i in range(len(self.times))])

    # level sets
    def level_times(self, level):
        """Points strictly inside a segment (or the final ray) where f hits ``level``."""
        level = as_q(level)
        out = []
        ts, vs = self.times, self.values
        for i in range(len(ts) - 1):
            a, b = vs[i], vs[i + 1]
            if (a - level) * (b - level) < 0:
                out.append(ts[i] + (level - a) * (ts[i + 1] - ts[i]) / (b - a))
        if self.slope != 0:
            gap = level - vs[-1]
            if gap * self.slope > 0:
                out.append(ts[-1] + gap / self.slope)
        return out

    def first_crossing(self, level, start):
        """Least ``θ >= start`` with ``f(θ) >= level``, or None."""
        level = as_q(level)
        start = as_q(start)
        cur = self.eval(start)
        if cur >= level:
            return start
        a = start
        for b in self.times:
            if b <= a:
                continue
            fb = self.eval(b)
            if fb >= level:
                return a + (level - cur) * (b - a) / (fb - cur)
            a, cur = b, fb
        if self.slope > 0:
            return a + (level - cur) / self.slope
        return None

    def compose(self, g):
        """``self ∘ g`` for nondecreasing ``g``."""
        if not g.is_nondecreasing():
            raise ValueError("inner function of compose must be nondecreasing")
        cands = set(g.times)
        for b in self.times:
            cands.update(g.level_times(b))
        last = max(cands)
        final = self.slope_at(g.eval(last)) * g.slope
        return PiecewiseLinear.from_samples(cands, lambda t: self.eval(g.eval(t)), final)

    def __eq__(self, other):
        return (isinstance(other, PiecewiseLinear) and self.times == other.times
                and self.values == other.values and self.slope == other.slope)

    def __hash__(self):
        return hash((self.times, self.values, self.slope))

    def __repr__(self):
        pts = ", ".join(f"({t}, {v})" for t, v in zip(self.times, self.values))
        return f"PiecewiseLinear([{pts}], slope={self.slope})"


def compose_monotone(f, g):
    return f.compose(g)


def _min2(f, g):
    ts = sorted(set(f.times) | set(g.times))
    cands = set(ts)
    diff = [f.eval(t) - g.eval(t) for t in ts]
    for i in range(len(ts) - 1):
        da, db = diff[i], diff[i + 1]
        if da * db < 0:
            cands.add(ts[i] + da * (ts[i + 1] - ts[i]) / (da - db))
    ds = f.slope - g.slope
    if diff[-1] * ds < 0:
        cands.add(ts[-1] - diff[-1] / ds)
    last = max(cands)
    d_last = f.eval(last) - g.eval(last)
    if d_last < 0:
        final = f.slope
    elif d_last > 0:
        final = g.slope
    else:
        final = min(f.slope, g.slope)
    return PiecewiseLinear.from_samples(cands, lambda t: min(f.eval(t), g.eval(t)), final)


def pointwise_min(fs):
    fs = list(fs)
    if not fs:
        raise ValueError("pointwise_min of nothing")
    out = fs[0]
    for g in fs[1:]:
        out = _min2(out, g)
    return out


def pointwise_max(fs):
    return -pointwise_min([-f for f in fs])


class PiecewiseConstant:
    """Right-continuous step function.

    ``left`` for ``t < times[0]``, ``values[i]`` on ``[times[i], times[i+1])``
    and ``values[-1]`` from the last breakpoint on.
    """

    __slots__ = ("left", "times", "values")

    def __init__(self, left, times=(), values=()):
        left = as_q(left)
        times = [as_q(t) for t in times]
        values = [as_q(v) for v in values]
        if len(times) != len(values):
            raise ValueError("times and values differ in length")
        _check_increasing(times)
        kt, kv = [], []
        prev = left
        for t, v in zip(times, values):
            if v != prev:
                kt.append(t)
                kv.append(v)
            prev = v
        self.left = left
        self.times = tuple(kt)
        self.values = tuple(kv)

    @classmethod
    def constant(cls, c):
        return cls(c)

    @classmethod
    def from_pieces(cls, pieces, default=0):
        """Build from disjoint ``(start, end, value)`` pieces; ``end`` may be INF.

        Empty pieces (start == end) are ignored; elsewhere the value is ``default``.
        """
        default = as_q(default)
        pieces = sorted(((as_q(a), b if b == INF else as_q(b), as_q(v))
                         for a, b, v in pieces if a != b), key=lambda p: p[0])
        times, values = [], []
        prev_end = None
        for a, b, v in pieces:
            if b < a:
                raise ValueError(f"piece [{a}, {b}) is reversed")
            if prev_end is not None and a < prev_end:
                raise ValueError(f"piece starting at {a} overlaps previous piece")
            if prev_end is not None and a > prev_end:
                times.append(prev_end)
                values.append(default)
            times.append(a)
            values.append(v)
            prev_end = b
            if b == INF:
                break
        if prev_end is not None and prev_end != INF:
            times.append(prev_end)
            values.append(default)
        return cls(default, times, values)

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        i = bisect_right(self.times, as_q(t)) - 1
        return self.left if i < 0 else self.values[i]

    def left_limit(self, t):
        i = bisect_left(self.times, as_q(t)) - 1
        return self.left if i < 0 else self.values[i]

    @property
    def breakpoints(self):
        return self.times

    @property
    def final(self):
        return self.values[-1] if self.values else self.left

    def next_breakpoint(self, t):
        """First breakpoint strictly after ``t`` (INF if none)."""
        i = bisect_right(self.times, as_q(t))
        return self.times[i] if i < len(self.times) else INF

    def map(self, fn):
        return PiecewiseConstant(fn(self.left), self.times, [fn(v) for v in self.values])

    def _combine(self, other, op):
        if not isinstance(other, PiecewiseConstant):
            other = PiecewiseConstant(other)
        ts = sorted(set(self.times) | set(other.times))
        return PiecewiseConstant(op(self.left, other.left), ts,
                                 [op(self.eval(t), other.eval(t)) for t in ts])

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def minimum(self, other):
        return self._combine(other, min)

    def scale(self, k):
        k = as_q(k)
        return self.map(lambda v: k * v)

    def shift(self, d):
        d = as_q(d)
        return PiecewiseConstant(self.left, [t + d for t in self.times], self.values)

    def integral(self):
        """Antiderivative that is zero far to the left; requires ``left == 0``."""
        if self.left != 0:
            raise ValueError("integral needs a zero left tail")
        if not self.times:
            return PiecewiseLinear.constant(0)
        acc = Fraction(0)
        vals = [acc]
        for i in range(len(self.times) - 1):
            acc += self.values[i] * (self.times[i + 1] - self.times[i])
            vals.append(acc)
        return PiecewiseLinear(self.times, vals, self.values[-1])

    def __eq__(self, other):
        return (isinstance(other, PiecewiseConstant) and self.left == other.left
                and self.times == other.times and self.values == other.values)

    def __hash__(self):
        return hash((self.left, self.times, self.values))

    def __repr__(self):
        pts = ", ".join(f"[{t}: {v}]" for t, v in zip(self.times, self.values))
        return f"PiecewiseConstant(left={self.left}, {pts})"
