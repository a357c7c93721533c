"""Static SVG line charts of labels, queue lengths or arc loads.

Every plotted function is piecewise linear, so each series is drawn
exactly as the polyline through its breakpoints.
"""
from fractions import Fraction
from xml.sax.saxutils import escape

from .pwl import INF

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=56, right=120, top=24, bottom=40)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
          "#7f7f7f")


def series(traj, what):
    """``(name, PiecewiseLinear)`` pairs for ``labels``, ``queues`` or ``loads``."""
    net = traj.net
    if what == "labels":
        return [(str(v), traj.labels[v]) for v in net.nodes]
    out = []
    for e, a in enumerate(net.arcs):
        if what == "queues":
            f = traj.F_in[e].shift(a.transit) - traj.F_out[e]
        elif what == "loads":
            f = traj.F_in[e] - traj.F_out[e]
        else:
            raise ValueError(f"unknown plot kind {what!r}")
        out.append((net.arc_name(e), f))
    return out


def default_horizon(traj, fns):
    last = Fraction(0)
    for _, f in fns:
        last = max([last] + list(f.times))
    if traj.end != INF:
        last = max(last, traj.end)
    return last * Fraction(5, 4) if last > 0 else Fraction(1)


def _fmt(x):
    return f"{float(x):.2f}".rstrip("0").rstrip(".")


def _ticks(lo, hi, n=5):
    step = (hi - lo) / n
    return [lo + step * k for k in range(n + 1)]


def render_svg(traj, what="labels", horizon=None):
    fns = series(traj, what)
    h = Fraction(horizon) if horizon is not None else default_horizon(traj, fns)
    polys = []
    ymax = Fraction(0)
    for name, f in fns:
        xs = sorted({Fraction(0), h} | {t for t in f.times if 0 < t < h})
        pts = [(x, f.eval(x)) for x in xs]
        ymax = max([ymax] + [y for _, y in pts])
        polys.append((name, pts))
    ymax = ymax if ymax > 0 else Fraction(1)
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + float(x / h) * pw

    def sy(y):
        return MARGIN["top"] + ph - float(y / ymax) * ph

    title = {"labels": "earliest arrival labels", "queues": "queue lengths",
             "loads": "arc loads"}[what]
    xlab = "source time" if what == "labels" else "arc time"
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH / 2:.1f}" y="16" text-anchor="middle" font-size="13">'
           f'{escape(title)}</text>']
    x0, y0 = MARGIN["left"], MARGIN["top"] + ph
    out.append(f'<path d="M{x0} {MARGIN["top"]}V{y0}H{x0 + pw}" stroke="black" fill="none"/>')
    for t in _ticks(Fraction(0), h):
        out.append(f'<text x="{sx(t):.1f}" y="{y0 + 16}" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(Fraction(0), ymax):
        out.append(f'<text x="{x0 - 6}" y="{sy(t) + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{x0 + pw / 2:.1f}" y="{HEIGHT - 6}" text-anchor="middle">{xlab}</text>')
    for k, (name, pts) in enumerate(polys):
        color = COLORS[k % len(COLORS)]
        d = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline points="{d}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        ly = MARGIN["top"] + 14 * k + 8
        lx = WIDTH - MARGIN["right"] + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{lx + 24}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
