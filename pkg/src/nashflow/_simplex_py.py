"""Pure-Python exact simplex over :class:`fractions.Fraction`.

This is the reference backend. The compiled kernel in ``_simplex.pyx``
implements the same two-phase Bland-rule algorithm on GMP rationals and
must return identical results (same vertex, same status).
"""
from fractions import Fraction

_ZERO = Fraction(0)


def solve_lp(num_vars, rows, objective=None):
    """Solve ``max objective . x`` s.t. ``rows`` and ``x >= 0`` exactly.

    ``objective`` maps variable index to coefficient.

    ``rows`` is a sequence of ``(coeffs, sense, rhs)`` where ``coeffs`` maps
    variable index to a rational, ``sense`` is one of ``"<="``, ``">="``,
    ``"=="``. With ``objective=None`` only feasibility is decided.

    Returns ``(status, x)`` with status ``"optimal"``, ``"infeasible"`` or
    ``"unbounded"``; ``x`` is a list of Fractions (``None`` if infeasible).
    """
    m = len(rows)
    # column layout: originals | slacks | artificials | rhs
    n_slack = sum(1 for _, sense, _ in rows if sense != "==")
    art_rows = []
    norm = []
    for coeffs, sense, rhs in rows:
        rhs = Fraction(rhs)
        coeffs = {j: Fraction(a) for j, a in coeffs.items() if a}
        if rhs < 0:
            rhs = -rhs
            coeffs = {j: -a for j, a in coeffs.items()}
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        norm.append((coeffs, sense, rhs))
    n_art = sum(1 for _, sense, _ in norm if sense != "<=")
    width = num_vars + n_slack + n_art
    table = []
    basis = []
    s_col = num_vars
    a_col = num_vars + n_slack
    for i, (coeffs, sense, rhs) in enumerate(norm):
        row = [_ZERO] * (width + 1)
        for j, a in coeffs.items():
            row[j] = a
        row[width] = rhs
        if sense == "<=":
            row[s_col] = Fraction(1)
            basis.append(s_col)
            s_col += 1
        else:
            if sense == ">=":
                row[s_col] = Fraction(-1)
                s_col += 1
            row[a_col] = Fraction(1)
            basis.append(a_col)
            art_rows.append(i)
            a_col += 1
        table.append(row)

    first_art = num_vars + n_slack
    # phase 1: maximize -(sum of artificials)
    obj = [_ZERO] * (width + 1)
    for i in art_rows:
        row = table[i]
        for j in range(width + 1):
            if j < first_art or j == width:
                obj[j] -= row[j]
    _run(table, basis, obj, width, width)
    if obj[width] != 0:
        return "infeasible", None

    # drive zero-level artificials out of the basis
    i = 0
    while i < len(table):
        if basis[i] >= first_art:
            row = table[i]
            piv = next((j for j in range(first_art) if row[j] != 0), None)
            if piv is None:
                del table[i]
                del basis[i]
                continue
            _pivot(table, basis, obj, i, piv, width)
        i += 1

    if objective is None:
        return "optimal", _extract(table, basis, num_vars, width)

    # phase 2 on the original columns only; artificials are barred from entering
    obj = [_ZERO] * (width + 1)
    for j, cj in objective.items():
        obj[j] = -Fraction(cj)
    for i, b in enumerate(basis):
        cb = -obj[b]
        if cb:
            row = table[i]
            for j in range(width + 1):
                if row[j]:
                    obj[j] += cb * row[j]
    status = _run(table, basis, obj, width, first_art)
    if status == "unbounded":
        return "unbounded", None
    return "optimal", _extract(table, basis, num_vars, width)


def _extract(table, basis, num_vars, width):
    x = [_ZERO] * num_vars
    for i, b in enumerate(basis):
        if b < num_vars:
            x[b] = table[i][width]
    return x


def _run(table, basis, obj, width, enter_limit):
    while True:
        col = -1
        for j in range(enter_limit):
            if obj[j] < 0:
                col = j
                break
        if col < 0:
            return "optimal"
        best = None
        row_idx = -1
        for i, row in enumerate(table):
            a = row[col]
            if a > 0:
                ratio = row[width] / a
                if (best is None or ratio < best
                        or (ratio == best and basis[i] < basis[row_idx])):
                    best = ratio
                    row_idx = i
        if row_idx < 0:
            return "unbounded"
        _pivot(table, basis, obj, row_idx, col, width)


def _pivot(table, basis, obj, r, c, width):
    prow = table[r]
    p = prow[c]
    if p != 1:
        inv = 1 / p
        for j in range(width + 1):
            if prow[j]:
                prow[j] *= inv
    nz = [j for j in range(width + 1) if prow[j]]
    for i, row in enumerate(table):
        if i != r:
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    f = obj[c]
    if f:
        for j in nz:
            obj[j] -= f * prow[j]
    basis[r] = c


class IncrementalLP:
    """Feasibility dictionary that accepts new rows (dual simplex, Bland's rule).

    Variables are ``x >= 0``. Row ``i`` expresses the basic variable
    ``basic[i]`` as ``d[i][0] + sum_k d[i][k+1] * nonbasic[k]``; the point with
    every nonbasic variable at zero is feasible iff all ``d[i][0] >= 0``.
    Variable ids ``0..n-1`` are structural, larger ids are row slacks.
    Equality rows pivot their slack out and drop its column, so they cost
    one degree of freedom instead of two rows.
    """

    def __init__(self, num_vars):
        self.n = num_vars
        self.rows = []
        self.basic = []
        self.nonbasic = list(range(num_vars))
        self.next_id = num_vars
        self.feasible = True
        self._reindex()

    def copy(self):
        new = IncrementalLP.__new__(IncrementalLP)
        new.n = self.n
        new.rows = [r[:] for r in self.rows]
        new.basic = self.basic[:]
        new.nonbasic = self.nonbasic[:]
        new.pos = self.pos[:]
        new.next_id = self.next_id
        new.feasible = self.feasible
        return new

    def _reindex(self):
        # pos[j] >= 0: row of basic structural j; -(k+1): nonbasic column k;
        # None: structural variable pinned at zero (its column was dropped)
        pos = [None] * self.n
        for i, b in enumerate(self.basic):
            if b < self.n:
                pos[b] = i
        for k, b in enumerate(self.nonbasic):
            if b < self.n:
                pos[b] = -(k + 1)
        self.pos = pos

    def _append_le(self, coeffs, rhs):
        w = len(self.nonbasic) + 1
        row = [Fraction(rhs)] + [_ZERO] * (w - 1)
        for j, a in coeffs.items():
            if not a:
                continue
            a = Fraction(a)
            p = self.pos[j]
            if p is None:
                continue
            if p < 0:
                row[-p] -= a
            else:
                src = self.rows[p]
                for k in range(w):
                    if src[k]:
                        row[k] -= a * src[k]
        self.rows.append(row)
        self.basic.append(self.next_id)
        self.next_id += 1

    def _pin_last(self):
        """Force the slack of the newest row to zero; False if impossible."""
        r = len(self.rows) - 1
        row = self.rows[r]
        k = -1
        for c in range(len(self.nonbasic)):
            if row[c + 1] and (k < 0 or self.nonbasic[c] < self.nonbasic[k]):
                k = c
        if k < 0:
            del self.rows[r]
            del self.basic[r]
            return row[0] == 0
        self._pivot(r, k)
        for row in self.rows:
            del row[k + 1]
        del self.nonbasic[k]
        self._reindex()
        return True

    def add_rows(self, rows):
        """Add ``(coeffs, sense, rhs)`` rows; return whether still feasible."""
        if not self.feasible:
            return False
        for coeffs, sense, rhs in rows:
            if sense == ">=":
                self._append_le({j: -Fraction(a) for j, a in coeffs.items()}, -Fraction(rhs))
            else:
                self._append_le(coeffs, rhs)
                if sense == "==" and not self._pin_last():
                    self.feasible = False
                    return False
        self.feasible = self._restore()
        return self.feasible

    def _restore(self):
        rows = self.rows
        while True:
            r = -1
            for i, row in enumerate(rows):
                if row[0] < 0 and (r < 0 or self.basic[i] < self.basic[r]):
                    r = i
            if r < 0:
                return True
            k = -1
            prow = rows[r]
            for c in range(len(self.nonbasic)):
                if prow[c + 1] > 0 and (k < 0 or self.nonbasic[c] < self.nonbasic[k]):
                    k = c
            if k < 0:
                return False
            self._pivot(r, k)
            self._reindex()

    def _pivot(self, r, k):
        rows = self.rows
        prow = rows[r]
        inv = 1 / prow[k + 1]
        new = [-v * inv for v in prow]
        new[k + 1] = inv
        rows[r] = new
        nz = [c for c in range(len(new)) if new[c]]
        for i, row in enumerate(rows):
            if i != r:
                f = row[k + 1]
                if f:
                    row[k + 1] = _ZERO
                    for c in nz:
                        row[c] += f * new[c]
        self.basic[r], self.nonbasic[k] = self.nonbasic[k], self.basic[r]

    def point(self):
        x = [_ZERO] * self.n
        for i, b in enumerate(self.basic):
            if b < self.n:
                x[b] = self.rows[i][0]
        return x
