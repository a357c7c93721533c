# cython: language_level=3, boundscheck=False, wraparound=False
"""Exact two-phase simplex on GMP rationals.

Mirrors ``_simplex_py.solve_lp`` pivot for pivot (Bland's rule, same
tie-breaks), so both backends return the same vertex.
"""
from fractions import Fraction

from libc.stdlib cimport malloc, free


cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef struct __mpq_struct:
        pass
    ctypedef __mpz_struct *mpz_ptr
    ctypedef __mpq_struct *mpq_ptr

    void mpq_init(mpq_ptr)
    void mpq_clear(mpq_ptr)
    void mpq_set(mpq_ptr, mpq_ptr)
    void mpq_set_si(mpq_ptr, long, unsigned long)
    void mpq_canonicalize(mpq_ptr)
    void mpq_mul(mpq_ptr, mpq_ptr, mpq_ptr)
    void mpq_sub(mpq_ptr, mpq_ptr, mpq_ptr)
    void mpq_add(mpq_ptr, mpq_ptr, mpq_ptr)
    void mpq_neg(mpq_ptr, mpq_ptr)
    void mpq_swap(mpq_ptr, mpq_ptr)
    void mpq_div(mpq_ptr, mpq_ptr, mpq_ptr)
    void mpq_inv(mpq_ptr, mpq_ptr)
    int mpq_cmp(mpq_ptr, mpq_ptr)
    int mpq_sgn(mpq_ptr)
    int mpq_cmp_si(mpq_ptr, long, unsigned long)
    mpz_ptr mpq_numref(mpq_ptr)
    mpz_ptr mpq_denref(mpq_ptr)
    int mpz_set_str(mpz_ptr, const char *, int)
    char *mpz_get_str(char *, int, mpz_ptr)
    int mpz_fits_slong_p(mpz_ptr)
    long mpz_get_si(mpz_ptr)


cdef extern from *:
    """
    #include <stdlib.h>
    static void nf_free_str(char *s) { free(s); }
    """
    void nf_free_str(char *s)


cdef long _LIM = 1 << 62


cdef void _set_frac(mpq_ptr q, object value):
    cdef object num = value.numerator
    cdef object den = value.denominator
    if -_LIM < num < _LIM and den < _LIM:
        mpq_set_si(q, <long>num, <unsigned long>den)
        return
    mpz_set_str(mpq_numref(q), format(num, "x").encode(), 16)
    mpz_set_str(mpq_denref(q), format(den, "x").encode(), 16)
    mpq_canonicalize(q)


cdef object _z_to_int(mpz_ptr z):
    cdef char *s
    if mpz_fits_slong_p(z):
        return mpz_get_si(z)
    s = mpz_get_str(NULL, 16, z)
    try:
        return int(s.decode(), 16)
    finally:
        nf_free_str(s)


cdef object _get_frac(mpq_ptr q):
    return Fraction(_z_to_int(mpq_numref(q)), _z_to_int(mpq_denref(q)))


cdef class _Tableau:
    cdef __mpq_struct *cells
    cdef __mpq_struct *obj
    cdef int rows
    cdef int alloc_rows
    cdef int cols          # width + 1 (rhs last)
    cdef int *basis
    cdef __mpq_struct tmp
    cdef __mpq_struct tmp2
    cdef __mpq_struct best

    def __cinit__(self, int rows, int cols):
        cdef int k
        self.rows = rows
        self.alloc_rows = rows
        self.cols = cols
        self.cells = <__mpq_struct *>malloc(sizeof(__mpq_struct) * max(rows * cols, 1))
        self.obj = <__mpq_struct *>malloc(sizeof(__mpq_struct) * cols)
        self.basis = <int *>malloc(sizeof(int) * max(rows, 1))
        for k in range(rows * cols):
            mpq_init(&self.cells[k])
        for k in range(cols):
            mpq_init(&self.obj[k])
        mpq_init(&self.tmp)
        mpq_init(&self.tmp2)
        mpq_init(&self.best)

    def __dealloc__(self):
        cdef int k
        if self.cells != NULL:
            for k in range(self.alloc_rows * self.cols):
                mpq_clear(&self.cells[k])
            free(self.cells)
        if self.obj != NULL:
            for k in range(self.cols):
                mpq_clear(&self.obj[k])
            free(self.obj)
        if self.basis != NULL:
            free(self.basis)
        mpq_clear(&self.tmp)
        mpq_clear(&self.tmp2)
        mpq_clear(&self.best)

    cdef inline mpq_ptr at(self, int i, int j):
        return &self.cells[i * self.cols + j]

    cdef void pivot(self, int r, int c):
        cdef int i, j
        cdef int width = self.cols - 1
        cdef mpq_ptr p = self.at(r, c)
        if mpq_cmp_si(p, 1, 1) != 0:
            mpq_inv(&self.tmp, p)
            for j in range(width + 1):
                if mpq_sgn(self.at(r, j)) != 0:
                    mpq_mul(self.at(r, j), self.at(r, j), &self.tmp)
        for i in range(self.rows):
            if i != r and mpq_sgn(self.at(i, c)) != 0:
                mpq_set(&self.tmp2, self.at(i, c))
                for j in range(width + 1):
                    if mpq_sgn(self.at(r, j)) != 0:
                        mpq_mul(&self.tmp, &self.tmp2, self.at(r, j))
                        mpq_sub(self.at(i, j), self.at(i, j), &self.tmp)
        if mpq_sgn(&self.obj[c]) != 0:
            mpq_set(&self.tmp2, &self.obj[c])
            for j in range(width + 1):
                if mpq_sgn(self.at(r, j)) != 0:
                    mpq_mul(&self.tmp, &self.tmp2, self.at(r, j))
                    mpq_sub(&self.obj[j], &self.obj[j], &self.tmp)
        self.basis[r] = c

    cdef int run(self, int enter_limit):
        """Return 0 for optimal, 1 for unbounded."""
        cdef int i, j, col, row_idx
        cdef int width = self.cols - 1
        cdef int have_best
        cdef int cmp
        while True:
            col = -1
            for j in range(enter_limit):
                if mpq_sgn(&self.obj[j]) < 0:
                    col = j
                    break
            if col < 0:
                return 0
            row_idx = -1
            have_best = 0
            for i in range(self.rows):
                if mpq_sgn(self.at(i, col)) > 0:
                    mpq_div(&self.tmp, self.at(i, width), self.at(i, col))
                    if not have_best:
                        cmp = -1
                    else:
                        cmp = mpq_cmp(&self.tmp, &self.best)
                    if cmp < 0 or (cmp == 0 and self.basis[i] < self.basis[row_idx]):
                        mpq_set(&self.best, &self.tmp)
                        have_best = 1
                        row_idx = i
            if row_idx < 0:
                return 1
            self.pivot(row_idx, col)

    cdef void drop_row(self, int r):
        cdef int i, j
        for i in range(r, self.rows - 1):
            for j in range(self.cols):
                mpq_set(self.at(i, j), self.at(i + 1, j))
            self.basis[i] = self.basis[i + 1]
        self.rows -= 1


def solve_lp(int num_vars, rows, objective=None):
    """GMP-backed twin of ``_simplex_py.solve_lp``."""
    cdef int m = len(rows)
    cdef int n_slack = 0
    cdef int n_art = 0
    cdef int i, j, width, s_col, a_col, first_art, b
    cdef _Tableau tab
    norm = []
    art_rows = []
    for coeffs, sense, rhs in rows:
        rhs = Fraction(rhs)
        coeffs = {k: Fraction(a) for k, a in coeffs.items() if a}
        if rhs < 0:
            rhs = -rhs
            coeffs = {k: -a for k, a in coeffs.items()}
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        norm.append((coeffs, sense, rhs))
        if sense != "==":
            n_slack += 1
        if sense != "<=":
            n_art += 1
    width = num_vars + n_slack + n_art
    tab = _Tableau(m, width + 1)
    s_col = num_vars
    a_col = num_vars + n_slack
    for i in range(m):
        coeffs, sense, rhs = norm[i]
        for k, a in coeffs.items():
            _set_frac(tab.at(i, k), a)
        _set_frac(tab.at(i, width), rhs)
        if sense == "<=":
            mpq_set_si(tab.at(i, s_col), 1, 1)
            tab.basis[i] = s_col
            s_col += 1
        else:
            if sense == ">=":
                mpq_set_si(tab.at(i, s_col), -1, 1)
                s_col += 1
            mpq_set_si(tab.at(i, a_col), 1, 1)
            tab.basis[i] = a_col
            art_rows.append(i)
            a_col += 1

    first_art = num_vars + n_slack
    for i in art_rows:
        for j in range(width + 1):
            if j < first_art or j == width:
                mpq_sub(&tab.obj[j], &tab.obj[j], tab.at(i, j))
    tab.run(width)
    if mpq_sgn(&tab.obj[width]) != 0:
        return "infeasible", None

    i = 0
    while i < tab.rows:
        if tab.basis[i] >= first_art:
            piv = -1
            for j in range(first_art):
                if mpq_sgn(tab.at(i, j)) != 0:
                    piv = j
                    break
            if piv < 0:
                tab.drop_row(i)
                continue
            tab.pivot(i, piv)
        i += 1

    if objective is not None:
        for j in range(width + 1):
            mpq_set_si(&tab.obj[j], 0, 1)
        for k, cj in objective.items():
            _set_frac(&tab.obj[k], -Fraction(cj))
        for i in range(tab.rows):
            b = tab.basis[i]
            if mpq_sgn(&tab.obj[b]) != 0:
                # price out the basic column: obj -= obj[b] * row
                mpq_set(&tab.tmp2, &tab.obj[b])
                for j in range(width + 1):
                    if mpq_sgn(tab.at(i, j)) != 0:
                        mpq_mul(&tab.tmp, &tab.tmp2, tab.at(i, j))
                        mpq_sub(&tab.obj[j], &tab.obj[j], &tab.tmp)
        if tab.run(first_art) == 1:
                return "unbounded", None

    x = [Fraction(0)] * num_vars
    for i in range(tab.rows):
        b = tab.basis[i]
        if b < num_vars:
            x[b] = _get_frac(tab.at(i, width))
    return "optimal", x


cdef class IncrementalLP:
    """GMP twin of ``_simplex_py.IncrementalLP`` (same pivots, same answers)."""
    cdef int n
    cdef int m
    cdef int w                 # live columns including the constant
    cdef int stride            # allocated columns per row (n + 1)
    cdef int cap
    cdef __mpq_struct *d
    cdef int *basic
    cdef int *nonbasic
    cdef int *pos              # structural var -> row (>= 0) or -(col + 1)
    cdef int next_id
    cdef public bint feasible
    cdef __mpq_struct tmp
    cdef __mpq_struct fac

    def __cinit__(self, int num_vars, int capacity=16):
        cdef int k
        self.n = num_vars
        self.m = 0
        self.w = num_vars + 1
        self.stride = num_vars + 1
        self.cap = max(capacity, 1)
        self.d = <__mpq_struct *>malloc(sizeof(__mpq_struct) * self.cap * self.stride)
        for k in range(self.cap * self.stride):
            mpq_init(&self.d[k])
        self.basic = <int *>malloc(sizeof(int) * self.cap)
        self.nonbasic = <int *>malloc(sizeof(int) * max(num_vars, 1))
        self.pos = <int *>malloc(sizeof(int) * max(num_vars, 1))
        for k in range(num_vars):
            self.nonbasic[k] = k
            self.pos[k] = -(k + 1)
        self.next_id = num_vars
        self.feasible = True
        mpq_init(&self.tmp)
        mpq_init(&self.fac)

    def __dealloc__(self):
        cdef int k
        if self.d != NULL:
            for k in range(self.cap * self.stride):
                mpq_clear(&self.d[k])
            free(self.d)
        free(self.basic)
        free(self.nonbasic)
        free(self.pos)
        mpq_clear(&self.tmp)
        mpq_clear(&self.fac)

    cdef inline mpq_ptr at(self, int i, int c):
        return &self.d[i * self.stride + c]

    cdef void _grow(self):
        cdef int newcap = self.cap * 2
        cdef __mpq_struct *nd = <__mpq_struct *>malloc(sizeof(__mpq_struct) * newcap * self.stride)
        cdef int *nb = <int *>malloc(sizeof(int) * newcap)
        cdef int k
        for k in range(newcap * self.stride):
            mpq_init(&nd[k])
        for k in range(self.m * self.stride):
            mpq_swap(&nd[k], &self.d[k])
        for k in range(self.cap * self.stride):
            mpq_clear(&self.d[k])
        for k in range(self.m):
            nb[k] = self.basic[k]
        free(self.d)
        free(self.basic)
        self.d = nd
        self.basic = nb
        self.cap = newcap

    cdef void _reindex(self):
        cdef int k
        for k in range(self.m):
            if self.basic[k] < self.n:
                self.pos[self.basic[k]] = k
        for k in range(self.w - 1):
            if self.nonbasic[k] < self.n:
                self.pos[self.nonbasic[k]] = -(k + 1)

    def copy(self):
        cdef IncrementalLP new = IncrementalLP(self.n, self.m + 8)
        cdef int i, c
        for i in range(self.m):
            for c in range(self.w):
                mpq_set(new.at(i, c), self.at(i, c))
            new.basic[i] = self.basic[i]
        for c in range(self.w - 1):
            new.nonbasic[c] = self.nonbasic[c]
        for c in range(self.n):
            new.pos[c] = self.pos[c]
        new.m = self.m
        new.w = self.w
        new.next_id = self.next_id
        new.feasible = self.feasible
        return new

    cdef void _append_le(self, coeffs, object rhs, int negate):
        cdef int c, p, j
        cdef mpq_ptr row
        cdef mpq_ptr src
        if self.m == self.cap:
            self._grow()
        row = self.at(self.m, 0)
        for c in range(self.w):
            mpq_set_si(&row[c], 0, 1)
        _set_frac(&row[0], -rhs if negate else rhs)
        for j, a in coeffs.items():
            if not a:
                continue
            _set_frac(&self.fac, -a if negate else a)
            p = self.pos[j]
            if p < 0:
                mpq_sub(&row[-p], &row[-p], &self.fac)
            else:
                src = self.at(p, 0)
                for c in range(self.w):
                    if mpq_sgn(&src[c]) != 0:
                        mpq_mul(&self.tmp, &self.fac, &src[c])
                        mpq_sub(&row[c], &row[c], &self.tmp)
        self.basic[self.m] = self.next_id
        self.next_id += 1
        self.m += 1

    cdef bint _pin_last(self):
        cdef int r = self.m - 1
        cdef int k = -1
        cdef int c, i
        cdef bint ok
        for c in range(self.w - 1):
            if mpq_sgn(self.at(r, c + 1)) != 0 and (k < 0 or self.nonbasic[c] < self.nonbasic[k]):
                k = c
        if k < 0:
            ok = mpq_sgn(self.at(r, 0)) == 0
            self.m -= 1
            return ok
        self._pivot(r, k)
        for i in range(self.m):
            for c in range(k + 1, self.w - 1):
                mpq_swap(self.at(i, c), self.at(i, c + 1))
        for c in range(k, self.w - 2):
            self.nonbasic[c] = self.nonbasic[c + 1]
        self.w -= 1
        self._reindex()
        return True

    def add_rows(self, rows):
        if not self.feasible:
            return False
        for coeffs, sense, rhs in rows:
            rhs = Fraction(rhs)
            coeffs = {j: Fraction(a) for j, a in coeffs.items()}
            if sense == ">=":
                self._append_le(coeffs, rhs, 1)
            else:
                self._append_le(coeffs, rhs, 0)
                if sense == "==" and not self._pin_last():
                    self.feasible = False
                    return False
        self.feasible = self._restore()
        return self.feasible

    cdef bint _restore(self):
        cdef int i, c, r, k
        while True:
            r = -1
            for i in range(self.m):
                if mpq_sgn(self.at(i, 0)) < 0 and (r < 0 or self.basic[i] < self.basic[r]):
                    r = i
            if r < 0:
                return True
            k = -1
            for c in range(self.w - 1):
                if mpq_sgn(self.at(r, c + 1)) > 0 and (k < 0 or self.nonbasic[c] < self.nonbasic[k]):
                    k = c
            if k < 0:
                return False
            self._pivot(r, k)
            self._reindex()

    cdef void _pivot(self, int r, int k):
        cdef int i, c, leaving
        cdef mpq_ptr prow = self.at(r, 0)
        cdef mpq_ptr row
        mpq_inv(&self.fac, &prow[k + 1])
        for c in range(self.w):
            if c == k + 1:
                mpq_set(&prow[c], &self.fac)
            elif mpq_sgn(&prow[c]) != 0:
                mpq_mul(&prow[c], &prow[c], &self.fac)
                mpq_neg(&prow[c], &prow[c])
        for i in range(self.m):
            if i == r:
                continue
            row = self.at(i, 0)
            if mpq_sgn(&row[k + 1]) != 0:
                mpq_set(&self.fac, &row[k + 1])
                mpq_set_si(&row[k + 1], 0, 1)
                for c in range(self.w):
                    if mpq_sgn(&prow[c]) != 0:
                        mpq_mul(&self.tmp, &self.fac, &prow[c])
                        mpq_add(&row[c], &row[c], &self.tmp)
        leaving = self.basic[r]
        self.basic[r] = self.nonbasic[k]
        self.nonbasic[k] = leaving

    def point(self):
        x = [Fraction(0)] * self.n
        for i in range(self.m):
            if self.basic[i] < self.n:
                x[self.basic[i]] = _get_frac(self.at(i, 0))
        return x
