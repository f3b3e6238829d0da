# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Mamdani kernel. Same contract as ``_inference_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport NAN
from libc.stdlib cimport malloc, free, qsort

cnp.import_array()

BACKEND = "cython"

cdef enum:
    MAX_TERMS = 64
    MAX_KNOTS = 6 * MAX_TERMS + 2
    MAX_CUTS = 2 + MAX_TERMS * (MAX_TERMS - 1) // 2


cdef inline double _degree(double a, double b, double c, double d, double x) nogil:
    if b <= x <= c:
        return 1.0
    if x <= a or x >= d:
        return 0.0
    if x < b:
        return (x - a) / (b - a)
    return (d - x) / (d - c)


def degree(double a, double b, double c, double d, double x):
    return _degree(a, b, c, d, x)


cdef int _cmp_double(const void *p, const void *q) noexcept nogil:
    cdef double u = (<const double *>p)[0]
    cdef double v = (<const double *>q)[0]
    if u < v:
        return -1
    if u > v:
        return 1
    return 0


cdef inline void _piece(const double[:] p, double level, double x0, double x1,
                        double *y0, double *y1) noexcept nogil:
    cdef double a = p[0], b = p[1], c = p[2], d = p[3]
    cdef double m = 0.5 * (x0 + x1)
    cdef double u, v
    if m <= a or m >= d:
        y0[0] = 0.0
        y1[0] = 0.0
        return
    if b <= m <= c:
        y0[0] = level
        y1[0] = level
        return
    if m < b:
        u = (x0 - a) / (b - a)
        v = (x1 - a) / (b - a)
    else:
        u = (d - x0) / (d - c)
        v = (d - x1) / (d - c)
    y0[0] = u if u < level else level
    y1[0] = v if v < level else level


cdef int _centroid(const double[:, :] params, const double *levels, int nt,
                   double lo, double hi, double *area, double *moment) noexcept nogil:
    cdef double knots[MAX_KNOTS]
    cdef double cuts[MAX_CUTS]
    cdef double ly0[MAX_TERMS]
    cdef double ly1[MAX_TERMS]
    cdef int act[MAX_TERMS]
    cdef int na = 0, nk = 0, nc, i, j, k, q
    cdef double a, b, c, d, h, x0, x1, w, g0, g1, u0, u1, du, t0, t1, v0, v1, s
    cdef double corner[4]
    area[0] = 0.0
    moment[0] = 0.0
    if hi <= lo:
        return 0
    for i in range(nt):
        if levels[i] > 0.0:
            act[na] = i
            na += 1
    if na == 0:
        return 0

    knots[nk] = lo
    nk += 1
    knots[nk] = hi
    nk += 1
    for k in range(na):
        i = act[k]
        a = params[i, 0]
        b = params[i, 1]
        c = params[i, 2]
        d = params[i, 3]
        h = levels[i]
        corner[0] = a
        corner[1] = b
        corner[2] = c
        corner[3] = d
        for j in range(4):
            if lo <= corner[j] <= hi:
                knots[nk] = corner[j]
                nk += 1
        if h < 1.0:
            if b > a:
                s = a + h * (b - a)
                if lo <= s <= hi:
                    knots[nk] = s
                    nk += 1
            if d > c:
                s = d - h * (d - c)
                if lo <= s <= hi:
                    knots[nk] = s
                    nk += 1
    qsort(knots, nk, sizeof(double), _cmp_double)

    for q in range(nk - 1):
        x0 = knots[q]
        x1 = knots[q + 1]
        if x1 <= x0:
            continue
        for k in range(na):
            i = act[k]
            _piece(params[i], levels[i], x0, x1, &ly0[k], &ly1[k])
        nc = 0
        cuts[nc] = x0
        nc += 1
        cuts[nc] = x1
        nc += 1
        for i in range(na):
            for j in range(i + 1, na):
                g0 = ly0[i] - ly0[j]
                g1 = ly1[i] - ly1[j]
                if (g0 < 0.0 < g1) or (g1 < 0.0 < g0):
                    cuts[nc] = x0 + g0 / (g0 - g1) * (x1 - x0)
                    nc += 1
        if nc > 2:
            qsort(cuts, nc, sizeof(double), _cmp_double)
        w = x1 - x0
        for j in range(nc - 1):
            u0 = cuts[j]
            u1 = cuts[j + 1]
            du = u1 - u0
            if du <= 0.0:
                continue
            t0 = (u0 - x0) / w
            t1 = (u1 - x0) / w
            v0 = ly0[0] + t0 * (ly1[0] - ly0[0])
            v1 = ly0[0] + t1 * (ly1[0] - ly0[0])
            for k in range(1, na):
                s = ly0[k] + t0 * (ly1[k] - ly0[k])
                if s > v0:
                    v0 = s
                s = ly0[k] + t1 * (ly1[k] - ly0[k])
                if s > v1:
                    v1 = s
            area[0] += 0.5 * du * (v0 + v1)
            moment[0] += du * (u0 * (2.0 * v0 + v1) + u1 * (v0 + 2.0 * v1)) / 6.0
    return 0


def clipped_centroid(out_params, levels, double lo, double hi):
    cdef double[:, :] p = np.ascontiguousarray(out_params, dtype=np.float64)
    cdef double[:] lv = np.ascontiguousarray(levels, dtype=np.float64)
    cdef double area, moment
    if p.shape[0] > MAX_TERMS:
        raise ValueError(f"at most {MAX_TERMS} output terms supported")
    if lv.shape[0] != p.shape[0]:
        raise ValueError("one level per output term required")
    if lv.shape[0] == 0:
        return 0.0, 0.0
    _centroid(p, &lv[0], <int>p.shape[0], lo, hi, &area, &moment)
    return area, moment


cdef class Model:
    cdef double[:, :, :] _in
    cdef int[:] _nterms
    cdef double[:] _lo
    cdef double[:] _hi
    cdef int[:, :] _ante
    cdef int[:] _cons
    cdef double[:, :] _out
    cdef double _out_lo, _out_hi
    cdef int _nv, _nr, _no, _tmax

    def __init__(self, in_params, in_nterms, in_lo, in_hi, rule_ante, rule_cons,
                 out_params, double out_lo, double out_hi):
        self._in = np.ascontiguousarray(in_params, dtype=np.float64)
        self._nterms = np.ascontiguousarray(in_nterms, dtype=np.intc)
        self._lo = np.ascontiguousarray(in_lo, dtype=np.float64)
        self._hi = np.ascontiguousarray(in_hi, dtype=np.float64)
        self._ante = np.ascontiguousarray(rule_ante, dtype=np.intc).reshape(-1, self._in.shape[0])
        self._cons = np.ascontiguousarray(rule_cons, dtype=np.intc)
        self._out = np.ascontiguousarray(out_params, dtype=np.float64)
        self._out_lo = out_lo
        self._out_hi = out_hi
        self._nv = <int>self._in.shape[0]
        self._tmax = <int>self._in.shape[1]
        self._nr = <int>self._cons.shape[0]
        self._no = <int>self._out.shape[0]
        if self._tmax > MAX_TERMS or self._no > MAX_TERMS:
            raise ValueError(f"at most {MAX_TERMS} terms per variable supported")

    @property
    def n_inputs(self):
        return self._nv

    cdef void _levels(self, const double *x, double *deg, double *levels) noexcept nogil:
        cdef int v, t, r
        cdef double xv, act, dv
        for v in range(self._nv):
            xv = x[v]
            if xv < self._lo[v]:
                xv = self._lo[v]
            elif xv > self._hi[v]:
                xv = self._hi[v]
            for t in range(self._nterms[v]):
                deg[v * self._tmax + t] = _degree(
                    self._in[v, t, 0], self._in[v, t, 1], self._in[v, t, 2], self._in[v, t, 3], xv
                )
        for t in range(self._no):
            levels[t] = 0.0
        for r in range(self._nr):
            act = 1.0
            for v in range(self._nv):
                t = self._ante[r, v]
                if t >= 0:
                    dv = deg[v * self._tmax + t]
                    if dv < act:
                        act = dv
            if act > levels[self._cons[r]]:
                levels[self._cons[r]] = act

    cdef double _infer(self, const double *x, double *deg, double *levels) noexcept nogil:
        cdef double area, moment
        self._levels(x, deg, levels)
        _centroid(self._out, levels, self._no, self._out_lo, self._out_hi, &area, &moment)
        if area <= 0.0:
            return NAN
        return moment / area

    def levels(self, values):
        cdef double[:] x = np.ascontiguousarray(values, dtype=np.float64)
        cdef double[:] deg = np.zeros(max(1, self._nv * self._tmax))
        cdef double[:] lv = np.zeros(max(1, self._no))
        if x.shape[0] != self._nv:
            raise ValueError(f"expected {self._nv} inputs, got {x.shape[0]}")
        self._levels(&x[0], &deg[0], &lv[0])
        return [lv[t] for t in range(self._no)]

    def infer(self, values):
        cdef double[:] x = np.ascontiguousarray(values, dtype=np.float64)
        cdef double *deg
        cdef double *lv
        cdef double out
        if x.shape[0] != self._nv:
            raise ValueError(f"expected {self._nv} inputs, got {x.shape[0]}")
        deg = <double *>malloc(sizeof(double) * (self._nv * self._tmax + 1))
        lv = <double *>malloc(sizeof(double) * (self._no + 1))
        try:
            out = self._infer(&x[0], deg, lv)
        finally:
            free(deg)
            free(lv)
        return out

    def infer_batch(self, X):
        arr = np.ascontiguousarray(X, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != self._nv:
            raise ValueError(f"expected an (N, {self._nv}) array")
        cdef double[:, :] x = arr
        cdef Py_ssize_t i, n
        cdef double *deg
        cdef double *lv
        n = x.shape[0]
        out = np.empty(n, dtype=np.float64)
        cdef double[:] o = out
        deg = <double *>malloc(sizeof(double) * (self._nv * self._tmax + 1))
        lv = <double *>malloc(sizeof(double) * (self._no + 1))
        try:
            with nogil:
                for i in range(n):
                    o[i] = self._infer(&x[i, 0], deg, lv)
        finally:
            free(deg)
            free(lv)
        return out
