# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the cube scan, Besov double sum and modulus scan."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, sqrt, fabs, hypot

cnp.import_array()


def box_product(double[:, ::1] Sa, double[:, ::1] Sb, rows, cols, sides, double ea, double eb):
    cdef cnp.int64_t[::1] r = np.ascontiguousarray(rows, dtype=np.int64)
    cdef cnp.int64_t[::1] c = np.ascontiguousarray(cols, dtype=np.int64)
    cdef cnp.int64_t[::1] s = np.ascontiguousarray(sides, dtype=np.int64)
    cdef Py_ssize_t n = r.shape[0], i
    cdef long ri, ci, si
    cdef double area, ma, mb
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            ri = r[i]; ci = c[i]; si = s[i]
            area = <double>(si * si)
            ma = (Sa[ri + si, ci + si] - Sa[ri, ci + si] - Sa[ri + si, ci] + Sa[ri, ci]) / area
            mb = (Sb[ri + si, ci + si] - Sb[ri, ci + si] - Sb[ri + si, ci] + Sb[ri, ci]) / area
            o[i] = pow(ma, ea) * pow(mb, eb)
    return out


def besov_sum(z, f, ds, double q, diag):
    cdef double[::1] zr = np.ascontiguousarray(np.real(z), dtype=float)
    cdef double[::1] zi = np.ascontiguousarray(np.imag(z), dtype=float)
    cdef double[::1] fr = np.ascontiguousarray(np.real(f), dtype=float)
    cdef double[::1] fi = np.ascontiguousarray(np.imag(f), dtype=float)
    cdef double[::1] w = np.ascontiguousarray(ds, dtype=float)
    cdef double[::1] dg = np.ascontiguousarray(diag, dtype=float)
    cdef Py_ssize_t m = zr.shape[0], i, j
    cdef double total = 0.0, row, d2, e2, hq = 0.5 * q
    cdef long bad = 0
    # the summand is symmetric in (i, j): sum the upper triangle and double it
    with nogil:
        for i in range(m):
            row = 0.0
            for j in range(i + 1, m):
                d2 = (zr[i] - zr[j]) * (zr[i] - zr[j]) + (zi[i] - zi[j]) * (zi[i] - zi[j])
                if d2 == 0.0:
                    bad += 2
                    continue
                e2 = (fr[i] - fr[j]) * (fr[i] - fr[j]) + (fi[i] - fi[j]) * (fi[i] - fi[j])
                if e2 != 0.0:
                    row += pow(e2 / d2, hq) * w[j]
            total += 2.0 * row * w[i]
        for i in range(m):
            total += dg[i] * w[i] * w[i]
    return total, bad


def oscillation(f, widths):
    """Sparse-table range max/min queries, O(m log m) build and O(m) per width."""
    cdef double[::1] a = np.ascontiguousarray(f, dtype=float)
    cdef Py_ssize_t m = a.shape[0], lev, i, k
    cdef cnp.int64_t[::1] ws = np.ascontiguousarray(widths, dtype=np.int64)
    cdef Py_ssize_t nl = 1
    while (1 << nl) <= m:
        nl += 1
    mx_np = np.empty((nl, m))
    mn_np = np.empty((nl, m))
    cdef double[:, ::1] mx = mx_np
    cdef double[:, ::1] mn = mn_np
    out = np.empty(ws.shape[0])
    cdef double[::1] o = out
    cdef long w, size, j, half
    cdef double best, hi, lo, x, y
    with nogil:
        for i in range(m):
            mx[0, i] = a[i]
            mn[0, i] = a[i]
        for lev in range(1, nl):
            half = 1 << (lev - 1)
            for i in range(m - (1 << lev) + 1):
                x = mx[lev - 1, i]; y = mx[lev - 1, i + half]
                mx[lev, i] = x if x > y else y
                x = mn[lev - 1, i]; y = mn[lev - 1, i + half]
                mn[lev, i] = x if x < y else y
        for k in range(ws.shape[0]):
            w = ws[k]
            size = w + 1
            if size > m:
                size = m
            j = 0
            while (2 << j) <= size:
                j += 1
            best = 0.0
            for i in range(m - size + 1):
                hi = mx[j, i]
                x = mx[j, i + size - (1 << j)]
                if x > hi:
                    hi = x
                lo = mn[j, i]
                x = mn[j, i + size - (1 << j)]
                if x < lo:
                    lo = x
                if hi - lo > best:
                    best = hi - lo
            o[k] = best
    return out
