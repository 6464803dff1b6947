# cython: boundscheck=False, wraparound=False, cdivision=True, nonecheck=False
"""Compiled hot kernels: fused p-energy/gradient and weighted cut perimeter.

Semantics match gridfreq._kernels._fallback exactly; see its docstring for the
grid/padding conventions. Fusing the padded forward differences into one pass
avoids the large temporaries the numpy path allocates.
"""

import numpy as np

cimport numpy as cnp

from libc.math cimport pow, sqrt

cnp.import_array()


cdef inline double _uval(const double[:, ::1] u, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    # zero extension outside the array
    if i < 0 or j < 0 or i >= u.shape[0] or j >= u.shape[1]:
        return 0.0
    return u[i, j]


def pq_energy_2d(const double[:, ::1] u, double h, double p, double delta=0.0):
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1]
    cdef Py_ssize_t a, b
    cdef double gx, gy, g2, acc = 0.0
    cdef double d2 = delta * delta
    cdef double dp = pow(delta, p) if delta > 0.0 else 0.0
    cdef double ub, uc
    with nogil:
        for a in range(-1, n0):
            for b in range(-1, n1):
                ub = _uval(u, a, b)
                gx = _uval(u, a + 1, b) - ub
                gy = _uval(u, a, b + 1) - ub
                g2 = (gx * gx + gy * gy) / (h * h)
                if delta > 0.0:
                    acc += pow(g2 + d2, 0.5 * p) - dp
                elif g2 > 0.0:
                    acc += pow(g2, 0.5 * p)
    return acc * h * h


def pq_energy_grad_2d(const double[:, ::1] u, double h, double p, double delta):
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] grad = np.zeros((n0, n1))
    cdef double[:, ::1] g = grad
    cdef Py_ssize_t a, b
    cdef double gx, gy, g2, w, fx, fy, ub, acc = 0.0
    cdef double d2 = delta * delta
    cdef double dp = pow(delta, p) if delta > 0.0 else 0.0
    with nogil:
        for a in range(-1, n0):
            for b in range(-1, n1):
                ub = _uval(u, a, b)
                gx = (_uval(u, a + 1, b) - ub) / h
                gy = (_uval(u, a, b + 1) - ub) / h
                g2 = gx * gx + gy * gy + d2
                acc += pow(g2, 0.5 * p) - dp
                w = pow(g2, 0.5 * p - 1.0)
                fx = h * p * w * gx
                fy = h * p * w * gy
                if a + 1 < n0 and 0 <= b < n1:
                    g[a + 1, b] += fx
                if b + 1 < n1 and 0 <= a < n0:
                    g[a, b + 1] += fy
                if 0 <= a < n0 and 0 <= b < n1:
                    g[a, b] -= fx + fy
    return acc * h * h, grad


def pq_cell_weights_2d(const double[:, ::1] u, double h, double p, double delta):
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n0 + 1, n1 + 1))
    cdef double[:, ::1] w = out
    cdef Py_ssize_t a, b
    cdef double gx, gy, ub
    cdef double d2 = delta * delta
    with nogil:
        for a in range(-1, n0):
            for b in range(-1, n1):
                ub = _uval(u, a, b)
                gx = (_uval(u, a + 1, b) - ub) / h
                gy = (_uval(u, a, b + 1) - ub) / h
                w[a + 1, b + 1] = pow(gx * gx + gy * gy + d2, 0.5 * p - 1.0)
    return out


cdef inline bint _mval(const cnp.uint8_t[:, ::1] m, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    if i < 0 or j < 0 or i >= m.shape[0] or j >= m.shape[1]:
        return 0
    return m[i, j] != 0


def cut_perimeter_2d(mask, double w_axis, double w_diag):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] marr = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef const cnp.uint8_t[:, ::1] m = marr
    cdef Py_ssize_t n0 = m.shape[0], n1 = m.shape[1]
    cdef Py_ssize_t i, j
    cdef long ax = 0, dg = 0
    cdef bint c
    with nogil:
        for i in range(-1, n0):
            for j in range(-1, n1):
                c = _mval(m, i, j)
                if c != _mval(m, i + 1, j):
                    ax += 1
                if c != _mval(m, i, j + 1):
                    ax += 1
                if c != _mval(m, i + 1, j + 1):
                    dg += 1
                if _mval(m, i + 1, j) != _mval(m, i, j + 1):
                    dg += 1
    return w_axis * ax + w_diag * dg
