"""Vectorized numpy implementations of the hot kernels.

Reference semantics for the compiled core in _core.pyx; selected automatically
when the extension is unavailable or NUMERIC_PURE_PYTHON=1.

Conventions shared by both implementations:

* fields are full-grid float64 arrays, zero on nodes outside the domain;
* the gradient is the forward difference on a one-node zero padding, so every
  difference that touches a real node is counted exactly once ("cell" (a, b)
  has base node (a-1, b-1) in unpadded indices and components
  gx = (u[a+1,b]-u[a,b])/h, gy = (u[a,b+1]-u[a,b])/h);
* the p-energy is  h^2 * sum_cells ((gx^2+gy^2+delta^2)^(p/2) - delta^p),
  the delta^p subtraction keeps empty cells at zero for delta > 0.
"""

import numpy as np


def _cell_gradients(u, h):
    up = np.pad(u, 1)
    gx = (up[1:, :-1] - up[:-1, :-1]) / h
    gy = (up[:-1, 1:] - up[:-1, :-1]) / h
    return gx, gy


def pq_energy_2d(u, h, p, delta=0.0):
    gx, gy = _cell_gradients(u, h)
    g2 = gx * gx + gy * gy
    if delta > 0.0:
        e = (g2 + delta * delta) ** (0.5 * p) - delta**p
    else:
        e = g2 ** (0.5 * p)
    return float(h * h * e.sum())


def pq_energy_grad_2d(u, h, p, delta):
    gx, gy = _cell_gradients(u, h)
    g2 = gx * gx + gy * gy + delta * delta
    energy = float(h * h * (g2 ** (0.5 * p) - delta**p).sum())
    w = g2 ** (0.5 * p - 1.0)
    fx = h * p * w * gx
    fy = h * p * w * gy
    gp = np.zeros((u.shape[0] + 2, u.shape[1] + 2))
    gp[1:, :-1] += fx
    gp[:-1, 1:] += fy
    gp[:-1, :-1] -= fx + fy
    return energy, gp[1:-1, 1:-1]


def pq_cell_weights_2d(u, h, p, delta):
    gx, gy = _cell_gradients(u, h)
    g2 = gx * gx + gy * gy + delta * delta
    return g2 ** (0.5 * p - 1.0)


def cut_perimeter_2d(mask, w_axis, w_diag):
    m = np.pad(np.ascontiguousarray(mask, dtype=bool), 1)
    ax = np.count_nonzero(m[1:, :] != m[:-1, :])
    ax += np.count_nonzero(m[:, 1:] != m[:, :-1])
    dg = np.count_nonzero(m[1:, 1:] != m[:-1, :-1])
    dg += np.count_nonzero(m[1:, :-1] != m[:-1, 1:])
    return float(w_axis * ax + w_diag * dg)
