"""Node fields, solve reports, and the discrete energy/quotient machinery
shared by every variational solver.

Two boundary conventions exist side by side:

* ``zero``: the field is extended by zero outside its domain mask; gradients
  see that extension, so a jump at the boundary costs energy. Used by all
  Dirichlet-type quantities (principal frequencies, capacities).
* ``free``: only differences between pairs of inside nodes count; there is no
  ghost layer. Used by the Neumann constant, the punctured-cube constant, and
  symmetrization energy reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from gridfreq import _kernels as K
from gridfreq.errors import ValidationError
from gridfreq.geometry import GridDomain


@dataclass(eq=False)
class Field:
    """Real values on every node of a grid, plus the boundary convention."""

    parent: GridDomain
    values: np.ndarray
    convention: str = "zero"

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != self.parent.shape:
            raise ValidationError(
                f"field shape {self.values.shape} does not match grid "
                f"{self.parent.shape}"
            )
        if self.convention not in ("zero", "free"):
            raise ValidationError(f"unknown boundary convention {self.convention!r}")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("field contains non-finite values")
        if self.convention == "zero" and self.values[~self.parent.inside].any():
            raise ValidationError("zero-extension field is nonzero outside the domain")

    def lp_norm(self, p: float) -> float:
        """‖u‖_p over the inside nodes with the h^dim node measure."""
        meas = self.parent.h**self.parent.dim
        vals = self.values[self.parent.inside]
        if p == math.inf:
            return float(np.abs(vals).max())
        return float((meas * np.sum(np.abs(vals) ** p)) ** (1.0 / p))


@dataclass
class SolveReport:
    value: float
    field: Field | None
    iterations: int
    residual: float
    h: float
    extrapolated: float | None = None
    converged: bool = True
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.converged and not self.value > 0:
            raise ValidationError(f"solve produced a non-positive value {self.value}")

    def to_json(self, quantity: str) -> str:
        payload = {
            "quantity": quantity,
            "value": _sig(self.value),
            "extrapolated": None
            if self.extrapolated is None
            else _sig(self.extrapolated),
            "h": _sig(self.h),
            "iterations": self.iterations,
            "residual": _sig(self.residual),
            "converged": self.converged,
            "inputs": {k: _jsonable(v) for k, v in sorted(self.inputs.items())},
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _sig(x: float) -> float:
    """12-significant-digit canonical float used by every serialized artifact."""
    if x is None or not math.isfinite(x):
        return x
    return float(f"{x:.12g}")


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return _sig(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


# ---------------------------------------------------------------------------
# zero-extension energies (2D via kernels, 1D inline)


def energy_zero(u: np.ndarray, h: float, p: float, delta: float = 0.0) -> float:
    if u.ndim == 2:
        return K.pq_energy_2d(u, h, p, delta)
    du = np.diff(np.pad(u, 1))
    return float(h ** (1.0 - p) * np.sum((du * du + delta * delta) ** (p / 2.0) - delta**p))


def cell_weights(u: np.ndarray, h: float, p: float, delta: float) -> np.ndarray:
    """IRLS weights (|grad|^2 + delta^2)^(p/2-1) per cell, in the padded-cell
    layout dirichlet_matrix expects (physical gradients in 2d, raw
    differences in 1d)."""
    if u.ndim == 2:
        return K.pq_cell_weights_2d(u, h, p, delta)
    du = np.diff(np.pad(u, 1))
    return (du * du + delta * delta) ** (p / 2.0 - 1.0)


def grad_scale(u: np.ndarray, h: float) -> float:
    """Largest gradient magnitude, in the convention cell_weights compares
    its delta against."""
    if u.ndim == 1:
        return float(np.abs(np.diff(np.pad(u, 1))).max())
    up = np.pad(u, 1)
    gx = up[1:, :-1] - up[:-1, :-1]
    gy = up[:-1, 1:] - up[:-1, :-1]
    return math.sqrt(float((gx * gx + gy * gy).max())) / h


def smoothing_schedule(p: float):
    """Stage values for the IRLS smoothing parameter: absolute for p < 2
    (caps the weight blow-up at flat cells), fractions of the gradient scale
    for p > 2 (floors the weight collapse there)."""
    if p < 2.0:
        return (1e-2, 1e-4, 1e-6, 1e-8)
    if p == 2.0:
        return (0.0,)
    return (0.3, 0.1, 0.03, 0.01, 0.003, 0.001)


def stage_delta(stage: float, p: float, u: np.ndarray, h: float) -> float:
    if p <= 2.0:
        return stage
    return max(stage * grad_scale(u, h), 1e-12)


def energy_grad_zero(u: np.ndarray, h: float, p: float, delta: float):
    if u.ndim == 2:
        return K.pq_energy_grad_2d(u, h, p, delta)
    up = np.pad(u, 1)
    du = np.diff(up)
    w = (du * du + delta * delta) ** (p / 2.0 - 1.0)
    e = float(h ** (1.0 - p) * np.sum((du * du + delta * delta) ** (p / 2.0) - delta**p))
    flux = h ** (1.0 - p) * p * w * du
    g = np.zeros_like(up)
    g[1:] += flux
    g[:-1] -= flux
    return e, g[1:-1].copy()


# ---------------------------------------------------------------------------
# free-boundary energies (pairs of inside nodes only, cell-coupled in 2D)


def _free_gradients(u: np.ndarray, mask: np.ndarray, h: float):
    """Forward differences where the forward neighbour is inside; zero
    otherwise. Returned arrays have the grid shape."""
    gx = np.zeros_like(u)
    gy = np.zeros_like(u)
    okx = mask[:-1, :] & mask[1:, :]
    oky = mask[:, :-1] & mask[:, 1:]
    gx[:-1, :][okx] = (u[1:, :] - u[:-1, :])[okx] / h
    gy[:, :-1][oky] = (u[:, 1:] - u[:, :-1])[oky] / h
    return gx, gy, okx, oky


def energy_free(u: np.ndarray, mask: np.ndarray, h: float, p: float,
                delta: float = 0.0) -> float:
    if u.ndim == 1:
        ok = mask[:-1] & mask[1:]
        du = np.diff(u)[ok]
        return float(h ** (1.0 - p) * np.sum((du * du + delta * delta) ** (p / 2.0) - delta**p))
    gx, gy, _, _ = _free_gradients(u, mask, h)
    g2 = gx * gx + gy * gy + delta * delta
    active = (gx != 0.0) | (gy != 0.0) | (delta > 0.0)
    return float(h * h * np.sum(g2[active] ** (p / 2.0) - delta**p))


def free_cell_weights(u: np.ndarray, mask: np.ndarray, h: float, p: float,
                      delta: float) -> np.ndarray:
    """IRLS weights per anchor cell in the free convention, laid out the way
    free_matrix expects (1d: per left node of each pair; 2d: grid-shaped,
    anchored at the lower-left node)."""
    if u.ndim == 1:
        ok = mask[:-1] & mask[1:]
        du = np.where(ok, np.diff(u), 0.0)
        return (du * du + delta * delta) ** (p / 2.0 - 1.0)
    gx, gy, _, _ = _free_gradients(u, mask, h)
    g2 = gx * gx + gy * gy
    return (g2 + delta * delta) ** (p / 2.0 - 1.0)


def energy_grad_free(u: np.ndarray, mask: np.ndarray, h: float, p: float,
                     delta: float):
    if u.ndim == 1:
        ok = mask[:-1] & mask[1:]
        du = np.where(ok, np.diff(u), 0.0)
        w = (du * du + delta * delta) ** (p / 2.0 - 1.0)
        e = float(
            h ** (1.0 - p) * np.sum(((du * du + delta * delta) ** (p / 2.0) - delta**p)[ok])
        )
        flux = np.where(ok, h ** (1.0 - p) * p * w * du, 0.0)
        g = np.zeros_like(u)
        g[1:] += flux
        g[:-1] -= flux
        return e, g
    gx, gy, okx, oky = _free_gradients(u, mask, h)
    g2 = gx * gx + gy * gy + delta * delta
    w = g2 ** (p / 2.0 - 1.0)
    active = (gx != 0.0) | (gy != 0.0)
    e = float(h * h * np.sum((g2 ** (p / 2.0) - delta**p)[active | (delta > 0.0)]))
    fx = h * p * w * gx
    fy = h * p * w * gy
    g = np.zeros_like(u)
    g[1:, :] += np.where(okx, fx[:-1, :], 0.0)
    g[:-1, :] -= np.where(okx, fx[:-1, :], 0.0)
    g[:, 1:] += np.where(oky, fy[:, :-1], 0.0)
    g[:, :-1] -= np.where(oky, fy[:, :-1], 0.0)
    return e, g


# ---------------------------------------------------------------------------
# Rayleigh quotient for zero-extension fields


def lq_norm_q(u: np.ndarray, mask: np.ndarray, h: float, q: float) -> float:
    """h^dim * sum |u|^q over inside nodes (the q-th power, not the norm)."""
    meas = h ** u.ndim
    return float(meas * np.sum(np.abs(u[mask]) ** q))


def quotient_zero(u: np.ndarray, mask: np.ndarray, h: float, p: float, q: float) -> float:
    e = energy_zero(u, h, p)
    f = lq_norm_q(u, mask, h, q)
    if f <= 0.0:
        raise ValidationError("quotient undefined: zero field")
    return e / f ** (p / q)


def quotient_grad_zero(u: np.ndarray, mask: np.ndarray, h: float, p: float,
                       q: float, delta: float):
    """Value and gradient of E_delta(u)/F(u)^(p/q) restricted to inside nodes
    (outside entries of the gradient are zeroed)."""
    e, ge = energy_grad_zero(u, h, p, delta)
    f = lq_norm_q(u, mask, h, q)
    if f <= 0.0:
        raise ValidationError("quotient undefined: zero field")
    meas = h ** u.ndim
    gf = q * meas * np.sign(u) * np.abs(u) ** (q - 1.0)
    fpq = f ** (p / q)
    grad = (ge - (p / q) * (e / f) * gf) / fpq
    grad[~mask] = 0.0
    return e / fpq, grad
