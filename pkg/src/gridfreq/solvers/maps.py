"""Field transport maps: inversion extension across a disk rim, and
axis-by-axis reflection symmetrization on a cube.

The extension reflects a Sobolev field on B_r through the sphere: outside the
disk it samples u at the inverted point K(x) = r^2 (x - x0)/|x - x0|^2 + x0.
Both L^p norm reports use the natural-boundary (free) energy convention, since
the operator acts on W^{1,p}, not on zero-trace fields.

The symmetrization runs the power-mean recursion
    sigma_{i+1} = (1/2 sigma_i^p + 1/2 (sigma_i o R_{i+1})^p)^{1/p}
over every reflection axis. It preserves the L^p mass node by node and, up to
discretization error, does not increase the p-energy (hidden convexity of the
gradient integrand).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from gridfreq import geometry as G
from gridfreq.bounds import BoundRow
from gridfreq.errors import ValidationError
from gridfreq.solvers import fields as F

_SLACK = 0.05  # interpolation slack on the extension bounds
_DUST = 1e-9  # absolute floor so zero-ceiling rows tolerate rounding dust


@dataclass(frozen=True)
class ExtensionReport:
    field: F.Field
    value_row: BoundRow
    gradient_row: BoundRow

    @property
    def passed(self) -> bool:
        return self.value_row.passed and self.gradient_row.passed


@dataclass(frozen=True)
class SymmetrizeReport:
    field: F.Field
    energy_row: BoundRow

    @property
    def passed(self) -> bool:
        return self.energy_row.passed


def _nearest_fill(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Replace outside-node values with the nearest inside value, so that
    interpolation at points near the rim never blends with padding zeros."""
    _, idx = ndimage.distance_transform_edt(~mask, return_indices=True)
    return values[tuple(idx)]


def extend_inversion(u: F.Field, R: float, p: float) -> ExtensionReport:
    src = u.parent
    if src.spec is None or src.spec.kind != "disk":
        raise ValidationError("extension needs a field built on a disk domain")
    if not (np.isfinite(p) and p >= 1.0):
        raise ValidationError("extension report needs finite p >= 1")
    r = src.spec.params["r"]
    if not R > r:
        raise ValidationError("extension radius must exceed the disk radius")
    h = src.h
    dim = src.dim

    big = G.build_domain(G.DomainSpec.disk(R, h))
    filled = _nearest_fill(u.values, src.inside)

    # physical coordinates of the target nodes
    axes = [big.axis_coordinates(a) for a in range(dim)]
    X = np.meshgrid(*axes, indexing="ij")
    rho2 = sum(c * c for c in X)
    rho2 = np.maximum(rho2, (h / 4.0) ** 2)  # the origin maps to itself anyway
    pull = np.where(rho2 > r * r, r * r / rho2, 1.0)
    coords = np.stack(
        [(c * pull - src.origin[a]) / h for a, c in enumerate(X)]
    )
    ext_vals = ndimage.map_coordinates(filled, coords, order=1, mode="nearest")
    ext_vals[~big.inside] = 0.0
    ext = F.Field(big, ext_vals, "free")

    norm_src = F.lq_norm_q(u.values, src.inside, h, p) ** (1.0 / p)
    norm_ext = F.lq_norm_q(ext_vals, big.inside, h, p) ** (1.0 / p)
    grad_src = F.energy_free(u.values, src.inside, h, p) ** (1.0 / p)
    grad_ext = F.energy_free(ext_vals, big.inside, h, p) ** (1.0 / p)

    ratio = R / r
    factor_val = 2.0 ** (1.0 / p) * ratio ** (2.0 * dim / p)
    factor_grad = 4.0 ** (1.0 / p) * ratio ** (4.0 * dim / p)
    common = {"p": p, "r": r, "R": R}
    value_row = BoundRow(
        label="extension-value-norm",
        inputs={**common, "measured": norm_ext, "factor": factor_val},
        bound=norm_ext,
        target=factor_val * norm_src,
        tolerance=_SLACK * factor_val * norm_src + _DUST,
    )
    gradient_row = BoundRow(
        label="extension-gradient-norm",
        inputs={**common, "measured": grad_ext, "factor": factor_grad},
        bound=grad_ext,
        target=factor_grad * grad_src,
        tolerance=_SLACK * factor_grad * grad_src + _DUST,
    )
    return ExtensionReport(ext, value_row, gradient_row)


def symmetrize(u: F.Field, p: float) -> SymmetrizeReport:
    dom = u.parent
    mask = dom.inside
    if not (np.isfinite(p) and p >= 1.0):
        raise ValidationError("symmetrization needs finite p >= 1")
    for axis in range(dom.dim):
        if not np.array_equal(mask, np.flip(mask, axis=axis)):
            raise ValidationError(
                "symmetrization needs a reflection-symmetric cube grid"
            )

    def energy(vals):
        if u.convention == "zero":
            return F.energy_zero(vals, dom.h, p)
        return F.energy_free(vals, mask, dom.h, p)

    before = energy(u.values)
    sigma = np.abs(u.values)
    for axis in range(dom.dim):
        sigma = (0.5 * sigma**p + 0.5 * np.flip(sigma, axis=axis) ** p) ** (1.0 / p)
    after = energy(sigma)

    row = BoundRow(
        label="symmetrization-energy",
        inputs={"p": p, "before": before, "after": after},
        bound=after,
        target=before,
        tolerance=0.02 * before + _DUST,
    )
    return SymmetrizeReport(F.Field(dom, sigma, u.convention), row)
