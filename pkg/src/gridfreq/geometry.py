"""Grid domains: builders, inradius, topological order, projections, fatness.

An open set Ω ⊂ R^d (d = 1 or 2) is represented by a uniform grid of nodes
with spacing h; a node belongs to the mask iff its physical center lies in the
continuum set (node-center rasterization rule). Node (i, j) sits at
origin + h*(i, j); axis 0 of the mask array is the x direction.

The digital-topology pairing is: inside nodes are 8-connected, complement
nodes are 4-connected. Complement components touching the window border are
merged into a single unbounded component, so `topology_order` returns the
number of complement components of the set seen in the one-point
compactification of the plane.
"""

from __future__ import annotations

import json
import math
import os
import re
import tempfile
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage

from gridfreq.errors import BudgetExceededError, ResolutionError, ValidationError

DEFAULT_NODE_BUDGET = 16_000_000

_STRUCT8 = np.ones((3, 3), dtype=int)
_STRUCT4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=int)


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Binary occupancy mask on a uniform grid, representing an open set.

    `spec` records the parametric family the mask was rasterized from, when
    there is one; solvers use it to re-rasterize at h/2 for extrapolation.
    Mask-level transforms that change the physical set drop it.
    """

    dim: int
    h: float
    origin: tuple[float, ...]
    inside: np.ndarray
    spec: "DomainSpec | None" = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValidationError(f"dim must be 1 or 2, got {self.dim}")
        if not (self.h > 0):
            raise ValidationError(f"spacing must be positive, got {self.h}")
        arr = np.ascontiguousarray(self.inside, dtype=bool)
        if arr.ndim != self.dim:
            raise ValidationError(f"mask rank {arr.ndim} does not match dim {self.dim}")
        if any(n < 2 for n in arr.shape):
            raise ValidationError(f"grid shape {arr.shape} has a component < 2")
        if not arr.any():
            raise ValidationError("domain has no inside nodes")
        if len(self.origin) != self.dim:
            raise ValidationError("origin length does not match dim")
        for axis in range(self.dim):
            first = np.take(arr, 0, axis=axis)
            last = np.take(arr, -1, axis=axis)
            if np.any(first) or np.any(last):
                raise ValidationError(
                    "inside nodes must stay at least one spacing away from the window edge"
                )
        arr.setflags(write=False)
        object.__setattr__(self, "inside", arr)
        object.__setattr__(self, "origin", tuple(float(c) for c in self.origin))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.inside.shape

    @property
    def node_count(self) -> int:
        return int(self.inside.size)

    @property
    def inside_count(self) -> int:
        return int(np.count_nonzero(self.inside))

    def axis_coordinates(self, axis: int) -> np.ndarray:
        """Physical coordinates of the node centers along one axis."""
        return self.origin[axis] + self.h * np.arange(self.shape[axis])

    def window(self) -> list[tuple[float, float]]:
        """Physical extent of the grid window, per axis."""
        return [
            (self.origin[a], self.origin[a] + self.h * (self.shape[a] - 1))
            for a in range(self.dim)
        ]

    def inside_volume(self) -> float:
        """Lebesgue measure of the rasterized set (one cell per inside node)."""
        return self.inside_count * self.h**self.dim


@dataclass(frozen=True, eq=False)
class ObstacleSet:
    """Marked node subset on a domain's grid (compact set Σ, punctures, ...)."""

    parent: GridDomain
    nodes: np.ndarray  # (count, dim) integer indices, lexicographically sorted
    # ("disk", center, radius) or ("point", coords) when built from a
    # parametric shape; lets refinement re-rasterize instead of block-copy.
    spec: tuple | None = None

    def __post_init__(self):
        arr = np.atleast_2d(np.asarray(self.nodes, dtype=np.int64))
        if arr.size == 0:
            raise ValidationError("obstacle set is empty")
        if arr.shape[1] != self.parent.dim:
            raise ValidationError("obstacle index rank does not match the grid")
        shape = np.asarray(self.parent.shape)
        if np.any(arr < 0) or np.any(arr >= shape):
            raise ValidationError("obstacle node outside the grid window")
        order = np.lexsort(arr.T[::-1])
        arr = np.ascontiguousarray(arr[order])
        arr.setflags(write=False)
        object.__setattr__(self, "nodes", arr)

    @classmethod
    def from_mask(cls, parent: GridDomain, mask: np.ndarray) -> "ObstacleSet":
        idx = np.argwhere(np.asarray(mask, dtype=bool))
        if idx.size == 0:
            raise ValidationError("obstacle mask selects no nodes")
        return cls(parent, idx)

    @classmethod
    def from_disk(cls, parent: GridDomain, center, radius: float) -> "ObstacleSet":
        """Nodes whose centers lie in the closed disk (or 1d interval)."""
        if parent.dim == 1:
            x = parent.axis_coordinates(0)
            mask = np.abs(x - center) <= radius
        else:
            x = parent.axis_coordinates(0)[:, None]
            y = parent.axis_coordinates(1)[None, :]
            mask = (x - center[0]) ** 2 + (y - center[1]) ** 2 <= radius**2
        idx = np.argwhere(mask)
        if idx.size == 0:
            raise ValidationError("obstacle mask selects no nodes")
        return cls(parent, idx, spec=("disk", center, radius))

    @classmethod
    def from_point(cls, parent: GridDomain, point) -> "ObstacleSet":
        """Single node nearest to a physical point."""
        pt = np.atleast_1d(np.asarray(point, dtype=float))
        idx = np.round((pt - np.asarray(parent.origin)) / parent.h).astype(np.int64)
        return cls(parent, idx[None, :], spec=("point", point))

    def on_grid(self, parent: "GridDomain") -> "ObstacleSet":
        """Re-rasterize the same physical shape on another grid. Requires a
        parametric spec; plain node sets have no shape to carry over."""
        if self.spec is None:
            raise ValidationError("obstacle has no parametric description")
        if self.spec[0] == "disk":
            return type(self).from_disk(parent, self.spec[1], self.spec[2])
        return type(self).from_point(parent, self.spec[1])

    @property
    def count(self) -> int:
        return int(self.nodes.shape[0])

    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.shape, dtype=bool)
        m[tuple(self.nodes.T)] = True
        return m


_SPEC_KINDS = {
    "disk": ("r",),
    "square": ("side",),
    "annulus": ("r_in", "r_out"),
    "strip": ("height", "length"),
    "perforated": ("k", "beta"),
    "pepper_window": ("m", "eps"),
    "interval": ("a", "b"),
}


@dataclass(frozen=True)
class DomainSpec:
    """Parametric description of one of the built-in set families."""

    kind: str
    params: dict = field(default_factory=dict)
    h: float = 1 / 64

    def __post_init__(self):
        if self.kind not in _SPEC_KINDS:
            raise ValidationError(f"unknown domain kind {self.kind!r}")
        expected = _SPEC_KINDS[self.kind]
        if set(self.params) != set(expected):
            raise ValidationError(
                f"{self.kind} expects parameters {expected}, got {tuple(self.params)}"
            )
        if not (self.h > 0):
            raise ValidationError("resolution h must be positive")
        if self.kind == "interval":
            if not self.params["a"] < self.params["b"]:
                raise ValidationError("interval requires a < b")
        else:
            for name, value in self.params.items():
                if value <= 0:
                    raise ValidationError(
                        f"{self.kind}: parameter {name} must be positive"
                    )
        if self.kind == "annulus" and self.params["r_in"] >= self.params["r_out"]:
            raise ValidationError("annulus requires r_in < r_out")
        if self.kind == "perforated":
            k = self.params["k"]
            if int(k) != k or k < 2:
                raise ValidationError("perforated requires integer k >= 2")
            if not (self.params["beta"] > 0.5):
                raise ValidationError("perforated requires beta > 1/2")
        if self.kind == "pepper_window":
            m = self.params["m"]
            if int(m) != m or m < 1:
                raise ValidationError("pepper_window requires integer m >= 1")
            if self.params["eps"] < self.h:
                raise ValidationError("pepper_window requires eps >= h")

    def to_string(self) -> str:
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.kind}:{inner}"

    @classmethod
    def parse(cls, text: str, h: float) -> "DomainSpec":
        m = re.fullmatch(r"(\w+)(?::(.*))?", text.strip())
        if m is None:
            raise ValidationError(f"cannot parse domain spec {text!r}")
        kind, rest = m.group(1), m.group(2) or ""
        params = {}
        for piece in filter(None, (s.strip() for s in rest.split(","))):
            if "=" not in piece:
                raise ValidationError(f"bad parameter {piece!r} in spec {text!r}")
            key, val = piece.split("=", 1)
            params[key.strip()] = float(val)
        return cls(kind, params, h)

    # Convenience constructors

    @classmethod
    def disk(cls, r: float, h: float) -> "DomainSpec":
        return cls("disk", {"r": r}, h)

    @classmethod
    def square(cls, side: float, h: float) -> "DomainSpec":
        return cls("square", {"side": side}, h)

    @classmethod
    def annulus(cls, r_in: float, r_out: float, h: float) -> "DomainSpec":
        return cls("annulus", {"r_in": r_in, "r_out": r_out}, h)

    @classmethod
    def strip(cls, height: float, length: float, h: float) -> "DomainSpec":
        return cls("strip", {"height": height, "length": length}, h)

    @classmethod
    def perforated(cls, k: int, beta: float, h: float | None = None) -> "DomainSpec":
        """Perforated block-plus-strip family; default h follows min(eps/4, 1/64)."""
        eps = float(k) ** (-beta)
        if h is None:
            h = min(eps / 4.0, 1 / 64)
        return cls("perforated", {"k": k, "beta": beta}, h)

    @classmethod
    def pepper_window(cls, m: int, eps: float, h: float) -> "DomainSpec":
        return cls("pepper_window", {"m": m, "eps": eps}, h)

    @classmethod
    def interval(cls, a: float, b: float, h: float) -> "DomainSpec":
        return cls("interval", {"a": a, "b": b}, h)


def _axis_nodes(lo: float, hi: float, h: float, margin: int = 2) -> np.ndarray:
    """Symmetric node ladder k*h covering [lo, hi] with `margin` extra nodes."""
    i0 = math.floor(lo / h) - margin
    i1 = math.ceil(hi / h) + margin
    return h * np.arange(i0, i1 + 1)


def _from_predicate(
    coords: list[np.ndarray],
    h: float,
    predicate: Callable[..., np.ndarray],
    node_budget: int,
    spec: DomainSpec | None = None,
) -> GridDomain:
    total = math.prod(len(c) for c in coords)
    if total > node_budget:
        raise BudgetExceededError(
            f"grid of {total} nodes exceeds the budget of {node_budget}"
        )
    if len(coords) == 1:
        mask = predicate(coords[0])
        origin = (float(coords[0][0]),)
    else:
        x = coords[0][:, None]
        y = coords[1][None, :]
        mask = predicate(x, y)
        origin = (float(coords[0][0]), float(coords[1][0]))
    return GridDomain(len(coords), h, origin, mask, spec)


def build_domain(spec: DomainSpec, node_budget: int = DEFAULT_NODE_BUDGET) -> GridDomain:
    """Rasterize a DomainSpec: a node is inside iff its center is in the set."""
    h = spec.h
    kind, prm = spec.kind, spec.params

    if kind == "disk":
        r = prm["r"]
        ax = _axis_nodes(-r, r, h)
        return _from_predicate(
            [ax, ax], h, lambda x, y: x * x + y * y < r * r, node_budget, spec
        )

    if kind == "square":
        s = prm["side"] / 2.0
        ax = _axis_nodes(-s, s, h)
        return _from_predicate(
            [ax, ax], h, lambda x, y: (np.abs(x) < s) & (np.abs(y) < s), node_budget, spec
        )

    if kind == "annulus":
        ri, ro = prm["r_in"], prm["r_out"]
        ax = _axis_nodes(-ro, ro, h)
        return _from_predicate(
            [ax, ax],
            h,
            lambda x, y: (x * x + y * y > ri * ri) & (x * x + y * y < ro * ro),
            node_budget,
            spec,
        )

    if kind == "strip":
        sx = prm["length"] / 2.0
        sy = prm["height"] / 2.0
        return _from_predicate(
            [_axis_nodes(-sx, sx, h), _axis_nodes(-sy, sy, h)],
            h,
            lambda x, y: (np.abs(x) < sx) & (np.abs(y) < sy),
            node_budget,
            spec,
        )

    if kind == "perforated":
        return _build_perforated(int(prm["k"]), prm["beta"], h, node_budget, spec)

    if kind == "pepper_window":
        return _build_pepper(int(prm["m"]), prm["eps"], h, node_budget)

    if kind == "interval":
        return interval_domain(prm["a"], prm["b"], h)

    raise ValidationError(f"unknown domain kind {kind!r}")


def _build_perforated(
    k: int, beta: float, h: float, node_budget: int, spec: DomainSpec | None = None
) -> GridDomain:
    """Block of ⌊√k⌋² perforated unit cells plus a strip of the remaining ones.

    Each unit cell is [0,1]² minus the closed disk of radius eps = k^(-beta)
    at its center. The strip of k - ⌊√k⌋² cells is attached below the block,
    extending rightward from its lower-left corner. The result is open and
    multiply connected of order k + 1.
    """
    eps = float(k) ** (-beta)
    if eps >= 0.5:
        raise ValidationError(
            f"hole radius {eps:.4g} reaches the unit-cell half-width; "
            "increase k or beta"
        )
    if eps < 2 * h:
        raise ResolutionError(
            f"hole radius {eps:.4g} is below 2h = {2 * h:.4g}; refine the grid"
        )
    s = math.isqrt(k)
    m = k - s * s  # strip cell count (0 when k is a perfect square)

    # Half-offset ladder so node centers never land on cell edges or y = 0.
    def ladder(lo, hi):
        i0 = math.floor(lo / h) - 2
        i1 = math.ceil(hi / h) + 2
        return h * (np.arange(i0, i1 + 1) + 0.5)

    xs = ladder(0.0, float(max(s, m)))
    ys = ladder(-1.0 if m > 0 else 0.0, float(s))

    def predicate(x, y):
        in_block = (x > 0) & (x < s) & (y > 0) & (y < s)
        mask = in_block | ((x > 0) & (x < m) & (y > -1) & (y < 0)) if m > 0 else in_block
        # all hole centers sit at cell centers of the unit lattice, so one
        # periodic distance test covers every perforation at once
        u = x - np.floor(x) - 0.5
        v = y - np.floor(y) - 0.5
        return mask & (u * u + v * v > eps * eps)

    return _from_predicate([xs, ys], h, predicate, node_budget, spec)


def _build_pepper(m: int, eps: float, h: float, node_budget: int) -> GridDomain:
    """Open square of half-side m + 1/2 minus closed disks at the integer
    lattice points with max-norm at most m ((2m+1)² thickened punctures)."""
    n = max(2, 2 * round(1.0 / (2.0 * h)))  # even nodes per unit: lattice points are nodes
    h = 1.0 / n
    if eps < h:
        raise ResolutionError(f"puncture radius {eps:.4g} is below h = {h:.4g}")
    half = m + 0.5
    ax = _axis_nodes(-half, half, h)

    def predicate(x, y):
        mask = (np.abs(x) < half) & (np.abs(y) < half)
        # punctures sit at the integer lattice; inside the window the nearest
        # lattice point always has max-norm <= m, so a periodic test suffices
        u = x - np.round(x)
        v = y - np.round(y)
        return mask & (u * u + v * v > eps * eps)

    spec = DomainSpec.pepper_window(m, eps, h)  # record the effective spacing
    return _from_predicate([ax, ax], h, predicate, node_budget, spec)


def interval_domain(a: float, b: float, h: float) -> GridDomain:
    """1d open interval (a, b); nodes aligned to multiples of h."""
    if not b > a:
        raise ValidationError("interval requires a < b")
    ax = _axis_nodes(a, b, h)
    mask = (ax > a) & (ax < b)
    return GridDomain(1, h, (float(ax[0]),), mask, DomainSpec.interval(a, b, h))


def inradius(domain: GridDomain) -> float:
    """Largest exact Euclidean node-center distance from Ω to its complement."""
    dist = ndimage.distance_transform_edt(domain.inside, sampling=domain.h)
    return float(dist.max())


def distance_transform(domain: GridDomain) -> np.ndarray:
    """Exact Euclidean distance of every inside node to the nearest outside node."""
    return ndimage.distance_transform_edt(domain.inside, sampling=domain.h)


def topology_order(domain: GridDomain) -> int:
    """Number of complement components in the one-point compactification.

    Inside nodes must form a single 8-connected component; the complement is
    labeled with 4-connectivity and all components touching the window border
    count as one unbounded component.
    """
    if domain.dim != 2:
        raise ValidationError("topology_order requires a 2d domain")
    _, n_in = ndimage.label(domain.inside, structure=_STRUCT8)
    if n_in != 1:
        raise ValidationError(f"domain mask is disconnected: {n_in} components")
    labels, n_c = ndimage.label(~domain.inside, structure=_STRUCT4)
    border = np.unique(
        np.concatenate(
            [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
        )
    )
    border = border[border > 0]
    return int(n_c - border.size + 1)


def projection_length(obstacle: ObstacleSet, axis: int) -> float:
    """Discrete H¹ measure of the projection of Σ along the axis direction.

    axis=1 projects along e₁ (image on the y axis: distinct rows count),
    axis=2 projects along e₂ (image on the x axis: distinct columns count).
    """
    if obstacle.parent.dim != 2:
        raise ValidationError("projection_length requires a 2d grid")
    if axis not in (1, 2):
        raise ValidationError("axis must be 1 or 2")
    col = 1 if axis == 1 else 0
    distinct = np.unique(obstacle.nodes[:, col]).size
    return float(distinct * obstacle.parent.h)


@dataclass(frozen=True)
class FatnessWitness:
    """Outcome of the fat-complement check on a multiply connected set."""

    obstacle: ObstacleSet
    projections: tuple[float, float]
    threshold: float
    margin: float
    passed: bool
    order: int
    inradius: float


def taylor_fatness_check(
    domain: GridDomain, square_center, square_side: float
) -> FatnessWitness:
    """Check that the complement inside the prescribed square projects long.

    The square must have side 10(⌊√k⌋+1) r with k the topological order and r
    the inradius; Σ = (closed square) \\ Ω must then project, on at least one
    axis, to length at least (√k / 4) r, up to a 2h rasterization slack.
    """
    k = topology_order(domain)
    r = inradius(domain)
    expected = 10.0 * (math.isqrt(k) + 1) * r
    if abs(square_side - expected) > 1e-9 * expected:
        raise ValidationError(
            f"square side must be 10(⌊√k⌋+1)r = {expected:.6g}, got {square_side:.6g}"
        )
    cx, cy = float(square_center[0]), float(square_center[1])
    half = square_side / 2.0
    win = domain.window()
    if (
        cx - half < win[0][0]
        or cx + half > win[0][1]
        or cy - half < win[1][0]
        or cy + half > win[1][1]
    ):
        raise ValidationError("square extends outside the grid window")
    x = domain.axis_coordinates(0)[:, None]
    y = domain.axis_coordinates(1)[None, :]
    tol = 1e-9 * domain.h
    in_square = (np.abs(x - cx) <= half + tol) & (np.abs(y - cy) <= half + tol)
    if not (in_square & domain.inside).any():
        raise ValidationError(
            "square does not meet the domain; topological order is undefined there"
        )
    sigma_mask = in_square & ~domain.inside
    if not sigma_mask.any():
        raise ValidationError("square contains no complement nodes")
    sigma = ObstacleSet.from_mask(domain, sigma_mask)
    proj = (projection_length(sigma, 1), projection_length(sigma, 2))
    threshold = math.sqrt(k) / 4.0 * r - 2.0 * domain.h
    margin = max(proj) - threshold
    return FatnessWitness(sigma, proj, threshold, margin, margin >= 0.0, k, r)


def scale(domain: GridDomain, t: float) -> GridDomain:
    """Dilate the physical set by t, keeping the mask (spacing becomes t*h)."""
    if not (t > 0):
        raise ValidationError("scale factor must be positive")
    return GridDomain(
        domain.dim, domain.h * t, tuple(c * t for c in domain.origin), domain.inside
    )


def refine(domain: GridDomain, factor: int) -> GridDomain:
    """Refine the grid by an integer factor, preserving the rasterized set
    (each node becomes a factor^dim block of nodes at spacing h/factor)."""
    if int(factor) != factor or factor < 1:
        raise ValidationError("refinement factor must be a positive integer")
    factor = int(factor)
    mask = domain.inside
    for axis in range(domain.dim):
        mask = np.repeat(mask, factor, axis=axis)
    hf = domain.h / factor
    origin = tuple(c - (factor - 1) / 2.0 * hf for c in domain.origin)
    return GridDomain(domain.dim, hf, origin, mask)


def pad_window(domain: GridDomain, pad_nodes: int) -> GridDomain:
    """Grow the window by pad_nodes outside nodes on every side."""
    if pad_nodes < 0:
        raise ValidationError("pad_nodes must be non-negative")
    if pad_nodes == 0:
        return domain
    mask = np.pad(domain.inside, pad_nodes)
    origin = tuple(c - pad_nodes * domain.h for c in domain.origin)
    return GridDomain(domain.dim, domain.h, origin, mask, domain.spec)


def crop_to_inside(domain: GridDomain, margin: int = 1) -> GridDomain:
    """Shrink the window to the inside bounding box plus a margin ring."""
    idx = np.argwhere(domain.inside)
    lo = np.maximum(idx.min(axis=0) - margin, 0)
    hi = np.minimum(idx.max(axis=0) + margin + 1, np.asarray(domain.shape))
    slices = tuple(slice(int(a), int(b)) for a, b in zip(lo, hi))
    origin = tuple(
        domain.origin[a] + domain.h * int(lo[a]) for a in range(domain.dim)
    )
    return GridDomain(domain.dim, domain.h, origin, domain.inside[slices], domain.spec)


# ---------------------------------------------------------------------------
# Mask files: binary PGM (P5) with a JSON sidecar; 1d domains as JSON intervals.


def _atomic_write_bytes(path: str, data: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sidecar_path(path: str) -> str:
    return path + ".json"


def save_domain(domain: GridDomain, path: str, spec: DomainSpec | None = None) -> None:
    """Write a 2d mask as binary PGM (0 outside, 255 inside) plus sidecar,
    or a 1d domain as a JSON interval list."""
    if spec is None:
        spec = domain.spec
    meta = {
        "dim": domain.dim,
        "h": domain.h,
        "origin": list(domain.origin),
        "spec": spec.to_string() if spec is not None else None,
    }
    if domain.dim == 1:
        runs = []
        m = domain.inside
        x = domain.axis_coordinates(0)
        i = 0
        while i < m.size:
            if m[i]:
                j = i
                while j + 1 < m.size and m[j + 1]:
                    j += 1
                runs.append({"start": float(x[i]), "end": float(x[j])})
                i = j + 1
            else:
                i += 1
        meta["nodes"] = int(m.size)
        meta["intervals"] = runs
        _atomic_write_bytes(path, json.dumps(meta, indent=1).encode())
        return
    raster = (domain.inside.T.astype(np.uint8) * 255).tobytes()
    header = f"P5\n{domain.shape[0]} {domain.shape[1]}\n255\n".encode()
    _atomic_write_bytes(path, header + raster)
    _atomic_write_bytes(sidecar_path(path), json.dumps(meta, indent=1).encode())


def load_domain(path: str) -> GridDomain:
    """Inverse of save_domain; the mask round-trips bit for bit. A sidecar
    spec string, when present, is parsed back onto the domain."""
    if path.endswith(".json") or path.endswith(".JSON"):
        with open(path, "rb") as f:
            meta = json.load(f)
        if meta.get("dim") != 1:
            raise ValidationError(f"{path}: expected a 1d interval domain")
        h = float(meta["h"])
        origin = float(meta["origin"][0])
        mask = np.zeros(int(meta["nodes"]), dtype=bool)
        for run in meta["intervals"]:
            i0 = round((float(run["start"]) - origin) / h)
            i1 = round((float(run["end"]) - origin) / h)
            mask[i0 : i1 + 1] = True
        spec = DomainSpec.parse(meta["spec"], h) if meta.get("spec") else None
        return GridDomain(1, h, (origin,), mask, spec)
    with open(path, "rb") as f:
        magic = f.readline().split()
        if not magic or magic[0] != b"P5":
            raise ValidationError(f"{path}: not a binary PGM file")
        fields = []
        while len(fields) < 3:
            line = f.readline()
            if not line:
                raise ValidationError(f"{path}: truncated PGM header")
            if line.startswith(b"#"):
                continue
            fields.extend(line.split())
        w, hgt, maxval = (int(v) for v in fields[:3])
        if maxval != 255:
            raise ValidationError(f"{path}: expected maxval 255")
        raster = np.frombuffer(f.read(w * hgt), dtype=np.uint8)
        if raster.size != w * hgt:
            raise ValidationError(f"{path}: truncated PGM raster")
    try:
        with open(sidecar_path(path), "rb") as f:
            meta = json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"missing sidecar {sidecar_path(path)}") from None
    mask = raster.reshape(hgt, w).T != 0
    h2 = float(meta["h"])
    spec = DomainSpec.parse(meta["spec"], h2) if meta.get("spec") else None
    return GridDomain(2, h2, tuple(meta["origin"]), mask, spec)
