"""Principal frequency with sup normalization (q = infinity).

For p above the dimension the quotient is attained by fields pinned to 1 at
a single node, so the discrete value is the smallest single-node capacity
over the domain. Candidates are local maxima of the distance transform;
a neighbor-descent search around the best candidate finishes the job.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy import ndimage

from gridfreq import geometry as G
from gridfreq.errors import ValidationError
from gridfreq.solvers import fields as F
from gridfreq.solvers.capacity import capacity

_MAX_SEEDS = 24


def _seed_nodes(domain: G.GridDomain) -> list[tuple[int, ...]]:
    """Local maxima of the distance transform, deepest first, with plateau
    duplicates (Chebyshev distance <= 2) suppressed."""
    dist = G.distance_transform(domain)
    peak = ndimage.maximum_filter(dist, size=3, mode="constant")
    cand = np.argwhere((dist > 0) & (dist >= peak))
    depth = dist[tuple(cand.T)]
    cand = cand[np.argsort(-depth, kind="stable")]
    kept: list[tuple[int, ...]] = []
    for node in cand:
        key = tuple(int(i) for i in node)
        if all(max(abs(a - b) for a, b in zip(key, other)) > 2 for other in kept):
            kept.append(key)
        if len(kept) == _MAX_SEEDS:
            break
    return kept


def linf_frequency(
    domain: G.GridDomain,
    p: float,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    extrapolate: bool = False,
) -> F.SolveReport:
    """Smallest single-node capacity over the domain (requires p > dim)."""
    if not p > domain.dim:
        raise ValidationError(
            f"linf frequency requires p > dim = {domain.dim}, got p = {p}"
        )
    cache: dict[tuple[int, ...], F.SolveReport] = {}

    def solve_at(key):
        if key not in cache:
            obs = G.ObstacleSet(domain, np.asarray(key)[None, :])
            cache[key] = capacity(domain, obs, p, tol=tol, max_iter=max_iter)
        return cache[key]

    seeds = _seed_nodes(domain)
    best_key = seeds[0]
    best = solve_at(best_key)
    for key in seeds[1:]:
        rep = solve_at(key)
        if rep.value < best.value:
            best_key, best = key, rep

    offsets = [d for d in itertools.product((-1, 0, 1), repeat=domain.dim) if any(d)]
    shape = domain.shape
    moved = True
    while moved:
        moved = False
        for off in offsets:
            nb = tuple(best_key[a] + off[a] for a in range(domain.dim))
            if any(i < 0 or i >= shape[a] for a, i in enumerate(nb)):
                continue
            if not domain.inside[nb]:
                continue
            rep = solve_at(nb)
            if rep.value < best.value:
                best_key, best = nb, rep
                moved = True

    extr = None
    if extrapolate:
        obs = G.ObstacleSet.from_point(
            domain, tuple(domain.origin[a] + best_key[a] * domain.h for a in range(domain.dim))
        )
        extr = capacity(
            domain, obs, p, tol=tol, max_iter=max_iter, extrapolate=True
        ).extrapolated

    return F.SolveReport(
        value=best.value,
        field=best.field,
        iterations=sum(r.iterations for r in cache.values()),
        residual=best.residual,
        h=domain.h,
        extrapolated=extr,
        converged=best.converged,
        inputs={
            "quantity": "linf_frequency",
            "p": p,
            "optimal_node": best_key,
            "candidates": len(cache),
        },
    )
