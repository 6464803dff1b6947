"""Relative p-capacity: minimal discrete p-Dirichlet energy among fields that
are 1 on the obstacle nodes and vanish outside the container.

p = 2 is a single pinned-node linear solve. Other exponents run reweighted
quadratic solves with the same smoothing schedule as the frequency solver,
accepting steps only when the true (unsmoothed) energy decreases; iterates
stay in [0, 1], where truncation can only lower the energy.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse.linalg as spla

from gridfreq import geometry as G
from gridfreq.errors import ValidationError
from gridfreq.solvers import fields as F
from gridfreq.solvers import frequency
from gridfreq.solvers._assemble import dirichlet_matrix
from gridfreq.solvers.frequency import _DIRECT_LIMIT, _amg_preconditioner


def _energy(u: np.ndarray, h: float, p: float) -> float:
    """True p-energy; the 1d path sums with fsum so that exact closed-form
    cases (equal increments) come out bit-exact."""
    if u.ndim == 2:
        return F.energy_zero(u, h, p)
    du = np.diff(np.pad(u, 1))
    return h ** (1.0 - p) * math.fsum(np.abs(du) ** p)


def _pinned_solve(mask: np.ndarray, pinned: np.ndarray, cell_w=None):
    """Minimize the weighted quadratic energy with inside nodes `pinned`
    held at 1 and zero extension outside. Returns (full-grid field, relative
    linear residual)."""
    A = dirichlet_matrix(mask, cell_w)
    sel = pinned[mask]
    free = ~sel
    x = np.ones(A.shape[0])
    res = 0.0
    if free.any():
        Aff = A[free][:, free].tocsc()
        rhs = -np.asarray(A[free][:, sel].sum(axis=1)).ravel()
        nrhs = np.linalg.norm(rhs)
        if nrhs > 0.0:
            if Aff.shape[0] <= _DIRECT_LIMIT:
                lu = spla.splu(Aff)
                xf = lu.solve(rhs)
                xf += lu.solve(rhs - Aff @ xf)  # one refinement pass
            else:
                M = _amg_preconditioner(Aff.tocsr())
                xf, info = spla.cg(Aff, rhs, rtol=1e-10, atol=0.0, maxiter=3000, M=M)
                if info != 0:
                    raise ValidationError("capacity linear solve stalled")
            res = float(np.linalg.norm(rhs - Aff @ xf) / nrhs)
            x[free] = xf
        else:
            x[free] = 0.0
    u = np.zeros(mask.shape)
    u[mask] = x
    return u, res


def _coarea_round(u: np.ndarray, mask: np.ndarray, pinned: np.ndarray, h: float):
    """Best superlevel-set indicator of u (all feasible: they contain the
    pinned nodes and vanish outside). Returns (energy, indicator)."""
    best_e, best = math.inf, None
    for s in np.linspace(0.005, 0.995, 100):
        ind = np.where(mask & ((u > s) | pinned), 1.0, 0.0)
        e = _energy(ind, h, 1.0)
        if e < best_e:
            best_e, best = e, ind
    return best_e, best


def _tv_solve(mask, pinned, h, tol, max_iter):
    """p = 1: primal-dual iteration on the (convex) total-variation problem.

    The dual variable lives on the same padded-cell layout as the energy
    kernels; the constraint set (1 on pinned, 0 outside, values in [0, 1])
    is handled by projection. The smooth descent machinery is never used
    here. Returns (value, field, iterations, residual, converged)."""
    dim = mask.ndim
    u = np.where(pinned, 1.0, 0.0)
    ubar = u.copy()
    tau = sigma = 0.35 if dim == 1 else 0.25

    def project(v):
        np.clip(v, 0.0, 1.0, out=v)
        v[~mask] = 0.0
        v[pinned] = 1.0
        return v

    if dim == 1:
        xi = np.zeros(mask.size + 1)
    else:
        n0, n1 = mask.shape
        xi = np.zeros((2, n0 + 1, n1 + 1))
    E = _energy(u, h, 1.0)
    rel = math.inf
    iters = 0
    while iters < max_iter:
        iters += 1
        if dim == 1:
            du = np.diff(np.pad(ubar, 1))
            xi += sigma * du
            np.clip(xi, -1.0, 1.0, out=xi)
            g = np.zeros(mask.size + 2)
            g[1:] += xi
            g[:-1] -= xi
            step = g[1:-1]
        else:
            up = np.pad(ubar, 1)
            xi[0] += sigma * (up[1:, :-1] - up[:-1, :-1])
            xi[1] += sigma * (up[:-1, 1:] - up[:-1, :-1])
            nrm = np.sqrt(xi[0] ** 2 + xi[1] ** 2)
            scale = h / np.maximum(nrm, h)  # dual ball radius h per cell
            xi *= scale
            g = np.zeros((n0 + 2, n1 + 2))
            g[1:, :-1] += xi[0]
            g[:-1, 1:] += xi[1]
            g[:-1, :-1] -= xi[0] + xi[1]
            step = g[1:-1, 1:-1]
        unew = project(u - tau * step)
        ubar = 2.0 * unew - u
        u = unew
        if iters % 50 == 0:
            En = _energy(u, h, 1.0)
            rel = abs(E - En) / max(En, 1e-300)
            E = En
            if rel < tol:
                break
    E = _energy(u, h, 1.0)
    e_ind, ind = _coarea_round(u, mask, pinned, h)
    if e_ind < E:
        E, u = e_ind, ind
    return E, u, iters, rel, rel < tol


def _solve(mask, pinned, p, h, tol, max_iter):
    if p == 1.0:
        return _tv_solve(mask, pinned, h, tol, max_iter)
    u, lin_res = _pinned_solve(mask, pinned)
    np.clip(u, 0.0, 1.0, out=u)
    if p == 2.0:
        return _energy(u, h, p), u, 1, lin_res, lin_res <= max(tol, 1e-9)
    E = _energy(u, h, p)
    iters = 0
    rel = math.inf
    deltas = F.smoothing_schedule(p)
    for si, stage in enumerate(deltas):
        last = si == len(deltas) - 1
        stage_tol = tol if last else max(tol, 1e-6)
        stage_cap = max_iter if last else min(max_iter, iters + 60)
        stall = False
        while iters < stage_cap and not stall:
            iters += 1
            delta = F.stage_delta(stage, p, u, h)
            w = F.cell_weights(u, h, p, delta)
            try:
                v, _ = _pinned_solve(mask, pinned, w)
            except ValidationError:
                break
            np.clip(v, 0.0, 1.0, out=v)
            accepted = False
            for t in (1.0, 0.5, 0.25, 0.1, 0.03, 0.01, 0.003, 0.001):
                cand = u + t * (v - u)
                Ec = _energy(cand, h, p)
                if Ec < E:
                    rel = (E - Ec) / E
                    u, E = cand, Ec
                    accepted = True
                    break
            if not accepted or (accepted and rel < stage_tol):
                stall = True
        if iters >= max_iter:
            break
    ok = rel < tol or rel == math.inf
    if rel == math.inf:
        rel = 0.0
    return E, u, iters, rel, ok


def _refined_pair(container: G.GridDomain, obstacle: G.ObstacleSet):
    """Container and obstacle at half the spacing. When both carry parametric
    descriptions the pair is re-rasterized from them, so the finer problem
    targets the same physical shapes; otherwise the mask is block-refined and
    each obstacle cell maps to the 2^dim sub-cells of the same extent."""
    if container.spec is not None and obstacle.spec is not None:
        fine = frequency.half_spacing(container)
        return fine, obstacle.on_grid(fine)
    fine = G.refine(container, 2)
    nodes = obstacle.nodes
    if container.dim == 1:
        parts = [2 * nodes + d for d in (0, 1)]
    else:
        parts = [2 * nodes + np.array(d) for d in ((0, 0), (0, 1), (1, 0), (1, 1))]
    return fine, G.ObstacleSet(fine, np.concatenate(parts))


def capacity(
    container: G.GridDomain,
    obstacle: G.ObstacleSet,
    p: float,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    extrapolate: bool = False,
) -> F.SolveReport:
    """cap_p(obstacle; container) on the grid."""
    if not (p >= 1.0) or p == math.inf:
        raise ValidationError(f"capacity requires finite p >= 1, got {p}")
    par = obstacle.parent
    if par is not container and (
        par.dim != container.dim
        or par.h != container.h
        or par.origin != container.origin
        or par.shape != container.shape
    ):
        raise ValidationError("obstacle grid does not match the container grid")
    if not container.inside[tuple(obstacle.nodes.T)].all():
        raise ValidationError("obstacle nodes must be inside the container")
    pinned = np.zeros(container.shape, dtype=bool)
    pinned[tuple(obstacle.nodes.T)] = True

    val, u, iters, rel, ok = _solve(
        container.inside, pinned, p, container.h, tol, max_iter
    )
    extr = None
    if extrapolate:
        fine, fine_obs = _refined_pair(container, obstacle)
        fine_pinned = np.zeros(fine.shape, dtype=bool)
        fine_pinned[tuple(fine_obs.nodes.T)] = True
        val2, _, _, _, ok2 = _solve(
            fine.inside, fine_pinned, p, fine.h, tol, max_iter
        )
        ok = ok and ok2
        extr = 2.0 * val2 - val
    return F.SolveReport(
        value=val,
        field=F.Field(container, u, "zero"),
        iterations=iters,
        residual=rel,
        h=container.h,
        extrapolated=extr,
        converged=ok,
        inputs={"p": p, "quantity": "capacity", "obstacle_nodes": obstacle.count},
    )
