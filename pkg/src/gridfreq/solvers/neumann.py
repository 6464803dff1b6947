"""Optimal Poincare constant with natural boundary: the smallest ratio of
the p-Dirichlet energy (inside-inside pairs only) to ||u - t_u||_q^p, where
t_u is the scalar that minimizes ||u - t||_q. Subtracting the optimal shift
replaces the usual zero-mean constraint and keeps the quotient well defined
for every q; the shift is recomputed from scratch on every candidate field.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import brentq

from gridfreq import geometry as G
from gridfreq.bounds import Exponents
from gridfreq.errors import ValidationError
from gridfreq.solvers import fields as F
from gridfreq.solvers._assemble import free_matrix

_LINE_STEPS = (1.0, 0.5, 0.25, 0.1, 0.03, 0.01, 0.003, 0.001)
_DENSE_LIMIT = 96


def optimal_shift(vals: np.ndarray, q: float) -> float:
    """The unique scalar t minimizing ||vals - t||_q (median when q = 1,
    mean when q = 2, root of the monotone q-derivative otherwise)."""
    if q == 2.0:
        return float(vals.mean())
    if q == 1.0:
        return float(np.median(vals))
    lo, hi = float(vals.min()), float(vals.max())
    if lo == hi:
        return lo

    def der(t):
        d = vals - t
        return float(np.sum(np.sign(d) * np.abs(d) ** (q - 1.0)))

    dlo, dhi = der(lo), der(hi)
    if dlo <= 0.0:
        return lo
    if dhi >= 0.0:
        return hi
    return float(brentq(der, lo, hi, xtol=1e-14))


def neumann_quotient(u: np.ndarray, domain: G.GridDomain, p: float, q: float) -> float:
    """Free-boundary Rayleigh quotient with the optimal shift removed."""
    vals = u[domain.inside]
    t = optimal_shift(vals, q)
    den = float(np.sum(np.abs(vals - t) ** q)) * domain.h**domain.dim
    if den <= 0.0:
        raise ValidationError("quotient undefined for constant fields")
    return F.energy_free(u - t, domain.inside, domain.h, p) / den ** (p / q)


def _second_pair(A, B, guess):
    """Second-smallest eigenpair of A x = theta B x (the smallest is the
    constants at theta = 0)."""
    if A.shape[0] <= _DENSE_LIMIT:
        from scipy.linalg import eigh

        w, V = eigh(A.toarray(), B.toarray())
        return float(w[1]), V[:, 1]
    raw = float(guess @ (A @ guess)) / max(float(guess @ (B @ guess)), 1e-300)
    sigma = -0.5 * max(raw, 1e-12)
    w, V = spla.eigsh(A, k=2, M=B, sigma=sigma, which="LM", v0=guess)
    order = np.argsort(w)
    return float(w[order[1]]), V[:, order[1]]


def _center_normalize(u_grid, mask, q):
    vals = u_grid[mask]
    t = optimal_shift(vals, q)
    shifted = np.where(mask, u_grid - t, 0.0)
    nrm = float(np.sum(np.abs(shifted[mask]) ** q)) ** (1.0 / q)
    if nrm <= 0.0:
        raise ValidationError("quotient undefined for constant fields")
    return shifted / nrm


def neumann_constant(
    domain: G.GridDomain,
    e: Exponents,
    tol: float = 1e-8,
    max_iter: int = 10_000,
) -> F.SolveReport:
    p, q = e.p, e.q
    if q == math.inf:
        raise ValidationError("free-boundary constant needs q < inf")
    if q < p:
        raise ValidationError(f"free-boundary constant needs q >= p, got ({p}, {q})")
    mask = domain.inside
    h = domain.h
    A = free_matrix(mask)
    n = A.shape[0]
    if n < 2:
        raise ValidationError("domain too small for a non-constant field")

    ident = sp.identity(n, format="csr")
    coords = np.argwhere(mask)[:, 0].astype(float)
    lam2, v2 = _second_pair(A, ident, coords - coords.mean())
    if p == 2.0 and q == 2.0:
        res = float(np.linalg.norm(A @ v2 - lam2 * v2) / np.linalg.norm(v2))
        u = np.zeros(domain.shape)
        u[mask] = v2
        u = _center_normalize(u, mask, q)
        return F.SolveReport(
            value=lam2 / h**2,
            field=F.Field(domain, u, "free"),
            iterations=1,
            residual=res / max(lam2, 1e-300),
            h=h,
            converged=True,
            inputs={"quantity": "neumann_constant", "p": p, "q": q},
        )

    u = np.zeros(domain.shape)
    u[mask] = v2
    u = _center_normalize(u, mask, q)
    Q = neumann_quotient(u, domain, p, q)
    rel = math.inf
    iters = 0
    deltas = F.smoothing_schedule(max(p, q) if q > 2.0 else p)
    for si, stage in enumerate(deltas):
        last = si == len(deltas) - 1
        stage_tol = tol if last else max(tol, 1e-6)
        stage_cap = max_iter if last else min(max_iter, iters + 60)
        stall = False
        while not stall and iters < stage_cap:
            iters += 1
            dn = F.stage_delta(stage, p, u, h)
            w = F.free_cell_weights(u, mask, h, p, dn)
            Aw = free_matrix(mask, w)
            vals = u[mask]
            if q == 2.0:
                b = np.ones(n)
            else:
                dd = stage if q < 2.0 else max(stage * float(np.abs(vals).max()), 1e-12)
                b = (vals * vals + dd * dd) ** (q / 2.0 - 1.0)
            _, x = _second_pair(Aw, sp.diags(b).tocsr(), vals)
            v = np.zeros(domain.shape)
            v[mask] = x if float(x @ vals) >= 0.0 else -x
            try:
                v = _center_normalize(v, mask, q)
            except ValidationError:
                stall = True
                continue
            accepted = False
            for s in _LINE_STEPS:
                cand = (1.0 - s) * u + s * v
                try:
                    Qc = neumann_quotient(cand, domain, p, q)
                except ValidationError:
                    continue
                if Qc < Q:
                    rel = (Q - Qc) / Q
                    u = _center_normalize(cand, mask, q)
                    Q = Qc
                    accepted = True
                    break
            if not accepted or rel < stage_tol:
                stall = True
        if iters >= max_iter:
            break
    ok = rel < tol or rel == math.inf
    if rel == math.inf:
        rel = 0.0
    return F.SolveReport(
        value=Q,
        field=F.Field(domain, u, "free"),
        iterations=iters,
        residual=rel,
        h=h,
        converged=ok,
        inputs={"quantity": "neumann_constant", "p": p, "q": q},
    )
