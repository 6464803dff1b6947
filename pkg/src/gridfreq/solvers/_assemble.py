"""Sparse quadratic forms for the grid energies.

All matrices act on the vector of inside-node values. The convention matches
the energy helpers in fields.py: E(v) = v^T A v with the h factors already
folded in so that the companion mass matrix is h^dim * identity.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp


def index_map(mask: np.ndarray):
    idx = np.full(mask.shape, -1, dtype=np.int64)
    idx[mask] = np.arange(int(mask.sum()))
    return idx


def _pair_arrays_2d(mask, idx, cell_w):
    """Yield (i, j, w) for inside-inside pairs and (i, w) diagonal boosts for
    inside-ghost pairs, over both difference directions.

    cell_w has padded-cell shape (n0+1, n1+1); cell (A, B) carries the x-pair
    ((A-1, B-1), (A, B-1)) and the y-pair ((A-1, B-1), (A-1, B))."""
    n0, n1 = mask.shape
    pad = np.zeros((n0 + 2, n1 + 2), dtype=bool)
    pad[1:-1, 1:-1] = mask
    pidx = np.full(pad.shape, -1, dtype=np.int64)
    pidx[1:-1, 1:-1] = idx

    rows, cols, vals, drows, dvals = [], [], [], [], []
    for axis in (0, 1):
        if axis == 0:
            a_in = pad[:-1, :-1]
            b_in = pad[1:, :-1]
            a_id = pidx[:-1, :-1]
            b_id = pidx[1:, :-1]
        else:
            a_in = pad[:-1, :-1]
            b_in = pad[:-1, 1:]
            a_id = pidx[:-1, :-1]
            b_id = pidx[:-1, 1:]
        w = cell_w
        both = a_in & b_in
        rows.append(a_id[both])
        cols.append(b_id[both])
        vals.append(w[both])
        only_a = a_in & ~b_in
        drows.append(a_id[only_a])
        dvals.append(w[only_a])
        only_b = b_in & ~a_in
        drows.append(b_id[only_b])
        dvals.append(w[only_b])
    return (
        np.concatenate(rows),
        np.concatenate(cols),
        np.concatenate(vals),
        np.concatenate(drows),
        np.concatenate(dvals),
    )


def dirichlet_matrix(mask: np.ndarray, cell_w: np.ndarray | None = None) -> sp.csr_matrix:
    """Weighted zero-extension stiffness matrix: E(v) = v^T A v equals the
    (quadratic) weighted energy with v extended by zero outside the mask."""
    n = int(mask.sum())
    idx = index_map(mask)
    if mask.ndim == 1:
        m = mask.size
        if cell_w is None:
            cell_w = np.ones(m + 1)
        pad = np.zeros(m + 2, dtype=bool)
        pad[1:-1] = mask
        pidx = np.full(m + 2, -1, dtype=np.int64)
        pidx[1:-1] = idx
        a_in, b_in = pad[:-1], pad[1:]
        a_id, b_id = pidx[:-1], pidx[1:]
        both = a_in & b_in
        rows, cols, vals = a_id[both], b_id[both], cell_w[both]
        only = (a_in ^ b_in)
        drows = np.where(a_in[only], a_id[only], b_id[only])
        dvals = cell_w[only]
    else:
        if cell_w is None:
            cell_w = np.ones((mask.shape[0] + 1, mask.shape[1] + 1))
        rows, cols, vals, drows, dvals = _pair_arrays_2d(mask, idx, cell_w)
    # A = D - W - W^T with D the pair-degree diagonal plus ghost boosts
    diag = np.zeros(n)
    np.add.at(diag, rows, vals)
    np.add.at(diag, cols, vals)
    np.add.at(diag, drows, dvals)
    W = sp.coo_matrix((vals, (rows, cols)), shape=(n, n))
    return (sp.diags(diag) - W - W.T).tocsr()


def free_matrix(mask: np.ndarray, cell_w=None) -> sp.csr_matrix:
    """Natural-boundary stiffness: only inside-inside pairs contribute."""
    n = int(mask.sum())
    idx = index_map(mask)
    if mask.ndim == 1:
        both = mask[:-1] & mask[1:]
        if cell_w is None:
            cell_w = np.ones(mask.size - 1)
        rows, cols, vals = idx[:-1][both], idx[1:][both], cell_w[both]
    else:
        n0, n1 = mask.shape
        if cell_w is None:
            cell_w = np.ones((n0, n1))
        rs, cs, vs = [], [], []
        okx = mask[:-1, :] & mask[1:, :]
        rs.append(idx[:-1, :][okx])
        cs.append(idx[1:, :][okx])
        vs.append(cell_w[:-1, :][okx])
        oky = mask[:, :-1] & mask[:, 1:]
        rs.append(idx[:, :-1][oky])
        cs.append(idx[:, 1:][oky])
        vs.append(cell_w[:, :-1][oky])
        rows, cols, vals = np.concatenate(rs), np.concatenate(cs), np.concatenate(vs)
    diag = np.zeros(n)
    np.add.at(diag, rows, vals)
    np.add.at(diag, cols, vals)
    W = sp.coo_matrix((vals, (rows, cols)), shape=(n, n))
    return (sp.diags(diag) - W - W.T).tocsr()
