"""Pure-Python kernel lane.

Reference implementations of the two hot kernels: batched random walk
with restart, and induced normalized adjacency construction. The compiled
lane in ``_kernels.pyx`` runs the same algorithms over C integers and must
agree with this module bit for bit; the parity suite enforces that.

Inputs arrive pre-validated from :mod:`anemone.kernels`, so these
functions assume contiguous int64/uint64 arrays and sane scalars.
"""

import numpy as np

from .rng import SplitMix64

LANE = "pure"


def rwr_batch(indptr, indices, targets, k, restart_prob, budget, seeds):
    """Run one random walk with restart per target.

    Each walk starts at its target (which counts as visited), then per
    step draws one uniform: below ``restart_prob`` the walk teleports home
    (one draw consumed), otherwise it draws a second value to pick a
    uniform neighbor (two draws). Distinct nodes are collected in
    first-visit order until ``k`` are found or ``budget`` steps are spent;
    remaining slots are padded with the target id.

    Returns
    -------
    nodes : ndarray of int64, shape (B, k)
        Row b holds the subgraph of targets[b]; column 0 is the target.
    n_real : ndarray of int64, shape (B,)
        Distinct nodes actually collected per row (pads excluded).
    """
    b_total = targets.shape[0]
    nodes = np.empty((b_total, k), dtype=np.int64)
    n_real = np.empty(b_total, dtype=np.int64)
    for b in range(b_total):
        t = int(targets[b])
        nodes[b, :] = t
        found = 1
        # Isolated start: the walk can never leave, every slot pads.
        if k > 1 and indptr[t + 1] > indptr[t]:
            s = SplitMix64(int(seeds[b]))
            row = nodes[b]
            cur = t
            steps = 0
            while found < k and steps < budget:
                steps += 1
                if s.uniform01() < restart_prob:
                    cur = t
                else:
                    lo = indptr[cur]
                    deg = indptr[cur + 1] - lo
                    if deg == 0:
                        break
                    cur = int(indices[lo + s.randint(int(deg))])
                    for i in range(found):
                        if row[i] == cur:
                            break
                    else:
                        row[found] = cur
                        found += 1
        n_real[b] = found
    return nodes, n_real


def induced_norm_adj(indptr, indices, nodes, n_real):
    """Normalized adjacency of each sampled subgraph.

    For every row of ``nodes``, builds the adjacency induced on the first
    ``n_real`` entries (pads stay isolated), adds self-loops on all k
    slots, and normalizes symmetrically: D^{-1/2} (A + I) D^{-1/2}.

    Returns an array of shape (B, k, k) float64.
    """
    b_total, k = nodes.shape
    out = np.zeros((b_total, k, k), dtype=np.float64)
    for b in range(b_total):
        a = out[b]
        m = int(n_real[b])
        for i in range(m):
            u = int(nodes[b, i])
            lo, hi = indptr[u], indptr[u + 1]
            row = indices[lo:hi]
            for j in range(i + 1, m):
                v = nodes[b, j]
                p = np.searchsorted(row, v)
                if p < row.size and row[p] == v:
                    a[i, j] = 1.0
                    a[j, i] = 1.0
        for i in range(k):
            a[i, i] += 1.0
        dinv = 1.0 / np.sqrt(a.sum(axis=1))
        a *= dinv[:, None]
        a *= dinv[None, :]
    return out
