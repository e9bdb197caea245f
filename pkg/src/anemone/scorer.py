"""Multi-round statistical anomaly scoring.

A trained model cannot be read off a single sample: one subgraph is a
noisy witness. The scorer therefore repeats the contrastive measurement
over many independent sampling rounds. Per round and per discriminator,
node i gets a positive score s (its own subgraph against its target
embedding) and a negative score s~ (a random other node's subgraph
against the same embedding); the discrimination gap

    b = s~ - s

is near -1 for nodes the model recognizes confidently and near 0 for
nodes it cannot tell apart from noise. The per-view anomaly score is

    y_view = mean_r(b) + std_r(b)

over rounds (population standard deviation), and the final score blends
the views: y = alpha * y_context + (1 - alpha) * y_patch.

Every random choice is derived from (master seed, stream, round, node),
so scoring a subset of nodes reproduces exactly the numbers a full-graph
run assigns to those nodes.
"""

from dataclasses import dataclass

import numpy as np

from . import rng, sampling
from .errors import RangeError
from .nn import bilinear_forward, gcn_forward, readout_context, readout_patch


@dataclass(frozen=True)
class AnomalyReport:
    """Scores and per-view statistics for a set of nodes.

    ``base_gap_patch`` / ``base_gap_context`` hold the raw per-round gaps
    (rounds, len(node_ids)); everything else is per node.
    """

    node_ids: np.ndarray
    y: np.ndarray
    y_patch: np.ndarray
    y_context: np.ndarray
    mean_b_patch: np.ndarray
    std_b_patch: np.ndarray
    mean_b_context: np.ndarray
    std_b_context: np.ndarray
    base_gap_patch: np.ndarray
    base_gap_context: np.ndarray
    rounds: int
    alpha: float
    positive_gap_fraction: float


def _partners(seed, round_index, subset, num_nodes):
    """Uniform partner in [0, n) \\ {i} per subset node, derived per
    (round, node) so the draw ignores subset composition."""
    raw = rng.derive_seed_array(
        seed, rng.STREAM_SCORE_PARTNER, round_index, subset
    )
    u = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53
    j = np.floor(u * (num_nodes - 1)).astype(np.int64)
    j += j >= subset
    return j


def score_all(
    graph,
    params,
    rounds,
    alpha,
    seed,
    subgraph_size=4,
    restart_prob=0.5,
    subset=None,
    budget=None,
):
    """Score nodes by their discrimination-gap statistics over rounds.

    Parameters
    ----------
    graph : AttributedGraph
    params : ModelParams
        Trained discriminators.
    rounds : int
        Number of independent sampling rounds (R >= 1).
    alpha : float in [0, 1]
        View blend; 1 scores purely by context, 0 purely by patch.
    seed : int
        Master seed (the same one used for training keeps streams
        separated by tag, so reuse is safe).
    subset : int array, optional
        Node ids to score; defaults to every node. Scores are identical
        to the rows a full-graph run would produce.
    """
    n = graph.num_nodes
    if n < 2:
        raise RangeError("scoring needs at least two nodes to form pairs")
    rounds = int(rounds)
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if subset is None:
        subset = np.arange(n, dtype=np.int64)
    else:
        subset = np.ascontiguousarray(subset, dtype=np.int64).reshape(-1)
        if subset.size == 0:
            raise ValueError("subset must not be empty")
        if subset.min() < 0 or subset.max() >= n:
            raise RangeError(f"subset id out of range [0, {n})")
    if budget is None:
        budget = sampling.default_budget(subgraph_size)

    m = subset.size
    views = (
        ("patch", rng.VIEW_PATCH, params.patch, readout_patch),
        ("context", rng.VIEW_CONTEXT, params.context, readout_context),
    )
    # Parameters are fixed during scoring, so each view's projection is
    # computed once and reused across all rounds.
    xw_by_view = {name: graph.features @ vp.theta for name, _, vp, _ in views}
    gaps = {
        "patch": np.empty((rounds, m), dtype=np.float64),
        "context": np.empty((rounds, m), dtype=np.float64),
    }

    for r in range(rounds):
        partners = _partners(seed, r, subset, n)
        union = np.unique(np.concatenate([subset, partners]))
        pos_self = np.searchsorted(union, subset)
        pos_part = np.searchsorted(union, partners)
        for name, view_tag, vp, readout in views:
            seeds = sampling.view_seeds(
                seed, rng.STREAM_SCORE_VIEW, r, view_tag, union
            )
            nodes, adj, _ = sampling.sample_batch(
                graph.adjacency,
                union,
                subgraph_size,
                restart_prob,
                seeds,
                budget=budget,
            )
            xw_full = xw_by_view[name]
            xw = xw_full[nodes]
            xw[:, 0, :] = 0.0
            h_all, _ = gcn_forward(adj, xw)
            h = readout(h_all)
            z = np.maximum(xw_full[subset], 0.0)
            s_pos, _ = bilinear_forward(h[pos_self], vp.w, z)
            s_neg, _ = bilinear_forward(h[pos_part], vp.w, z)
            gaps[name][r] = s_neg - s_pos

    mean_p = gaps["patch"].mean(axis=0)
    mean_c = gaps["context"].mean(axis=0)
    std_p = gaps["patch"].std(axis=0)  # population std (divide by R)
    std_c = gaps["context"].std(axis=0)
    y_patch = mean_p + std_p
    y_context = mean_c + std_c
    y = alpha * y_context + (1.0 - alpha) * y_patch
    pos_count = int((gaps["patch"] > 0).sum() + (gaps["context"] > 0).sum())
    return AnomalyReport(
        node_ids=subset.copy(),
        y=y,
        y_patch=y_patch,
        y_context=y_context,
        mean_b_patch=mean_p,
        std_b_patch=std_p,
        mean_b_context=mean_c,
        std_b_context=std_c,
        base_gap_patch=gaps["patch"],
        base_gap_context=gaps["context"],
        rounds=rounds,
        alpha=alpha,
        positive_gap_fraction=pos_count / (2.0 * rounds * m),
    )
