"""Contrastive training of the patch and context discriminators.

Each mini-batch step samples two anonymized subgraphs per target node
(one per discriminator), scores the agreement between every subgraph
embedding and its target embedding (positive pairs), scores mismatched
combinations (negative pairs), and minimizes a jointly weighted binary
cross entropy:

    L_view = -(1 / 2B) * sum_b [ m_b * ln s_b + ln(1 - s~_b) ]
    L      = alpha * L_context + (1 - alpha) * L_patch

where s_b is node b's positive score, s~_b its negative score, and m_b a
positive-term mask. Negative partners are the next batch element
(cyclically) in unsupervised mode. In few-shot mode, nodes known to be
anomalous become their own negative partner and lose their positive term
(m_b = 0): the model is explicitly pushed to disagree with a labeled
anomaly's own surroundings. Unlabeled nodes cycle among themselves.

Backward passes are hand-derived closed forms over the tapes returned by
the forward primitives in :mod:`anemone.nn`; no autodiff is involved.
"""

from dataclasses import dataclass

import numpy as np

from . import rng, sampling
from .errors import BatchError, NumericError, RangeError
from .nn import (
    adam_init,
    adam_step,
    bilinear_forward,
    gcn_backward,
    gcn_forward,
    init_params,
    readout_context,
    readout_patch,
)


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training run."""

    dim: int = 64
    subgraph_size: int = 4
    restart_prob: float = 0.5
    alpha: float = 0.8
    lr: float = 0.001
    epochs: int = 100
    batch_size: int = 300
    budget: int | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.subgraph_size < 1:
            raise ValueError("subgraph_size must be positive")
        if not 0.0 <= self.restart_prob <= 1.0:
            raise ValueError("restart_prob must lie in [0, 1]")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.lr <= 0.0:
            raise ValueError("lr must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be non-negative")


def partner_map(batch_size, labeled_mask=None):
    """Negative-partner permutation and positive-term mask for one batch.

    Unsupervised (``labeled_mask`` None): partner is the next element,
    cyclically, and every node keeps its positive term. A batch of one
    node necessarily partners with itself.

    Few-shot: labeled anomalies partner with themselves and drop their
    positive term; unlabeled nodes cycle among the unlabeled only (a lone
    unlabeled node partners with itself). The result is always a
    permutation of the batch.
    """
    if batch_size < 1:
        raise BatchError("batch must contain at least one node")
    if labeled_mask is None:
        partner = np.roll(np.arange(batch_size, dtype=np.int64), -1)
        m_pos = np.ones(batch_size, dtype=np.float64)
        return partner, m_pos
    labeled_mask = np.asarray(labeled_mask, dtype=bool)
    if labeled_mask.shape != (batch_size,):
        raise BatchError("labeled_mask must have one entry per batch element")
    partner = np.arange(batch_size, dtype=np.int64)
    unlabeled = np.flatnonzero(~labeled_mask)
    if unlabeled.size:
        partner[unlabeled] = np.roll(unlabeled, -1)
    m_pos = (~labeled_mask).astype(np.float64)
    return partner, m_pos


def view_loss_grad(x, theta, w, adj, nodes, targets, partner, m_pos, kind):
    """Loss, gradients, and scores of one discriminator on one batch.

    Parameters
    ----------
    x : float64 (n, D)
        Full feature matrix (raw; anonymization happens here).
    theta, w : parameters of this discriminator.
    adj : float64 (B, k, k), nodes : int64 (B, k)
        Sampled subgraphs, one per target.
    targets : int64 (B,)
    partner : int64 (B,)
        In-batch negative partner indices (a permutation).
    m_pos : float64 (B,)
        Positive-term mask (1 keeps the term, 0 drops it).
    kind : "patch" or "context"
        Readout: target slot or mean over all slots.

    Returns
    -------
    loss : float
    grads : dict with keys "theta" and "w"
    scores : (s_pos, s_neg) float64 arrays of shape (B,)
    """
    n_b = targets.shape[0]
    if n_b == 0:
        raise BatchError("batch must contain at least one node")
    k = nodes.shape[1]

    xw_full = x @ theta
    xw = xw_full[nodes]
    xw[:, 0, :] = 0.0  # anonymize the target slot
    h_full, pre = gcn_forward(adj, xw)
    if kind == "patch":
        h = readout_patch(h_full)
    elif kind == "context":
        h = readout_context(h_full)
    else:
        raise ValueError(f"unknown discriminator kind {kind!r}")
    zpre = xw_full[targets]
    z = np.maximum(zpre, 0.0)

    h_neg = h[partner]
    s_pos, u_pos = bilinear_forward(h, w, z)
    s_neg, u_neg = bilinear_forward(h_neg, w, z)
    # ln sigmoid(u) = -logaddexp(0, -u): exact at u = 0, stable everywhere.
    loss = (
        m_pos * np.logaddexp(0.0, -u_pos) + np.logaddexp(0.0, u_neg)
    ).sum() / (2.0 * n_b)

    # d loss / d u_pos and d loss / d u_neg per row.
    a_pos = m_pos * (s_pos - 1.0) / (2.0 * n_b)
    a_neg = s_neg / (2.0 * n_b)

    d_h = a_pos[:, None] * (z @ w.T)
    d_z = a_pos[:, None] * (h @ w)
    d_w = (h * a_pos[:, None]).T @ z
    d_z += a_neg[:, None] * (h_neg @ w)
    d_w += (h_neg * a_neg[:, None]).T @ z
    # Partner rows receive the negative-path h gradient; partner is a
    # permutation but add.at stays correct for any index multiset.
    np.add.at(d_h, partner, a_neg[:, None] * (z @ w.T))

    if kind == "patch":
        d_hfull = np.zeros_like(h_full)
        d_hfull[:, 0, :] = d_h
    else:
        d_hfull = np.broadcast_to((d_h / k)[:, None, :], h_full.shape)
    d_xw, _ = gcn_backward(adj, pre, d_hfull)
    d_zpre = d_z * (zpre > 0)

    # Scatter slot gradients back to graph rows, then through X. Slot 0
    # was forced to zero (a constant), so its gradient is dropped by
    # excluding it from the scatter.
    acc = np.zeros_like(xw_full)
    if k > 1:
        np.add.at(acc, nodes[:, 1:].ravel(), d_xw[:, 1:].reshape(-1, d_xw.shape[2]))
    np.add.at(acc, targets, d_zpre)
    d_theta = x.T @ acc

    return float(loss), {"theta": d_theta, "w": d_w}, (s_pos, s_neg)


def train(graph, config, seed, labeled_anomalies=None, on_batch=None):
    """Train both discriminators; returns (params, trace).

    Parameters
    ----------
    graph : AttributedGraph
    config : TrainConfig
    seed : int
        Master seed; initialization, shuffling, and sampling streams all
        derive from it.
    labeled_anomalies : int array, optional
        Known anomaly ids. Presence (even of an empty array) switches the
        loss to few-shot routing.
    on_batch : callable, optional
        Called with each trace row as it is produced.

    Returns
    -------
    params : ModelParams
    trace : list of (epoch, batch, loss_patch, loss_context, loss_total)
    """
    n = graph.num_nodes
    x = graph.features
    few_shot = labeled_anomalies is not None
    labeled_full = np.zeros(n, dtype=bool)
    if few_shot:
        ids = np.asarray(labeled_anomalies, dtype=np.int64).reshape(-1)
        if ids.size and (ids.min() < 0 or ids.max() >= n):
            raise RangeError("labeled anomaly id out of range")
        labeled_full[ids] = True

    params = init_params(graph.num_features, config.dim, seed)
    opt = adam_init(params, lr=config.lr)
    budget = (
        config.budget
        if config.budget is not None
        else sampling.default_budget(config.subgraph_size)
    )

    trace = []
    for epoch in range(config.epochs):
        order = rng.generator(
            rng.derive_seed(seed, rng.STREAM_SHUFFLE, epoch)
        ).permutation(n)
        for b_idx, start in enumerate(range(0, n, config.batch_size)):
            batch = np.ascontiguousarray(
                order[start : start + config.batch_size], dtype=np.int64
            )
            partner, m_pos = partner_map(
                batch.size, labeled_full[batch] if few_shot else None
            )

            view_grads = {}
            losses = {}
            for view_tag, kind, vp in (
                (rng.VIEW_PATCH, "patch", params.patch),
                (rng.VIEW_CONTEXT, "context", params.context),
            ):
                seeds = sampling.view_seeds(
                    seed, rng.STREAM_TRAIN_VIEW, epoch, view_tag, batch
                )
                nodes, adj, _ = sampling.sample_batch(
                    graph.adjacency,
                    batch,
                    config.subgraph_size,
                    config.restart_prob,
                    seeds,
                    budget=budget,
                )
                loss, grads, _ = view_loss_grad(
                    x, vp.theta, vp.w, adj, nodes, batch, partner, m_pos, kind
                )
                losses[kind] = loss
                view_grads[kind] = grads

            loss_total = (
                config.alpha * losses["context"]
                + (1.0 - config.alpha) * losses["patch"]
            )
            if not np.isfinite(loss_total):
                raise NumericError(
                    f"non-finite loss at epoch {epoch}, batch {b_idx}"
                )
            grads = {
                "patch.theta": (1.0 - config.alpha) * view_grads["patch"]["theta"],
                "patch.w": (1.0 - config.alpha) * view_grads["patch"]["w"],
                "context.theta": config.alpha * view_grads["context"]["theta"],
                "context.w": config.alpha * view_grads["context"]["w"],
            }
            adam_step(params, grads, opt)
            row = (epoch, b_idx, losses["patch"], losses["context"], loss_total)
            trace.append(row)
            if on_batch is not None:
                on_batch(row)
    return params, trace
