"""Anonymized subgraph sampling around target nodes.

Each sample is a fixed-size subgraph grown by a random walk with restart
from a target node. The first slot always holds the target; walks that
find fewer than k distinct nodes pad the remaining slots with the target
id, and pads act as isolated nodes (self-loop only) in the adjacency.
The target's feature row is anonymized (zeroed) so a model can only
reconstruct the target from its sampled surroundings.

Seeds are derived per (stream, round, view, node), which makes every
sample independent of batch composition and iteration order: sampling
node v in round r yields the same subgraph whether the batch holds one
node or the whole graph.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, rng
from .errors import RangeError


@dataclass(frozen=True)
class Subgraph:
    """One sampled, anonymized subgraph.

    Attributes
    ----------
    target : int
        The node the walk started from.
    nodes : ndarray of int64, shape (k,)
        Member ids in first-visit order; ``nodes[0]`` is the target and
        slots past ``n_real`` repeat the target id as pads.
    n_real : int
        Number of genuinely collected distinct nodes (at least 1).
    adjacency : ndarray of float64, shape (k, k)
        Symmetrically normalized induced adjacency with self-loops; pad
        slots are isolated.
    features : ndarray of float64, shape (k, D)
        Member feature rows with row 0 zeroed (anonymization). Pad slots
        carry the target's raw features.
    """

    target: int
    nodes: np.ndarray
    n_real: int
    adjacency: np.ndarray
    features: np.ndarray


def default_budget(k):
    """Step budget for one walk: 100 steps per requested slot."""
    return 100 * int(k)


def view_seeds(master, stream, round_index, view, targets):
    """Per-target walk seeds for one (stream, round, view) combination.

    The part order (stream, round, view, node) is the package-wide
    convention; training and scoring both derive walk seeds through this
    helper so their streams never collide.
    """
    return rng.derive_seed_array(master, stream, round_index, view, targets)


def sample_batch(adjacency, targets, k, restart_prob, seeds, budget=None, impl=None):
    """Sample one subgraph per target.

    Parameters
    ----------
    adjacency : CsrAdjacency
        Full-graph adjacency to walk on.
    targets : int64 array, shape (B,)
    k : int
        Subgraph size (slots per sample).
    restart_prob : float in [0, 1]
        Per-step probability of teleporting back to the target.
    seeds : uint64 array, shape (B,)
        One walk seed per target (see :func:`view_seeds`).
    budget : int, optional
        Walk step budget; defaults to ``default_budget(k)``.

    Returns
    -------
    nodes : int64 (B, k), adj : float64 (B, k, k), n_real : int64 (B,)
        Member ids, normalized adjacencies, and real-node counts. Feature
        blocks are intentionally not materialized here; the model gathers
        projected rows instead, which is equivalent and far smaller.
    """
    if budget is None:
        budget = default_budget(k)
    nodes, n_real = kernels.rwr_batch(
        adjacency.indptr,
        adjacency.indices,
        targets,
        k,
        restart_prob,
        budget,
        seeds,
        impl=impl,
    )
    adj = kernels.induced_norm_adj(
        adjacency.indptr, adjacency.indices, nodes, n_real, impl=impl
    )
    return nodes, adj, n_real


def anonymized_features(features, nodes):
    """Gather anonymized feature blocks for sampled subgraphs.

    Returns a float64 array of shape (B, k, D): row ``nodes[b, i]`` of the
    feature matrix per slot, with slot 0 zeroed. Used by the reference
    path and tests; the training/scoring code works in projected space.
    """
    block = features[nodes].copy()
    block[:, 0, :] = 0.0
    return block


def rwr_sample(graph, target, k, restart_prob, seed, budget=None):
    """Sample a single anonymized subgraph around ``target``.

    Reference single-sample path; bit-identical to the corresponding row
    of :func:`sample_batch` with the same seed.
    """
    target = int(target)
    if not 0 <= target < graph.num_nodes:
        raise RangeError(
            f"target {target} out of range [0, {graph.num_nodes})"
        )
    targets = np.asarray([target], dtype=np.int64)
    seeds = np.asarray([int(seed) & rng.MASK64], dtype=np.uint64)
    nodes, adj, n_real = sample_batch(
        graph.adjacency, targets, k, restart_prob, seeds, budget=budget
    )
    feats = anonymized_features(graph.features, nodes)
    return Subgraph(
        target=target,
        nodes=nodes[0],
        n_real=int(n_real[0]),
        adjacency=adj[0],
        features=feats[0],
    )
