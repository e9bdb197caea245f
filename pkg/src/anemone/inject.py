"""Synthetic anomaly injection for clean attributed graphs.

Two perturbation families, applied to disjoint node sets:

* structural: groups of nodes are made fully connected, turning each
  group into a clique that stands out from the surrounding topology;
* contextual: a node's feature row is replaced by the row of the most
  dissimilar node (largest Euclidean distance) among a random candidate
  set, so the node no longer matches its neighborhood.

Both kinds receive label 1; every other node is labeled 0. Injection only
adds edges and rewrites feature rows; it never deletes anything, so the
original topology stays embedded in the output graph.
"""

from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import CapacityError
from .graph import AttributedGraph, CsrAdjacency


@dataclass(frozen=True)
class InjectionResult:
    """Outcome of :func:`inject_anomalies`."""

    graph: AttributedGraph
    anomaly_ids: np.ndarray
    structural_ids: np.ndarray
    contextual_ids: np.ndarray
    manifest: dict


def inject_anomalies(
    graph,
    seed,
    num_cliques,
    clique_size,
    num_contextual,
    num_candidates=50,
):
    """Inject structural and contextual anomalies into a clean graph.

    Parameters
    ----------
    graph : AttributedGraph
        Unlabeled input graph.
    seed : int
        Master seed; the injection stream is derived from it, so the same
        seed reproduces the same anomalies byte for byte.
    num_cliques, clique_size : int
        Number of structural groups and nodes per group. Each group is
        fully linked (no self-loops).
    num_contextual : int
        Number of nodes whose features get swapped.
    num_candidates : int
        Candidate pool size per contextual target; the farthest candidate
        (Euclidean distance in feature space) donates its feature row.
    """
    if graph.labels is not None:
        raise ValueError("graph already carries labels; refusing to re-inject")
    if num_cliques < 0 or num_contextual < 0:
        raise ValueError("anomaly counts must be non-negative")
    if num_cliques > 0 and clique_size < 2:
        raise ValueError("clique_size must be at least 2")
    if num_contextual > 0 and num_candidates < 1:
        raise ValueError("num_candidates must be at least 1")

    n = graph.num_nodes
    num_structural = num_cliques * clique_size
    total = num_structural + num_contextual
    if total > n:
        raise CapacityError(
            f"requested {total} anomalies but the graph has only {n} nodes"
        )

    gen = rng.generator(rng.derive_seed(seed, rng.STREAM_INJECT))
    # One permutation yields disjoint structural and contextual targets.
    perm = gen.permutation(n)
    structural = perm[:num_structural].astype(np.int64)
    contextual = perm[num_structural:total].astype(np.int64)
    anomaly_set = np.zeros(n, dtype=bool)
    anomaly_set[structural] = True
    anomaly_set[contextual] = True

    # Structural: fully link each consecutive group of clique_size nodes.
    new_edges = []
    for c in range(num_cliques):
        members = structural[c * clique_size : (c + 1) * clique_size]
        for i in range(clique_size):
            for j in range(i + 1, clique_size):
                new_edges.append((members[i], members[j]))
    old_pairs = _edge_pairs(graph.adjacency)
    all_edges = (
        np.concatenate([old_pairs, np.asarray(new_edges, dtype=np.int64)], axis=0)
        if new_edges
        else old_pairs
    )
    adjacency = CsrAdjacency.from_edges(n, all_edges)

    # Contextual: swap each target's features for the farthest candidate's.
    # Candidates come from clean nodes only (no anomaly of either kind and
    # never the target), so donated rows are always unperturbed originals.
    features = graph.features.copy()
    clean = np.flatnonzero(~anomaly_set)
    for t in contextual:
        pool = clean
        if pool.size < num_candidates:
            raise CapacityError(
                f"candidate pool has {pool.size} clean nodes, "
                f"need {num_candidates}"
            )
        cand = gen.choice(pool, size=num_candidates, replace=False)
        diffs = graph.features[cand] - graph.features[t]
        far = cand[int(np.argmax(np.einsum("ij,ij->i", diffs, diffs)))]
        features[t] = graph.features[far]

    labels = anomaly_set.astype(np.int64)
    out = AttributedGraph(features=features, adjacency=adjacency, labels=labels)
    anomaly_ids = np.sort(np.concatenate([structural, contextual]))
    manifest = {
        "seed": int(seed),
        "num_cliques": int(num_cliques),
        "clique_size": int(clique_size),
        "num_contextual": int(num_contextual),
        "num_candidates": int(num_candidates),
        "anomaly_ids": [int(v) for v in anomaly_ids],
    }
    return InjectionResult(
        graph=out,
        anomaly_ids=anomaly_ids,
        structural_ids=np.sort(structural),
        contextual_ids=np.sort(contextual),
        manifest=manifest,
    )


def _edge_pairs(adjacency):
    """Each undirected edge once, as (u, v) rows with u < v."""
    n = adjacency.num_nodes
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(adjacency.indptr))
    cols = adjacency.indices
    keep = rows < cols
    return np.stack([rows[keep], cols[keep]], axis=1)
