import numpy as np
import pytest

from anemone.graph import AttributedGraph, CsrAdjacency


def random_graph(seed, num_nodes=40, feature_dim=6, edge_prob=0.1, labels=None):
    """Erdos-Renyi attributed graph for tests; deterministic per seed."""
    gen = np.random.Generator(np.random.PCG64(seed))
    edges = [
        (i, j)
        for i in range(num_nodes)
        for j in range(i + 1, num_nodes)
        if gen.random() < edge_prob
    ]
    feats = gen.normal(0.0, 1.0, size=(num_nodes, feature_dim))
    return AttributedGraph(
        features=feats,
        adjacency=CsrAdjacency.from_edges(num_nodes, edges),
        labels=labels,
    )


def path_graph(num_nodes, feature_dim=3):
    """0-1-2-...-(n-1) chain with index-valued features."""
    edges = [(i, i + 1) for i in range(num_nodes - 1)]
    feats = np.arange(num_nodes * feature_dim, dtype=np.float64).reshape(
        num_nodes, feature_dim
    )
    return AttributedGraph(
        features=feats, adjacency=CsrAdjacency.from_edges(num_nodes, edges)
    )


@pytest.fixture
def tiny_graph():
    """Triangle plus a pendant and an isolated node."""
    edges = [(0, 1), (1, 2), (0, 2), (2, 3)]
    feats = np.asarray(
        [
            [1.0, 0.0],
            [0.0, 1.0],
            [1.0, 1.0],
            [2.0, -1.0],
            [-3.0, 0.5],
        ]
    )
    return AttributedGraph(
        features=feats, adjacency=CsrAdjacency.from_edges(5, edges)
    )
