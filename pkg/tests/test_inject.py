import json

import numpy as np
import pytest

from anemone.errors import CapacityError
from anemone.inject import inject_anomalies

from conftest import random_graph


def validate_injection(original, result, num_cliques, clique_size, num_contextual):
    """Independent structural check of an injection outcome."""
    g = result.graph
    n = original.num_nodes
    # Disjoint, correctly sized anomaly sets.
    assert result.structural_ids.size == num_cliques * clique_size
    assert result.contextual_ids.size == num_contextual
    all_ids = np.concatenate([result.structural_ids, result.contextual_ids])
    assert np.unique(all_ids).size == all_ids.size
    assert np.array_equal(result.anomaly_ids, np.sort(all_ids))
    # Labels flag exactly the anomaly ids.
    assert np.array_equal(np.flatnonzero(g.labels == 1), result.anomaly_ids)
    # Adjacency stays simple and symmetric, and only gains edges.
    dense_old = original.adjacency.to_dense()
    dense_new = g.adjacency.to_dense()
    assert np.array_equal(dense_new, dense_new.T)
    assert dense_new.diagonal().sum() == 0.0
    assert np.all(dense_new >= dense_old)
    # Non-anomalous rows keep their features; contextual rows must equal
    # some clean node's original row.
    clean = np.flatnonzero(g.labels == 0)
    assert np.array_equal(g.features[clean], original.features[clean])
    for t in result.contextual_ids:
        matches = (original.features[clean] == g.features[t]).all(axis=1)
        assert matches.any(), f"contextual node {t} has no donor row"
    # Structural rows keep features but gain full cliques.
    assert np.array_equal(
        g.features[result.structural_ids], original.features[result.structural_ids]
    )
    return True


def test_injection_validity_small():
    g = random_graph(10, num_nodes=60, feature_dim=5, edge_prob=0.08)
    res = inject_anomalies(
        g, seed=4, num_cliques=2, clique_size=5, num_contextual=8, num_candidates=10
    )
    validate_injection(g, res, 2, 5, 8)
    # Each clique is fully linked: every anomaly group of 5 consecutive
    # structural picks forms a complete subgraph.
    dense = res.graph.adjacency.to_dense()
    # Reconstruct groups from the manifest order is not possible (ids are
    # sorted), so check the defining property instead: the structural set
    # can be partitioned into cliques, i.e. each structural node has at
    # least clique_size - 1 structural neighbors forming a clique with it.
    for v in res.structural_ids:
        members = [
            u
            for u in res.structural_ids
            if u != v and dense[v, u] == 1.0
        ]
        assert len(members) >= 4


def test_clique_members_fully_linked_via_rerun():
    # Same seed reproduces the same grouping; verify pairwise edges by
    # re-deriving the permutation the injector used.
    from anemone import rng

    g = random_graph(11, num_nodes=50, feature_dim=4, edge_prob=0.05)
    res = inject_anomalies(g, seed=21, num_cliques=3, clique_size=4, num_contextual=0)
    gen = rng.generator(rng.derive_seed(21, rng.STREAM_INJECT))
    perm = gen.permutation(50)
    dense = res.graph.adjacency.to_dense()
    for c in range(3):
        members = perm[c * 4 : (c + 1) * 4]
        for i in range(4):
            for j in range(i + 1, 4):
                assert dense[members[i], members[j]] == 1.0


def test_contextual_picks_farthest_candidate():
    from anemone import rng

    g = random_graph(12, num_nodes=40, feature_dim=6, edge_prob=0.05)
    res = inject_anomalies(
        g, seed=8, num_cliques=0, clique_size=2, num_contextual=3, num_candidates=7
    )
    # Replay the generator: permutation first, then one choice per target.
    gen = rng.generator(rng.derive_seed(8, rng.STREAM_INJECT))
    perm = gen.permutation(40)
    targets = perm[:3]
    assert np.array_equal(np.sort(targets), res.contextual_ids)
    anomaly = np.zeros(40, dtype=bool)
    anomaly[targets] = True
    clean = np.flatnonzero(~anomaly)
    for t in targets:
        cand = gen.choice(clean, size=7, replace=False)
        dists = np.linalg.norm(g.features[cand] - g.features[t], axis=1)
        donor = cand[int(np.argmax(dists))]
        assert np.array_equal(res.graph.features[t], g.features[donor])


def test_determinism_and_seed_sensitivity():
    g = random_graph(13, num_nodes=50, feature_dim=4)
    a = inject_anomalies(g, 5, 2, 4, 6, num_candidates=10)
    b = inject_anomalies(g, 5, 2, 4, 6, num_candidates=10)
    c = inject_anomalies(g, 6, 2, 4, 6, num_candidates=10)
    assert np.array_equal(a.anomaly_ids, b.anomaly_ids)
    assert np.array_equal(a.graph.features, b.graph.features)
    assert not np.array_equal(a.anomaly_ids, c.anomaly_ids)


def test_manifest_contents_json_ready():
    g = random_graph(14, num_nodes=30, feature_dim=3)
    res = inject_anomalies(g, 9, 1, 3, 2, num_candidates=5)
    payload = json.dumps(res.manifest)
    back = json.loads(payload)
    assert back["seed"] == 9
    assert back["num_cliques"] == 1
    assert back["clique_size"] == 3
    assert back["num_contextual"] == 2
    assert back["num_candidates"] == 5
    assert back["anomaly_ids"] == [int(v) for v in res.anomaly_ids]


def test_capacity_and_argument_errors():
    g = random_graph(15, num_nodes=20, feature_dim=3)
    with pytest.raises(CapacityError):
        inject_anomalies(g, 1, 3, 5, 10)  # 15 + 10 > 20
    with pytest.raises(CapacityError):
        # Candidate pool after removing anomalies is 20 - 4 = 16 < 18.
        inject_anomalies(g, 1, 0, 2, 4, num_candidates=18)
    with pytest.raises(ValueError):
        inject_anomalies(g, 1, 1, 1, 0)  # clique of one
    with pytest.raises(ValueError):
        inject_anomalies(g, 1, -1, 3, 0)
    with pytest.raises(ValueError):
        inject_anomalies(g, 1, 0, 2, 1, num_candidates=0)
    labeled = inject_anomalies(g, 1, 1, 2, 1, num_candidates=5).graph
    with pytest.raises(ValueError):
        inject_anomalies(labeled, 1, 1, 2, 1, num_candidates=5)


def test_zero_anomalies_is_identity_with_labels():
    g = random_graph(16, num_nodes=15, feature_dim=3)
    res = inject_anomalies(g, 2, 0, 2, 0)
    assert res.anomaly_ids.size == 0
    assert res.graph.labels.sum() == 0
    assert np.array_equal(res.graph.features, g.features)
    assert res.graph.num_edges == g.num_edges
