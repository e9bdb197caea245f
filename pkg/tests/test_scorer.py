import numpy as np
import pytest

from anemone import nn, scorer
from anemone.errors import RangeError

from conftest import random_graph


def make_setup(seed, num_nodes=30, feature_dim=6, dim=5):
    g = random_graph(seed, num_nodes=num_nodes, feature_dim=feature_dim,
                     edge_prob=0.15)
    params = nn.init_params(feature_dim, dim, seed + 1)
    return g, params


class TestComposability:
    def test_single_node_subsets_match_full_run(self):
        g, params = make_setup(50)
        full = scorer.score_all(g, params, rounds=3, alpha=0.7, seed=4)
        for i in (0, 7, 19, 29):
            one = scorer.score_all(
                g, params, rounds=3, alpha=0.7, seed=4, subset=[i]
            )
            assert np.array_equal(one.y, full.y[i : i + 1])
            assert np.array_equal(one.y_patch, full.y_patch[i : i + 1])
            assert np.array_equal(one.y_context, full.y_context[i : i + 1])
            assert np.array_equal(
                one.base_gap_patch, full.base_gap_patch[:, i : i + 1]
            )
            assert np.array_equal(
                one.base_gap_context, full.base_gap_context[:, i : i + 1]
            )

    def test_multi_node_subset_matches_full_run(self):
        g, params = make_setup(51)
        full = scorer.score_all(g, params, rounds=2, alpha=0.5, seed=9)
        subset = np.asarray([5, 2, 9, 22])
        part = scorer.score_all(
            g, params, rounds=2, alpha=0.5, seed=9, subset=subset
        )
        assert np.array_equal(part.node_ids, subset)
        assert np.array_equal(part.y, full.y[subset])
        assert np.array_equal(part.mean_b_patch, full.mean_b_patch[subset])
        assert np.array_equal(part.std_b_context, full.std_b_context[subset])


class TestStatistics:
    def test_summary_stats_rederived_from_base_gaps(self):
        g, params = make_setup(52)
        rep = scorer.score_all(g, params, rounds=5, alpha=0.8, seed=1)
        for gaps, mean, std, y_view in (
            (rep.base_gap_patch, rep.mean_b_patch, rep.std_b_patch, rep.y_patch),
            (
                rep.base_gap_context,
                rep.mean_b_context,
                rep.std_b_context,
                rep.y_context,
            ),
        ):
            assert gaps.shape == (5, g.num_nodes)
            m = gaps.sum(axis=0) / 5.0
            s = np.sqrt(((gaps - m) ** 2).sum(axis=0) / 5.0)
            assert np.allclose(mean, m, rtol=0, atol=1e-15)
            assert np.allclose(std, s, rtol=0, atol=1e-15)
            assert np.allclose(y_view, mean + std, rtol=0, atol=0)
        want_y = 0.8 * rep.y_context + 0.2 * rep.y_patch
        assert np.allclose(rep.y, want_y, rtol=0, atol=1e-16)

    def test_positive_gap_fraction_rederived(self):
        g, params = make_setup(53)
        rep = scorer.score_all(g, params, rounds=4, alpha=0.5, seed=2)
        pos = (rep.base_gap_patch > 0).sum() + (rep.base_gap_context > 0).sum()
        want = pos / (2.0 * 4 * g.num_nodes)
        assert rep.positive_gap_fraction == want
        assert 0.0 <= rep.positive_gap_fraction <= 1.0

    def test_single_round_has_zero_std(self):
        g, params = make_setup(54)
        rep = scorer.score_all(g, params, rounds=1, alpha=0.5, seed=3)
        assert np.all(rep.std_b_patch == 0.0)
        assert np.all(rep.std_b_context == 0.0)
        assert np.array_equal(rep.y_patch, rep.mean_b_patch)

    def test_scores_in_plausible_range(self):
        g, params = make_setup(55)
        rep = scorer.score_all(g, params, rounds=6, alpha=0.6, seed=5)
        assert np.isfinite(rep.y).all()
        # Gaps are differences of sigmoids, so each lies in (-1, 1).
        assert rep.base_gap_patch.min() > -1.0
        assert rep.base_gap_patch.max() < 1.0
        assert np.all(rep.y > -2.0) and np.all(rep.y < 2.0)

    def test_alpha_edges_select_single_view(self):
        g, params = make_setup(56)
        rep_c = scorer.score_all(g, params, rounds=2, alpha=1.0, seed=6)
        assert np.array_equal(rep_c.y, rep_c.y_context)
        rep_p = scorer.score_all(g, params, rounds=2, alpha=0.0, seed=6)
        assert np.array_equal(rep_p.y, rep_p.y_patch)


class TestPartners:
    def test_never_self_and_in_range(self):
        n = 40
        subset = np.arange(n, dtype=np.int64)
        for r in range(20):
            j = scorer._partners(7, r, subset, n)
            assert np.all(j != subset)
            assert j.min() >= 0 and j.max() < n

    def test_two_node_graph_partner_is_forced(self):
        subset = np.asarray([0, 1], dtype=np.int64)
        j = scorer._partners(1, 0, subset, 2)
        assert j.tolist() == [1, 0]

    def test_varies_across_rounds(self):
        subset = np.arange(30, dtype=np.int64)
        a = scorer._partners(7, 0, subset, 30)
        b = scorer._partners(7, 1, subset, 30)
        assert not np.array_equal(a, b)


class TestValidation:
    def test_argument_errors(self):
        g, params = make_setup(57, num_nodes=10)
        with pytest.raises(ValueError):
            scorer.score_all(g, params, rounds=0, alpha=0.5, seed=1)
        with pytest.raises(ValueError):
            scorer.score_all(g, params, rounds=2, alpha=1.5, seed=1)
        with pytest.raises(ValueError):
            scorer.score_all(g, params, rounds=2, alpha=0.5, seed=1, subset=[])
        with pytest.raises(RangeError):
            scorer.score_all(
                g, params, rounds=2, alpha=0.5, seed=1, subset=[10]
            )

    def test_tiny_graph_rejected(self):
        g, params = make_setup(58, num_nodes=1)
        with pytest.raises(RangeError):
            scorer.score_all(g, params, rounds=1, alpha=0.5, seed=1)

    def test_deterministic_and_seed_sensitive(self):
        g, params = make_setup(59)
        a = scorer.score_all(g, params, rounds=3, alpha=0.5, seed=11)
        b = scorer.score_all(g, params, rounds=3, alpha=0.5, seed=11)
        c = scorer.score_all(g, params, rounds=3, alpha=0.5, seed=12)
        assert np.array_equal(a.y, b.y)
        assert not np.array_equal(a.y, c.y)
