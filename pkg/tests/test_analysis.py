"""Analysis tests: components, BFS, pair sampling, degrees, Hill estimator,
clustering."""

import math

import numpy as np
import pytest

from hrglab.analysis import (
    SAME_COMPONENT_PAIRS,
    UNIFORM_PAIRS,
    UNREACHABLE,
    bfs_distances,
    clustering_coefficient,
    connected_components,
    degree_histogram,
    sample_pair_distances,
    tail_exponent_estimate,
)
from hrglab.build import Graph
from hrglab.geometry import ModelParams
from hrglab.points import sample_binomial


def _graph_from_edges(n, edges):
    """Adjacency-only graph; analysis ops never touch coordinates."""
    if edges:
        uv = np.array(edges, dtype=np.int64)
        both = np.concatenate([uv, uv[:, ::-1]])
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(both[:, 0], minlength=n), out=offsets[1:])
        return Graph(None, offsets, np.ascontiguousarray(both[:, 1]), "naive")
    return Graph(None, np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64), "naive")


class TestComponents:
    def test_edgeless_graph_singletons(self):
        lab = connected_components(_graph_from_edges(5, []))
        assert np.array_equal(lab.labels, np.arange(5))
        assert np.array_equal(lab.sizes, np.ones(5, dtype=np.int64))
        assert lab.giant_fraction == pytest.approx(0.2)

    def test_complete_graph(self):
        edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        lab = connected_components(_graph_from_edges(4, edges))
        assert np.array_equal(lab.labels, np.zeros(4, dtype=np.int64))
        assert lab.sizes[0] == 4 and lab.giant_fraction == 1.0

    def test_labels_are_smallest_member(self):
        lab = connected_components(_graph_from_edges(6, [(2, 5), (1, 3)]))
        assert lab.labels[5] == 2 and lab.labels[3] == 1 and lab.labels[4] == 4

    def test_giant_fraction_in_unit_interval(self, graph75):
        lab = connected_components(graph75)
        assert 0.0 < lab.giant_fraction <= 1.0
        assert lab.sizes.sum() == graph75.n


class TestBfs:
    def test_distance_to_self_zero(self, graph75):
        assert bfs_distances(graph75, 3)[3] == 0

    def test_neighbor_distance_one(self, graph75):
        u, v = graph75.edge_array()[0]
        assert bfs_distances(graph75, int(u))[v] == 1

    def test_path_graph(self):
        g = _graph_from_edges(4, [(0, 1), (1, 2), (2, 3)])
        assert np.array_equal(bfs_distances(g, 0), [0, 1, 2, 3])

    def test_unreachable_sentinel(self):
        g = _graph_from_edges(3, [(0, 1)])
        assert bfs_distances(g, 0)[2] == UNREACHABLE

    def test_adjacent_levels_differ_by_at_most_one(self, graph75):
        d = bfs_distances(graph75, 0)
        uv = graph75.edge_array()
        du, dv = d[uv[:, 0]], d[uv[:, 1]]
        both = (du != UNREACHABLE) & (dv != UNREACHABLE)
        assert np.all(np.abs(du[both] - dv[both]) <= 1)
        assert np.array_equal(du == UNREACHABLE, dv == UNREACHABLE)

    def test_truncated_matches_full(self, graph75):
        full = bfs_distances(graph75, 7)
        for target in (11, 140, 600):
            got = bfs_distances(graph75, 7, target=target)[target]
            assert got == full[target]


class TestPairSampling:
    def test_complete_graph_all_distance_one(self):
        edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
        g = _graph_from_edges(5, edges)
        lab = connected_components(g)
        sample = sample_pair_distances(g, lab, 50, SAME_COMPONENT_PAIRS, seed=0)
        assert np.all(sample.finite == 1)

    def test_two_disjoint_edges_unreachable_frequency(self):
        # ordered pairs: 12 total, 8 cross-component
        g = _graph_from_edges(4, [(0, 1), (2, 3)])
        lab = connected_components(g)
        total = 0
        unreachable = 0
        for seed in range(40):
            sample = sample_pair_distances(g, lab, 50, UNIFORM_PAIRS, seed=seed)
            total += len(sample.pairs)
            unreachable += sample.num_unreachable
        freq = unreachable / total
        sigma = math.sqrt((8 / 12) * (4 / 12) / total)
        assert abs(freq - 8 / 12) < 4 * sigma

    def test_unreachable_rows_carry_witness(self):
        g = _graph_from_edges(4, [(0, 1), (2, 3)])
        lab = connected_components(g)
        sample = sample_pair_distances(g, lab, 60, UNIFORM_PAIRS, seed=1)
        rows = sample.pairs[sample.pairs[:, 2] == UNREACHABLE]
        assert len(rows) > 0
        assert np.all(rows[:, 3] != rows[:, 4])

    def test_deterministic_under_fixed_seed(self, graph75):
        lab = connected_components(graph75)
        a = sample_pair_distances(graph75, lab, 100, SAME_COMPONENT_PAIRS, seed=5)
        b = sample_pair_distances(graph75, lab, 100, SAME_COMPONENT_PAIRS, seed=5)
        assert np.array_equal(a.pairs, b.pairs)
        assert a.mean == b.mean

    def test_recorded_distances_reproducible_by_full_bfs(self, graph75):
        lab = connected_components(graph75)
        sample = sample_pair_distances(graph75, lab, 40, SAME_COMPONENT_PAIRS, seed=2)
        for u, v, d, _, _ in sample.pairs:
            assert bfs_distances(graph75, int(u))[v] == d

    def test_edgeless_same_component_rejected(self):
        g = _graph_from_edges(4, [])
        lab = connected_components(g)
        with pytest.raises(ValueError, match="component"):
            sample_pair_distances(g, lab, 10, SAME_COMPONENT_PAIRS, seed=0)

    def test_ratio_uses_log_r(self, graph75):
        lab = connected_components(graph75)
        sample = sample_pair_distances(graph75, lab, 50, SAME_COMPONENT_PAIRS, seed=3)
        assert sample.ratio_to_log_r == pytest.approx(
            sample.mean / math.log(graph75.point_set.params.big_r)
        )


class TestDegrees:
    def test_edgeless(self):
        hist = degree_histogram(_graph_from_edges(5, []))
        assert hist[0] == 5 and hist.sum() == 5

    def test_complete_k5(self):
        edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
        hist = degree_histogram(_graph_from_edges(5, edges))
        assert hist[4] == 5

    def test_handshake(self, graph75):
        hist = degree_histogram(graph75)
        degrees = np.arange(len(hist))
        assert int((hist * degrees).sum()) == 2 * graph75.m
        assert int(hist.sum()) == graph75.n


class TestHillEstimator:
    @staticmethod
    def _pareto_degree_hist(n, beta, seed, scale=50.0):
        # survival P(X > x) = (x/scale)^(1-beta) for x >= scale, so the
        # density exponent is beta; rounding at this scale is negligible
        rng = np.random.default_rng(seed)
        x = scale * (1 - rng.random(n)) ** (-1 / (beta - 1))
        degs = np.round(x).astype(np.int64)
        return np.bincount(degs)

    def test_recovers_synthetic_exponent(self):
        n = 100_000
        k = int(math.ceil(math.sqrt(n)))
        estimates = [
            tail_exponent_estimate(self._pareto_degree_hist(n, 2.5, seed), k_tail=k, num_bootstrap=0).beta_hat
            for seed in range(20)
        ]
        assert 2.4 <= float(np.mean(estimates)) <= 2.6

    def test_bootstrap_stderr_reasonable(self):
        hist = self._pareto_degree_hist(20_000, 2.5, seed=3)
        est = tail_exponent_estimate(hist, num_bootstrap=100, seed=0)
        # asymptotic Hill sd is (beta-1)/sqrt(k)
        expected = (est.beta_hat - 1) / math.sqrt(est.k_tail)
        assert 0.3 * expected < est.stderr < 3 * expected

    def test_default_k_tail_is_sqrt(self):
        hist = self._pareto_degree_hist(10_000, 2.5, seed=1)
        est = tail_exponent_estimate(hist, num_bootstrap=0)
        assert est.k_tail == math.ceil(math.sqrt(hist[1:].sum()))

    def test_equal_degrees_degenerate(self):
        hist = np.zeros(8, dtype=np.int64)
        hist[7] = 100
        with pytest.raises(ValueError, match="degenerate"):
            tail_exponent_estimate(hist, k_tail=10, num_bootstrap=0)

    def test_insufficient_tail(self):
        hist = np.array([0, 3])
        with pytest.raises(ValueError, match="insufficient"):
            tail_exponent_estimate(hist, k_tail=5)


class TestClustering:
    def test_triangle_graph(self):
        g = _graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])
        assert clustering_coefficient(g) == pytest.approx(1.0)

    def test_star_graph(self):
        g = _graph_from_edges(4, [(0, 1), (0, 2), (0, 3)])
        assert clustering_coefficient(g) == pytest.approx(0.0)

    def test_k4_minus_edge(self):
        # paths of length 2: 8; closed: 6 (two triangles, 3 each)
        edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]
        g = _graph_from_edges(4, edges)
        assert clustering_coefficient(g) == pytest.approx(0.75)

    def test_no_paths_rejected(self):
        g = _graph_from_edges(4, [(0, 1)])
        with pytest.raises(ValueError, match="paths"):
            clustering_coefficient(g)

    def test_sampled_local_on_model_graph(self, graph75):
        c = clustering_coefficient(graph75, mode="sampled", samples=400, seed=0)
        assert 0.0 < c <= 1.0
        # geometric graphs are locally dense
        assert c > 0.3

    def test_sampled_deterministic(self, graph75):
        a = clustering_coefficient(graph75, mode="sampled", samples=200, seed=4)
        b = clustering_coefficient(graph75, mode="sampled", samples=200, seed=4)
        assert a == b


def test_giant_component_regimes():
    """Giant for 1/2 < alpha < 1; sublinear largest component for alpha > 1."""
    fractions = {}
    for alpha in (0.75, 1.5):
        for n in (2000, 8000):
            params = ModelParams.from_n(n, alpha, 1.0)
            vals = []
            for seed in range(3):
                from hrglab.build import build_bucketed

                g = build_bucketed(sample_binomial(params, n, seed=seed))
                vals.append(connected_components(g).giant_fraction)
            fractions[(alpha, n)] = float(np.mean(vals))
    assert fractions[(0.75, 2000)] > 0.3 and fractions[(0.75, 8000)] > 0.3
    assert fractions[(1.5, 8000)] < fractions[(1.5, 2000)]
    assert fractions[(1.5, 8000)] < 0.2
