"""Builder tests: naive reference, bucketed equivalence, adjacency queries,
invariant validation, persistence."""

import math

import numpy as np
import pytest

from conftest import make_point_set
from hrglab.build import (
    build_bucketed,
    build_naive,
    export_edges_csv,
    is_adjacent,
    load_graph,
    save_graph,
    validate_graph,
)
from hrglab.geometry import ModelParams, within_distance
from hrglab.points import sample_binomial


class TestNaive:
    def test_coincident_points_single_edge(self, params75):
        ps = make_point_set(params75, [(3.0, 1.0), (3.0, 1.0)])
        g = build_naive(ps)
        assert g.m == 1 and is_adjacent(g, 0, 1)

    def test_antipodal_far_points_no_edge(self, params75):
        big_r = params75.big_r
        # d = r1 + r2 through the origin > R
        ps = make_point_set(params75, [(big_r - 1.0, 0.0), (big_r - 2.0, math.pi)])
        g = build_naive(ps)
        assert g.m == 0

    def test_three_central_points_triangle(self, params75):
        big_r = params75.big_r
        ps = make_point_set(
            params75, [(big_r / 4, 0.5), (big_r / 4, 2.0), (big_r / 4, 4.0)]
        )
        g = build_naive(ps)
        assert g.m == 3
        assert all(is_adjacent(g, i, j) for i in range(3) for j in range(3) if i != j)

    def test_cap_enforced(self, params75):
        ps = sample_binomial(params75, 50, seed=0)
        with pytest.raises(ValueError, match="capped"):
            build_naive(ps, cap=10)


class TestBucketedEquivalence:
    @pytest.mark.parametrize("alpha", [0.6, 0.9, 1.5])
    @pytest.mark.parametrize("nu", [0.5, 2.0])
    def test_edge_sets_bit_identical(self, alpha, nu):
        params = ModelParams.from_n(800, alpha, nu)
        for seed in range(3):
            ps = sample_binomial(params, 800, seed=seed)
            g_ref = build_naive(ps)
            g_fast = build_bucketed(ps)
            assert np.array_equal(g_ref.offsets, g_fast.offsets)
            assert np.array_equal(g_ref.neighbors, g_fast.neighbors)

    def test_empty_point_set(self, params75):
        ps = sample_binomial(params75, 0, seed=0)
        g = build_bucketed(ps)
        assert g.n == 0 and g.m == 0

    def test_single_point(self, params75):
        ps = sample_binomial(params75, 1, seed=0)
        g = build_bucketed(ps)
        assert g.n == 1 and g.m == 0

    def test_c0_floor_enforced(self, params75):
        ps = sample_binomial(params75, 10, seed=0)
        with pytest.raises(ValueError, match="c0"):
            build_bucketed(ps, c0=0.5)

    def test_window_covers_every_true_edge(self, graph75):
        # no true edge may fall outside the pruning window computed for the
        # pair's type bands
        g = graph75
        ps = g.point_set
        big_r = ps.params.big_r
        types = ps.types
        uv = g.edge_array()
        t_u, t_v = types[uv[:, 0]], types[uv[:, 1]]
        d = np.mod(np.abs(ps.theta[uv[:, 0]] - ps.theta[uv[:, 1]]), 2 * math.pi)
        theta = np.minimum(d, 2 * math.pi - d)
        band_top_v = np.minimum(t_v.astype(np.int64), int(big_r)) + 1.0
        window = 4.0 * np.exp((t_u + band_top_v - big_r) / 2.0)
        window = np.minimum(window, math.pi)
        window = np.where(t_u + band_top_v >= big_r - 10.0, math.pi, window)
        assert np.all(theta <= window)


class TestAdjacency:
    def test_self_not_adjacent(self, graph75):
        assert not is_adjacent(graph75, 5, 5)

    def test_listed_edges_adjacent(self, graph75):
        for u, v in graph75.edge_array()[:200]:
            assert is_adjacent(graph75, int(u), int(v))
            assert is_adjacent(graph75, int(v), int(u))

    def test_matches_distance_predicate_on_random_pairs(self, graph75):
        ps = graph75.point_set
        rng = np.random.default_rng(17)
        u = rng.integers(0, graph75.n, 10_000)
        v = rng.integers(0, graph75.n, 10_000)
        truth = within_distance(ps.r[u], ps.theta[u], ps.r[v], ps.theta[v], ps.params.big_r)
        for uu, vv, t in zip(u, v, truth):
            if uu == vv:
                continue
            assert is_adjacent(graph75, int(uu), int(vv)) == bool(t)

    def test_index_out_of_range(self, graph75):
        with pytest.raises(IndexError):
            is_adjacent(graph75, 0, graph75.n)


class TestValidator:
    def test_valid_graph_passes(self, graph75):
        validate_graph(graph75)

    def test_detects_asymmetry(self, graph75):
        g = graph75
        bad = type(g)(g.point_set, g.offsets.copy(), g.neighbors.copy(), g.build_method)
        # drop one direction of the first edge
        object.__setattr__(bad, "neighbors", np.delete(bad.neighbors, 0))
        object.__setattr__(bad, "offsets", np.concatenate([[0], bad.offsets[1:] - 1]))
        with pytest.raises(ValueError):
            validate_graph(bad)

    def test_detects_false_edge(self, params75):
        big_r = params75.big_r
        ps = make_point_set(params75, [(big_r - 1.0, 0.0), (big_r - 2.0, math.pi)])
        g = build_naive(ps)
        fake = type(g)(
            ps,
            np.array([0, 1, 2], dtype=np.int64),
            np.array([1, 0], dtype=np.int64),
            "naive",
        )
        with pytest.raises(ValueError, match="distance"):
            validate_graph(fake)


class TestPersistence:
    def test_roundtrip(self, graph75, tmp_path):
        path = tmp_path / "g.hrgg"
        save_graph(graph75, path)
        back = load_graph(path, graph75.point_set)
        assert np.array_equal(back.offsets, graph75.offsets)
        assert np.array_equal(back.neighbors, graph75.neighbors)
        assert back.build_method == graph75.build_method
        validate_graph(back)

    def test_header_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.hrgg"
        path.write_bytes(b"XXXX" + b"\x00" * 40)
        with pytest.raises(ValueError, match="header"):
            load_graph(path)

    def test_point_count_mismatch_rejected(self, graph75, params75, tmp_path):
        path = tmp_path / "g.hrgg"
        save_graph(graph75, path)
        other = sample_binomial(params75, 10, seed=0)
        with pytest.raises(ValueError, match="vertices"):
            load_graph(path, other)

    def test_edge_csv(self, params75, tmp_path):
        ps = make_point_set(params75, [(3.0, 1.0), (3.0, 1.0), (params75.big_r, 4.0)])
        g = build_naive(ps)
        path = tmp_path / "edges.csv"
        export_edges_csv(g, path)
        lines = path.read_text().strip().splitlines()
        assert lines == ["u,v", "0,1"]
