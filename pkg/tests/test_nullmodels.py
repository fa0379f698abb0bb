"""Null-model generators: matched ER, degree-preserving swaps, percolation."""

import numpy as np
import pytest

from netdim.errors import InputError
from netdim.graph import Graph
from netdim import nullmodels as nm


def _random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    mask = rng.random(iu[0].size) < p
    return Graph(n, np.stack([iu[0][mask], iu[1][mask]], axis=1))


def _edge_set(g):
    return {(int(a), int(b)) for a, b in g.edges}


class TestErMatched:
    def test_pair_index_decode_round_trip(self):
        for n in (2, 3, 7, 12):
            flat = np.arange(n * (n - 1) // 2)
            pairs = nm._decode_pair_indices(flat, n)
            iu = np.triu_indices(n, k=1)
            assert np.array_equal(pairs, np.stack(iu, axis=1))

    def test_mean_edge_count_matches_target(self):
        n, target = 500, 2000
        counts = [nm.er_matched(n, target, seed=s).edge_count for s in range(200)]
        assert abs(np.mean(counts) - target) / target < 0.05

    def test_zero_target_gives_empty_graph(self):
        g = nm.er_matched(100, 0, seed=1)
        assert g.edge_count == 0 and g.n == 100

    def test_full_target_gives_complete_graph(self):
        n = 20
        g = nm.er_matched(n, n * (n - 1) // 2, seed=2)
        assert g.edge_count == n * (n - 1) // 2

    def test_edges_are_distinct_and_in_range(self):
        g = nm.er_matched(60, 400, seed=3)
        assert len(_edge_set(g)) == g.edge_count
        assert np.all(g.edges[:, 0] < g.edges[:, 1])

    def test_deterministic(self):
        a = nm.er_matched(80, 300, seed=9)
        b = nm.er_matched(80, 300, seed=9)
        c = nm.er_matched(80, 300, seed=10)
        assert np.array_equal(a.edges, b.edges)
        assert not np.array_equal(a.edges, c.edges)

    def test_infeasible_target(self):
        with pytest.raises(InputError):
            nm.er_matched(10, 46, seed=0)
        with pytest.raises(InputError):
            nm.er_matched(10, -1, seed=0)
        with pytest.raises(InputError):
            nm.er_matched(0, 0, seed=0)


class TestRewire:
    @pytest.mark.parametrize("seed", range(5))
    def test_degree_sequence_preserved(self, seed):
        g = _random_graph(60, 0.1, seed=seed)
        out = nm.degree_preserving_rewire(g, swaps_per_edge=10, seed=seed)
        assert np.array_equal(out.degrees, g.degrees)
        assert out.edge_count == g.edge_count

    def test_actually_randomizes(self):
        g = _random_graph(100, 0.08, seed=1)
        out = nm.degree_preserving_rewire(g, swaps_per_edge=10, seed=2)
        shared = len(_edge_set(g) & _edge_set(out))
        assert shared < g.edge_count // 2

    def test_clique_is_fixed_point(self):
        k4 = Graph(4, [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]])
        out = nm.degree_preserving_rewire(k4, swaps_per_edge=50, seed=0)
        assert np.array_equal(out.edges, k4.edges)

    def test_star_is_fixed_point(self):
        star = Graph(6, [[0, i] for i in range(1, 6)])
        out = nm.degree_preserving_rewire(star, swaps_per_edge=50, seed=0)
        assert np.array_equal(out.edges, star.edges)

    def test_zero_swaps_identity(self):
        g = _random_graph(40, 0.15, seed=3)
        out = nm.degree_preserving_rewire(g, swaps_per_edge=0, seed=0)
        assert np.array_equal(out.edges, g.edges)

    def test_deterministic(self):
        g = _random_graph(50, 0.12, seed=4)
        a = nm.degree_preserving_rewire(g, seed=7)
        b = nm.degree_preserving_rewire(g, seed=7)
        assert np.array_equal(a.edges, b.edges)

    def test_needs_two_edges(self):
        with pytest.raises(InputError):
            nm.degree_preserving_rewire(Graph(3, [[0, 1]]), seed=0)


class TestPercolate:
    def test_zero_fraction_identity(self):
        g = _random_graph(50, 0.1, seed=0)
        out = nm.percolate(g, 0.0, seed=1)
        assert np.array_equal(out.edges, g.edges)

    @pytest.mark.parametrize("fraction", [0.01, 0.05, 0.25, 1.0])
    def test_edge_count_invariant(self, fraction):
        g = _random_graph(80, 0.08, seed=2)
        out = nm.percolate(g, fraction, seed=3)
        assert out.edge_count == g.edge_count
        assert len(_edge_set(out)) == out.edge_count

    def test_perturbation_scales_with_fraction(self):
        g = _random_graph(120, 0.06, seed=5)
        small = nm.percolate(g, 0.05, seed=6)
        large = nm.percolate(g, 0.5, seed=6)
        kept_small = len(_edge_set(g) & _edge_set(small))
        kept_large = len(_edge_set(g) & _edge_set(large))
        assert kept_small > kept_large
        assert kept_small >= int(0.9 * g.edge_count)

    def test_complete_graph_survives(self):
        n = 6
        iu = np.triu_indices(n, k=1)
        g = Graph(n, np.stack(iu, axis=1))
        out = nm.percolate(g, 1.0, seed=0)
        assert out.edge_count == g.edge_count

    def test_deterministic(self):
        g = _random_graph(60, 0.1, seed=7)
        a = nm.percolate(g, 0.3, seed=8)
        b = nm.percolate(g, 0.3, seed=8)
        c = nm.percolate(g, 0.3, seed=9)
        assert np.array_equal(a.edges, b.edges)
        assert not np.array_equal(a.edges, c.edges)

    def test_fraction_validated(self):
        g = _random_graph(20, 0.2, seed=1)
        with pytest.raises(InputError):
            nm.percolate(g, -0.1, seed=0)
        with pytest.raises(InputError):
            nm.percolate(g, 1.5, seed=0)
