"""Normalized-Laplacian spectra, histogram smoothing, KL divergence, and
the dimension-interval rule."""

import numpy as np
import pytest

from netdim.errors import InputError
from netdim.graph import Graph
from netdim import spectral as sp

from oracles import bfs_components


def _er_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    mask = rng.random(iu[0].size) < p
    return Graph(n, np.stack([iu[0][mask], iu[1][mask]], axis=1))


class TestEigenvalues:
    def test_single_edge(self):
        eigs = sp.normalized_laplacian_eigenvalues(Graph(2, [[0, 1]]))
        assert np.allclose(eigs, [0.0, 2.0])

    def test_triangle(self):
        eigs = sp.normalized_laplacian_eigenvalues(Graph(3, [[0, 1], [0, 2], [1, 2]]))
        assert np.allclose(eigs, [0.0, 1.5, 1.5])

    def test_complete_graph_closed_form(self):
        n = 7
        iu = np.triu_indices(n, k=1)
        eigs = sp.normalized_laplacian_eigenvalues(Graph(n, np.stack(iu, axis=1)))
        want = np.concatenate([[0.0], np.full(n - 1, n / (n - 1))])
        assert np.allclose(eigs, want)

    def test_isolated_vertices_contribute_zero(self):
        # one edge plus three isolated vertices: spectrum {0, 2} + three 0s
        eigs = sp.normalized_laplacian_eigenvalues(Graph(5, [[0, 1]]))
        assert np.allclose(eigs, [0.0, 0.0, 0.0, 0.0, 2.0])

    def test_edgeless_graph(self):
        eigs = sp.normalized_laplacian_eigenvalues(Graph(4, []))
        assert np.array_equal(eigs, np.zeros(4))

    @pytest.mark.parametrize("seed", range(8))
    def test_trace_and_zero_multiplicity(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(20, 80))
        g = _er_graph(n, 0.04, seed=seed + 100)
        eigs = sp.normalized_laplacian_eigenvalues(g)
        assert eigs.size == n
        assert eigs.min() >= 0.0 and eigs.max() <= 2.0
        non_isolated = int(np.count_nonzero(g.degrees))
        assert abs(eigs.sum() - non_isolated) <= 1e-6 * n
        n_components = len(bfs_components(n, [tuple(e) for e in g.edges]))
        assert np.count_nonzero(eigs < 1e-8) == n_components

    def test_bipartite_hits_two(self):
        # even cycle is bipartite: largest eigenvalue exactly 2
        n = 6
        edges = [[i, (i + 1) % n] for i in range(n)]
        eigs = sp.normalized_laplacian_eigenvalues(Graph(n, edges))
        assert eigs[-1] == pytest.approx(2.0, abs=1e-9)

    def test_cap_enforced(self):
        g = Graph(30, [])
        with pytest.raises(InputError):
            sp.normalized_laplacian_eigenvalues(g, cap=20)
        # explicit larger cap lets the same graph through
        assert sp.normalized_laplacian_eigenvalues(g, cap=30).size == 30

    def test_empty_graph_rejected(self):
        with pytest.raises(InputError):
            sp.normalized_laplacian_eigenvalues(Graph(0, []))


class TestHistogram:
    def test_empty_input_is_pure_smoothing(self):
        h = sp.spectral_histogram(np.array([]))
        assert h.n_eigs == 0
        assert np.allclose(h.bins, 1.0 / 201.0)
        assert h.raw_counts.sum() == 0

    def test_single_zero_eigenvalue(self):
        h = sp.spectral_histogram(np.array([0.0]))
        assert h.bins[0] == pytest.approx(2.0 / 202.0)
        assert np.allclose(h.bins[1:], 1.0 / 202.0)

    def test_triangle_spectrum_bin(self):
        h = sp.spectral_histogram(np.array([0.0, 1.5, 1.5]))
        # 1.5 / (2/201) = 150.75 -> bin 150
        assert h.raw_counts[150] == 2
        assert h.raw_counts[0] == 1
        assert h.n_eigs == 3

    def test_last_bin_closed_at_two(self):
        h = sp.spectral_histogram(np.array([2.0]))
        assert h.raw_counts[200] == 1

    def test_bins_sum_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            h = sp.spectral_histogram(rng.uniform(0, 2, size=rng.integers(1, 400)))
            assert abs(h.bins.sum() - 1.0) < 1e-12
            assert h.raw_counts.sum() == h.n_eigs

    def test_bin_boundaries_half_open(self):
        edge = 2.0 * 3 / 201.0
        h = sp.spectral_histogram(np.array([edge]))
        assert h.raw_counts[3] == 1

    def test_clamp_tolerance(self):
        h = sp.spectral_histogram(np.array([-5e-10, 2.0 + 5e-10]))
        assert h.raw_counts[0] == 1 and h.raw_counts[200] == 1
        with pytest.raises(InputError):
            sp.spectral_histogram(np.array([2.1]))
        with pytest.raises(InputError):
            sp.spectral_histogram(np.array([-0.01]))


class TestKLDivergence:
    def test_self_divergence_is_zero(self):
        h = sp.spectral_histogram(np.random.default_rng(1).uniform(0, 2, 100))
        assert sp.kl_divergence(h, h) == 0.0

    def test_two_bin_toy(self):
        p = np.array([0.5, 0.5])
        q = np.array([0.25, 0.75])
        want = 0.5 * np.log(2.0) + 0.5 * np.log(2.0 / 3.0)
        assert sp.kl_divergence(p, q) == pytest.approx(want)
        assert sp.kl_divergence(p, q) == pytest.approx(0.1438, abs=5e-5)

    def test_asymmetric(self):
        p = np.array([0.5, 0.5])
        q = np.array([0.25, 0.75])
        assert sp.kl_divergence(p, q) != pytest.approx(sp.kl_divergence(q, p))

    @pytest.mark.parametrize("seed", range(10))
    def test_nonnegative_on_random_histograms(self, seed):
        rng = np.random.default_rng(seed)
        a = sp.spectral_histogram(rng.uniform(0, 2, size=rng.integers(1, 300)))
        b = sp.spectral_histogram(rng.uniform(0, 2, size=rng.integers(1, 300)))
        d = sp.kl_divergence(a, b)
        assert d >= 0.0
        if not np.array_equal(a.bins, b.bins):
            assert d > 0.0

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            sp.kl_divergence(np.array([0.5, 0.5]), np.array([1.0]))

    def test_rejects_zero_mass_bins(self):
        with pytest.raises(InputError):
            sp.kl_divergence(np.array([1.0, 0.0]), np.array([0.5, 0.5]))


class TestDimensionInterval:
    def test_documented_example(self):
        best, interval = sp.dimension_interval({1: 5.0, 2: 1.0, 3: 1.04, 4: 2.0})
        assert best == 2
        assert interval == (2, 3)

    def test_single_entry(self):
        assert sp.dimension_interval({4: 0.7}) == (4, (4, 4))

    def test_all_equal_takes_smallest(self):
        best, interval = sp.dimension_interval({2: 1.0, 3: 1.0, 4: 1.0})
        assert best == 2
        assert interval == (2, 4)

    def test_tie_prefers_smaller_dimension(self):
        best, _ = sp.dimension_interval({1: 2.0, 2: 1.0, 3: 1.0})
        assert best == 2

    def test_interval_stops_at_excursion(self):
        # dim 3 breaks the run even though dim 4 would qualify again
        best, interval = sp.dimension_interval({1: 1.0, 2: 1.02, 3: 9.0, 4: 1.01})
        assert best == 1
        assert interval == (1, 2)

    def test_scale_invariance(self):
        # changing the KL log base rescales every divergence by the same
        # constant, which must not move the argmin or the interval
        divs = {m: v for m, v in zip(range(1, 7), [3.0, 1.2, 1.0, 1.03, 2.0, 0.99 * 1.05])}
        scaled = {m: v * np.log10(np.e) for m, v in divs.items()}
        assert sp.dimension_interval(divs) == sp.dimension_interval(scaled)

    def test_validation(self):
        with pytest.raises(InputError):
            sp.dimension_interval({})
        with pytest.raises(InputError):
            sp.dimension_interval({1: 1.0, 3: 2.0})
        with pytest.raises(InputError):
            sp.dimension_interval({1: 1.0}, tolerance=0.9)
