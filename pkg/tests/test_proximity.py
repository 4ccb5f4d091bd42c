"""Allocation operator, proximity iterates, stationary limit, similarity."""

import numpy as np
import pytest

from hypermine.hypercore import Hypergraph
from hypermine.proximity import (
    ablation_source,
    export_coordinates,
    incidence_proximity,
    proximity_matrix,
    similarity_matrix,
    stationary_proximity,
    transition_matrix,
)

from conftest import random_hypergraph


def dense_transition(graph):
    """Brute-force dense construction of the allocation operator."""
    m = graph.incidence.toarray()
    k_inv = np.diag(1.0 / graph.orders)
    d_inv = np.diag(1.0 / graph.degrees)
    return (m @ k_inv) @ (m.T @ d_inv)


class TestTransition:
    def test_single_edge_symmetric(self, single_edge_graph):
        t = transition_matrix(single_edge_graph).toarray()
        assert np.allclose(t, 0.5)

    def test_toy_values(self, toy_graph):
        t = transition_matrix(toy_graph).toarray()
        assert t[0, 1] == pytest.approx(0.25, abs=1e-15)
        assert t[1, 0] == pytest.approx(0.5, abs=1e-15)
        assert t[2, 0] == 0.0
        assert np.allclose(t.sum(axis=0), 1.0, atol=1e-12)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            g = random_hypergraph(rng, max_nodes=25, max_edges=30)
            assert np.allclose(
                transition_matrix(g).toarray(), dense_transition(g), atol=1e-12
            )

    def test_degree_vector_fixed_point(self, toy_graph):
        t = transition_matrix(toy_graph).toarray()
        d = toy_graph.degrees.astype(float)
        assert np.allclose(t @ d, d, atol=1e-12)

    def test_column_stochastic_everywhere(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            g = random_hypergraph(rng)
            cols = np.asarray(transition_matrix(g).sum(axis=0)).ravel()
            assert np.max(np.abs(cols - 1.0)) < 1e-12


class TestProximity:
    def test_single_edge_is_incidence(self, single_edge_graph):
        p = proximity_matrix(single_edge_graph).values.toarray()
        assert np.allclose(p, 1.0)

    def test_toy_values(self, toy_graph):
        p = proximity_matrix(toy_graph).values.toarray()
        expected = np.array([[0.75, 0.25], [1.0, 1.0], [0.25, 0.75]])
        assert np.allclose(p, expected, atol=1e-15)

    def test_t_zero_rejected(self, toy_graph):
        with pytest.raises(ValueError):
            proximity_matrix(toy_graph, t=0)

    def test_iterates_match_dense_power(self):
        rng = np.random.default_rng(13)
        g = random_hypergraph(rng, max_nodes=20, max_edges=25)
        t_dense = dense_transition(g)
        m = g.incidence.toarray()
        for t in (1, 2, 3):
            expected = np.linalg.matrix_power(t_dense, t) @ m
            got = proximity_matrix(g, t=t).values.toarray()
            assert np.allclose(got, expected, atol=1e-12)

    def test_conservation(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            g = random_hypergraph(rng)
            for t in (1, 2, 3):
                cols = proximity_matrix(g, t=t).column_sums()
                assert np.max(np.abs(cols - g.orders)) < 1e-9

    def test_convergence_to_stationary(self, toy_graph):
        limit = stationary_proximity(toy_graph)
        assert limit[1, 0] == pytest.approx(1.0)
        p100 = proximity_matrix(toy_graph, t=100).values.toarray()
        assert np.max(np.abs(p100 - limit)) < 1e-8

    def test_convergence_monotone(self):
        rng = np.random.default_rng(77)
        g = random_hypergraph(rng, max_nodes=20, max_edges=30)
        limit = stationary_proximity(g)
        gaps = [
            np.max(np.abs(proximity_matrix(g, t=t).values.toarray() - limit))
            for t in (1, 5, 25, 125)
        ]
        assert all(gaps[i + 1] <= gaps[i] + 1e-12 for i in range(len(gaps) - 1))
        assert gaps[-1] < 1e-8

    def test_stationary_column_sums(self):
        rng = np.random.default_rng(30)
        g = random_hypergraph(rng, max_nodes=20, max_edges=25)
        cols = stationary_proximity(g).sum(axis=0)
        assert np.allclose(cols, g.orders, atol=1e-10)


class TestSimilarity:
    def test_toy_values(self, toy_graph):
        s = similarity_matrix(proximity_matrix(toy_graph), toy_graph).values.toarray()
        assert s[0, 1] == pytest.approx(1 / np.sqrt(2), abs=1e-12)
        assert s[0, 2] == pytest.approx(0.375, abs=1e-12)
        assert np.all(np.diag(s) == 0)

    def test_single_edge(self, single_edge_graph):
        s = similarity_matrix(
            proximity_matrix(single_edge_graph), single_edge_graph
        ).values.toarray()
        assert s[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_disconnected_zero(self):
        g = Hypergraph.from_hyperedges([(0, 1), (2, 3)])
        s = similarity_matrix(proximity_matrix(g), g).values.toarray()
        assert s[0, 2] == 0 and s[0, 3] == 0 and s[1, 2] == 0

    def test_bitwise_symmetry(self):
        rng = np.random.default_rng(55)
        for _ in range(5):
            g = random_hypergraph(rng, max_nodes=30, max_edges=40)
            s = similarity_matrix(proximity_matrix(g), g).values.toarray()
            assert np.array_equal(s, s.T)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(56)
        for _ in range(5):
            g = random_hypergraph(rng, max_nodes=30, max_edges=40)
            p = proximity_matrix(g).values.toarray()
            d = g.degrees.astype(float)
            dense = (p @ p.T) / np.sqrt(np.outer(d, d))
            np.fill_diagonal(dense, 0.0)
            got = similarity_matrix(proximity_matrix(g), g).values.toarray()
            assert np.allclose(got, dense, atol=1e-12)

    def test_floor_prunes(self, toy_graph):
        s = similarity_matrix(proximity_matrix(toy_graph), toy_graph, floor=0.5)
        dense = s.values.toarray()
        assert dense[0, 2] == 0.0 and dense[0, 1] > 0

    def test_dimension_mismatch(self, toy_graph, single_edge_graph):
        with pytest.raises(ValueError):
            similarity_matrix(proximity_matrix(single_edge_graph), toy_graph)


class TestAblationSource:
    def test_incidence_mode_binary(self, toy_graph):
        p = ablation_source(toy_graph, "M").values.toarray()
        assert set(np.unique(p)) <= {0.0, 1.0}
        assert ablation_source(toy_graph, "M").t == 0

    def test_proximity_mode(self, toy_graph):
        p = ablation_source(toy_graph, "P").values.toarray()
        assert p[0, 0] == pytest.approx(0.75)

    def test_incidence_similarity_reduces_to_comembership(self, toy_graph):
        s = similarity_matrix(incidence_proximity(toy_graph), toy_graph).values.toarray()
        # co-membership counts over sqrt(d_i d_j)
        m = toy_graph.incidence.toarray()
        d = toy_graph.degrees.astype(float)
        dense = (m @ m.T) / np.sqrt(np.outer(d, d))
        np.fill_diagonal(dense, 0.0)
        assert np.allclose(s, dense, atol=1e-15)

    def test_unknown_source(self, toy_graph):
        with pytest.raises(ValueError):
            ablation_source(toy_graph, "Q")


def test_export_coordinates(tmp_path, toy_graph):
    path = tmp_path / "p.coo"
    export_coordinates(proximity_matrix(toy_graph).values, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# shape 3 2"
    row, col, value = lines[1].split()
    assert (int(row), int(col)) == (0, 0) and float(value) == 0.75
