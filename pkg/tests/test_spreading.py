"""Spreading dynamics, influence estimation, threshold location."""

import numpy as np
import pytest

from hypermine.hypercore import Hypergraph
from hypermine.metrics import kendall_tau
from hypermine.spreading import (
    SirConfig,
    estimate_threshold,
    evaluate_centrality_vs_influence,
    node_influence,
    node_influence_samples,
    simulate_sir,
    tau_with_se,
)

from conftest import random_hypergraph


def star_of_dyads(arms=8):
    """Hub node 0 joined to each leaf by its own pair hyperedge."""
    return Hypergraph.from_hyperedges([(0, i) for i in range(1, arms + 1)])


class TestSimulate:
    def test_beta_zero_only_seeds_recover(self, toy_graph):
        for seed in range(5):
            out = simulate_sir(toy_graph, SirConfig(beta=0.0, seed=seed), [1])
            assert out.final_recovered == 1

    def test_forced_dynamics(self, single_edge_graph):
        out = simulate_sir(
            single_edge_graph, SirConfig(beta=1.0, gamma=1.0, kappa=2.0, seed=0), [0]
        )
        assert out.final_recovered == 2
        assert out.steps == 2

    def test_conservation_and_monotone_series(self):
        g = random_hypergraph(np.random.default_rng(0), max_nodes=25, max_edges=30)
        out = simulate_sir(g, SirConfig(beta=0.4, seed=3), [0])
        n = g.n_nodes
        total = out.s_series + out.i_series + out.r_series
        assert np.all(total == n)
        assert np.all(np.diff(out.r_series) >= 0)
        assert np.all(np.diff(out.s_series) <= 0)
        assert out.i_series[-1] == 0

    def test_one_hyperedge_single_step_probability(self):
        g = Hypergraph.from_hyperedges([(0, 1, 2)])
        beta = 0.37
        hits = 0
        trials = 100_000
        for run in range(trials):
            out = simulate_sir(
                g,
                SirConfig(beta=beta, gamma=1.0, kappa=1.25, seed=run),
                [0],
                record_series=False,
                track_infection_step=True,
            )
            if out.infection_step[1] == 1:
                hits += 1
        assert hits / trials == pytest.approx(beta, abs=0.005)

    def test_empty_seed_rejected(self, toy_graph):
        with pytest.raises(ValueError):
            simulate_sir(toy_graph, SirConfig(beta=0.1), [])

    def test_clamp_counted(self):
        g = Hypergraph.from_hyperedges([(0, 1, 2, 3, 4)])
        out = simulate_sir(
            g, SirConfig(beta=0.9, gamma=0.5, kappa=2.0, seed=1), [0, 1]
        )
        # eta=2 gives 0.9 * 2^2 = 3.6 > 1: clamped from the first step
        assert out.clamp_count >= 1

    def test_no_clamp_when_bounded(self):
        g = Hypergraph.from_hyperedges([(0, 1, 2)])
        out = simulate_sir(g, SirConfig(beta=0.2, gamma=0.5, kappa=1.0, seed=1), [0])
        assert out.clamp_count == 0


class TestConfig:
    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            SirConfig(beta=-0.1)
        with pytest.raises(ValueError):
            SirConfig(beta=0.1, gamma=0.0)
        with pytest.raises(ValueError):
            SirConfig(beta=0.1, kappa=0.0)
        with pytest.raises(ValueError):
            SirConfig(beta=0.1, runs=0)


class TestInfluence:
    def test_beta_zero_unit_influence(self, toy_graph):
        influence = node_influence(toy_graph, SirConfig(beta=0.0, runs=5, seed=1))
        assert np.all(influence == 1.0)

    def test_automorphic_nodes_close(self):
        g = Hypergraph.from_hyperedges([(0, 1), (1, 2)])
        samples = node_influence_samples(g, SirConfig(beta=0.5, runs=10_000, seed=2))
        mean = samples.mean(axis=1)
        spread = samples.std(axis=1, ddof=1) / np.sqrt(samples.shape[1])
        assert abs(mean[0] - mean[2]) < 3 * np.hypot(spread[0], spread[2])

    def test_supercritical_saturation(self):
        g = random_hypergraph(np.random.default_rng(5), max_nodes=20, max_edges=40)
        influence = node_influence(g, SirConfig(beta=1.0, gamma=0.25, runs=50, seed=3))
        assert np.all(influence > 0.95 * g.n_nodes)

    def test_worker_count_invariance(self):
        g = random_hypergraph(np.random.default_rng(6), max_nodes=15, max_edges=20)
        config = SirConfig(beta=0.3, runs=20, seed=4)
        a = node_influence_samples(g, config, workers=1)
        b = node_influence_samples(g, config, workers=8)
        assert np.array_equal(a, b)


class TestThreshold:
    def test_grid_too_small(self, toy_graph):
        with pytest.raises(ValueError, match="grid too small"):
            estimate_threshold(toy_graph, SirConfig(beta=0.0), [0.0])

    def test_interior_peak_on_star(self):
        g = star_of_dyads(10)
        grid = np.linspace(0.02, 0.98, 13)
        est = estimate_threshold(
            g, SirConfig(beta=0.0, gamma=0.5, kappa=1.0, seed=9), grid, ensemble_runs=400
        )
        assert not est.no_threshold
        assert grid[0] < est.beta_c < grid[-1]
        assert est.chi.shape == est.betas.shape

    def test_reproducible(self):
        g = star_of_dyads(6)
        grid = np.linspace(0.05, 0.95, 10)
        kwargs = dict(ensemble_runs=200)
        e1 = estimate_threshold(g, SirConfig(beta=0.0, seed=11), grid, **kwargs)
        e2 = estimate_threshold(g, SirConfig(beta=0.0, seed=11), grid, **kwargs)
        assert e1.beta_c == e2.beta_c
        assert np.array_equal(e1.chi, e2.chi)

    def test_mean_size_monotone_in_beta(self):
        g = random_hypergraph(np.random.default_rng(12), max_nodes=20, max_edges=30)
        grid = np.linspace(0.01, 0.9, 10)
        est = estimate_threshold(
            g, SirConfig(beta=0.0, seed=13), grid, ensemble_runs=600
        )
        sizes = est.mean_size
        # allow 3-standard-error slack per comparison; sizes bounded by n
        slack = 3 * g.n_nodes / np.sqrt(600)
        assert np.all(np.diff(sizes) >= -slack)


class TestTau:
    def test_identical_vectors(self):
        rng = np.random.default_rng(14)
        samples = rng.random(size=(30, 8))  # continuous: tie-free means
        influence = samples.mean(axis=1)
        result = tau_with_se(influence, samples, batches=4)
        assert result.tau == 1.0

    def test_reversed_ranking(self):
        rng = np.random.default_rng(15)
        samples = np.tile(np.arange(1.0, 21.0)[:, None], (1, 6))
        result = tau_with_se(-samples.mean(axis=1), samples, batches=3)
        assert result.tau == -1.0

    def test_independent_vectors_null(self):
        rng = np.random.default_rng(16)
        taus = [
            kendall_tau(rng.random(100), rng.random(100)) for _ in range(1000)
        ]
        assert abs(np.mean(taus)) < 0.02

    def test_evaluate_wrapper(self, toy_graph):
        from hypermine.vitality import hdc_centrality

        result = evaluate_centrality_vs_influence(
            toy_graph,
            hdc_centrality(toy_graph),
            SirConfig(beta=0.3, runs=40, seed=17),
            batches=5,
        )
        assert -1.0 <= result.tau <= 1.0
        assert result.se >= 0.0
        assert len(result.batch_taus) == 5
