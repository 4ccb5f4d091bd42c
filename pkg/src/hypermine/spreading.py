"""Nonlinear SIR spreading on hypergraphs.

A susceptible member of a hyperedge with ``eta`` infected members is
infected by it with probability ``beta * eta**kappa`` per step (clamped to
1 and tallied when the term overflows probability range), so the per-node
infection probability is one minus the product of the per-hyperedge
survival factors. Updates are synchronous with counts frozen at the step
start; infected nodes recover with probability ``gamma``.

Randomness comes from counter-based Philox streams keyed by
``(master seed, namespace, unit, run)``, which makes every result
reproducible under any worker count and identical across kernel backends.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from . import _kernels
from ._parallel import parallel_map
from .hypercore import Hypergraph
from .metrics import kendall_tau

log = logging.getLogger(__name__)

_NS_INFLUENCE = 0
_NS_THRESHOLD = 1
_NS_SINGLE = 2


@dataclass(frozen=True)
class SirConfig:
    """Spreading parameters; defaults follow the influence protocol."""

    beta: float
    gamma: float = 0.25
    kappa: float = 1.25
    runs: int = 100
    seed: int = 0
    max_steps: int = 0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must be in (0, 1]")
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass(frozen=True)
class SirOutcome:
    """Trace of one run: recovered counts per step and the final tally."""

    final_recovered: int
    steps: int
    r_series: np.ndarray
    s_series: np.ndarray = None
    i_series: np.ndarray = None
    infection_step: np.ndarray = None
    clamp_count: int = 0


@dataclass(frozen=True)
class ThresholdEstimate:
    beta_c: float
    betas: np.ndarray
    chi: np.ndarray
    mean_size: np.ndarray
    no_threshold: bool = False
    ensemble_runs: int = 0


@dataclass(frozen=True)
class TauResult:
    tau: float
    se: float
    batch_taus: np.ndarray = field(default=None)


def _kernel(backend: str | None):
    return _kernels if backend is None else _kernels.get_backend(backend)


def _kernel_arrays(graph: Hypergraph):
    if np.any(graph.degrees == 0):
        raise ValueError("spreading requires every node in at least one hyperedge")
    csr = graph.incidence
    return csr.indptr.astype(np.int64), csr.indices.astype(np.int64)


def _factor_table(graph: Hypergraph, config: SirConfig):
    """Survival factor per possible infected count, plus the clamp onset."""
    k_max = int(graph.orders.max())
    eta = np.arange(k_max + 1, dtype=np.float64)
    term = config.beta * eta**config.kappa
    clamped = term > 1.0
    clamp_eta = int(np.argmax(clamped)) if clamped.any() else k_max + 1
    return 1.0 - np.minimum(term, 1.0), clamp_eta


def _stream(seed: int, *key: int) -> Philox:
    return Philox(SeedSequence(seed, spawn_key=tuple(key)))


def simulate_sir(
    graph: Hypergraph,
    config: SirConfig,
    seeds,
    record_series: bool = True,
    track_infection_step: bool = False,
    backend: str | None = None,
) -> SirOutcome:
    """Run one simulation from the given seed node set to extinction
    (or ``config.max_steps`` when set)."""
    seeds = np.asarray(sorted(set(int(s) for s in seeds)), dtype=np.int64)
    if seeds.size == 0:
        raise ValueError("need at least one seed node")
    indptr, indices = _kernel_arrays(graph)
    table, clamp_eta = _factor_table(graph, config)
    gen = Generator(_stream(config.seed, _NS_SINGLE))
    out = _kernel(backend).sir_run(
        indptr,
        indices,
        graph.n_edges,
        table,
        clamp_eta,
        config.gamma,
        seeds,
        gen,
        max_steps=config.max_steps,
        record_series=record_series,
        track_infection_step=track_infection_step,
    )
    if out["clamp_count"]:
        log.debug("sir: infection term clamped %d time(s)", out["clamp_count"])
    return SirOutcome(
        final_recovered=out["final_recovered"],
        steps=out["steps"],
        r_series=out["r_series"],
        s_series=out["s_series"],
        i_series=out["i_series"],
        infection_step=out["infection_step"],
        clamp_count=out["clamp_count"],
    )


def _final_sizes_for_node(args):
    kernel, indptr, indices, n_edges, table, clamp_eta, config, node = args
    bitgens = [
        _stream(config.seed, _NS_INFLUENCE, node, run) for run in range(config.runs)
    ]
    sizes, clamps = kernel.sir_final_sizes(
        indptr,
        indices,
        n_edges,
        table,
        clamp_eta,
        config.gamma,
        np.full(config.runs, node, dtype=np.int64),
        bitgens,
        max_steps=config.max_steps,
    )
    return sizes, int(clamps.sum())


def node_influence_samples(
    graph: Hypergraph,
    config: SirConfig,
    backend: str | None = None,
    workers: int | None = None,
) -> np.ndarray:
    """Final epidemic sizes, shape (n_nodes, runs): entry (i, r) is the
    outcome of run ``r`` seeded solely at node ``i``."""
    kernel = _kernel(backend)
    indptr, indices = _kernel_arrays(graph)
    table, clamp_eta = _factor_table(graph, config)
    jobs = [
        (kernel, indptr, indices, graph.n_edges, table, clamp_eta, config, node)
        for node in range(graph.n_nodes)
    ]
    results = parallel_map(_final_sizes_for_node, jobs, workers=workers)
    clamp_total = sum(c for _, c in results)
    if clamp_total:
        log.info("influence: infection term clamped %d time(s)", clamp_total)
    return np.stack([sizes for sizes, _ in results])


def node_influence(
    graph: Hypergraph,
    config: SirConfig,
    backend: str | None = None,
    workers: int | None = None,
) -> np.ndarray:
    """Mean final epidemic size per seed node."""
    return node_influence_samples(graph, config, backend, workers).mean(axis=1)


def _ensemble_sizes(kernel, graph, indptr, indices, table, clamp_eta, config, point_id, runs):
    """Final sizes from uniformly random single seeds (one stream per run)."""
    bitgens = [
        _stream(config.seed, _NS_THRESHOLD, point_id, run) for run in range(runs)
    ]
    # the seed-node draw consumes from the same per-run stream, in the
    # wrapper, so both backends see identical stream positions
    seed_nodes = np.asarray(
        [Generator(bg).integers(0, graph.n_nodes) for bg in bitgens], dtype=np.int64
    )
    sizes, _ = kernel.sir_final_sizes(
        indptr,
        indices,
        graph.n_edges,
        table,
        clamp_eta,
        config.gamma,
        seed_nodes,
        bitgens,
        max_steps=config.max_steps,
    )
    return sizes


def _susceptibility(sizes: np.ndarray) -> float:
    r = sizes.astype(np.float64)
    mean = r.mean()
    return float((np.mean(r**2) - mean**2) / mean)


def estimate_threshold(
    graph: Hypergraph,
    config_template: SirConfig,
    beta_grid,
    ensemble_runs: int = 2000,
    backend: str | None = None,
    workers: int | None = None,
    checkpoint=None,
) -> ThresholdEstimate:
    """Locate the spreading threshold as the susceptibility peak.

    chi(beta) = (<R^2> - <R>^2) / <R> over an ensemble of random-seed runs
    per grid point; the argmax is refined by one bisection pass between its
    grid neighbours. A peak on the grid boundary is reported with the
    ``no_threshold`` flag. ``checkpoint`` (a results.Checkpoint) lets
    interrupted sweeps resume per grid point.
    """
    betas = np.asarray(beta_grid, dtype=np.float64)
    if betas.size < 10:
        raise ValueError("grid too small: need at least 10 beta points")
    if np.any(np.diff(betas) <= 0):
        raise ValueError("beta grid must be strictly ascending")
    kernel = _kernel(backend)
    indptr, indices = _kernel_arrays(graph)
    checkpoint_lock = threading.Lock()

    def chi_at(point_id: int, beta: float):
        unit = f"beta:{point_id}"
        if checkpoint is not None:
            cached = checkpoint.get(unit)
            if cached is not None:
                return cached["chi"], cached["mean_size"]
        config = SirConfig(
            beta=beta,
            gamma=config_template.gamma,
            kappa=config_template.kappa,
            runs=config_template.runs,
            seed=config_template.seed,
            max_steps=config_template.max_steps,
        )
        table, clamp_eta = _factor_table(graph, config)
        sizes = _ensemble_sizes(
            kernel, graph, indptr, indices, table, clamp_eta, config, point_id, ensemble_runs
        )
        chi, mean_size = _susceptibility(sizes), float(sizes.mean())
        if checkpoint is not None:
            with checkpoint_lock:
                checkpoint.put(unit, {"chi": chi, "mean_size": mean_size})
        return chi, mean_size

    results = parallel_map(
        lambda ib: chi_at(ib[0], ib[1]), list(enumerate(betas)), workers=workers
    )
    chi = np.asarray([c for c, _ in results])
    mean_size = np.asarray([m for _, m in results])
    peak = int(np.argmax(chi))
    no_threshold = peak in (0, betas.size - 1) or np.ptp(chi) == 0.0
    if no_threshold:
        log.warning("threshold: susceptibility has no interior peak on the grid")

    all_betas = list(betas)
    all_chi = list(chi)
    all_mean = list(mean_size)
    beta_c = float(betas[peak])
    if not no_threshold:
        # one bisection pass: probe the midpoints next to the peak
        mids = [
            (betas.size, (betas[peak - 1] + betas[peak]) / 2.0),
            (betas.size + 1, (betas[peak] + betas[peak + 1]) / 2.0),
        ]
        mid_results = parallel_map(
            lambda ib: chi_at(ib[0], ib[1]), mids, workers=workers
        )
        for (_, beta), (c, m) in zip(mids, mid_results):
            all_betas.append(float(beta))
            all_chi.append(c)
            all_mean.append(m)
        candidates = [peak, len(all_betas) - 2, len(all_betas) - 1]
        best = max(candidates, key=lambda idx: all_chi[idx])
        beta_c = float(all_betas[best])

    order = np.argsort(all_betas)
    return ThresholdEstimate(
        beta_c=beta_c,
        betas=np.asarray(all_betas)[order],
        chi=np.asarray(all_chi)[order],
        mean_size=np.asarray(all_mean)[order],
        no_threshold=bool(no_threshold),
        ensemble_runs=ensemble_runs,
    )


def tau_with_se(centrality: np.ndarray, samples: np.ndarray, batches: int = 10) -> TauResult:
    """Rank correlation of a centrality against simulated influence.

    The point estimate uses the mean over all runs; the standard error
    comes from re-estimating the correlation on disjoint run batches.
    """
    runs = samples.shape[1]
    batches = max(1, min(batches, runs))
    tau = kendall_tau(centrality, samples.mean(axis=1))
    groups = np.array_split(np.arange(runs), batches)
    batch_taus = np.asarray(
        [kendall_tau(centrality, samples[:, g].mean(axis=1)) for g in groups]
    )
    se = float(batch_taus.std(ddof=1) / np.sqrt(batches)) if batches > 1 else 0.0
    return TauResult(tau=float(tau), se=se, batch_taus=batch_taus)


def evaluate_centrality_vs_influence(
    graph: Hypergraph,
    centrality,
    config: SirConfig,
    batches: int = 10,
    backend: str | None = None,
    workers: int | None = None,
) -> TauResult:
    """Convenience wrapper: simulate influence, then correlate."""
    values = getattr(centrality, "values", centrality)
    samples = node_influence_samples(graph, config, backend=backend, workers=workers)
    return tau_with_se(np.asarray(values, dtype=np.float64), samples, batches=batches)
