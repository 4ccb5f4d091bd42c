"""Pure-numpy spreading kernel (fallback backend).

See the package docstring for the algorithm and random-stream contract.
The hot path is vectorized per step; the Cython backend does the same
work in a single nogil loop.
"""

from __future__ import annotations

import numpy as np


def _rows_concat(indptr, indices, rows):
    """Concatenated CSR column indices of the given rows (in row order)."""
    starts = indptr[rows]
    counts = indptr[rows + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=indices.dtype)
    cum = np.cumsum(counts)
    within = np.arange(total, dtype=np.int64) - np.repeat(cum - counts, counts)
    return indices[np.repeat(starts, counts) + within]


def sir_run(
    node_indptr,
    node_indices,
    n_edges,
    ftable,
    clamp_eta,
    gamma,
    seed_nodes,
    generator,
    max_steps=0,
    record_series=False,
    track_infection_step=False,
):
    """Single simulation run; returns a dict of outcomes.

    ``generator`` is a numpy Generator whose stream is consumed exactly as
    documented in the package docstring.
    """
    n = len(node_indptr) - 1
    state = np.zeros(n, dtype=np.uint8)
    seed_nodes = np.asarray(seed_nodes, dtype=np.int64)
    state[seed_nodes] = 1
    infection_step = None
    if track_infection_step:
        infection_step = np.full(n, -1, dtype=np.int64)
        infection_step[seed_nodes] = 0
    n_inf = int(len(seed_nodes))
    n_rec = 0
    r_series, s_series, i_series = [], [], []
    clamp_count = 0
    step = 0
    while n_inf > 0 and (max_steps == 0 or step < max_steps):
        step += 1
        infected = np.flatnonzero(state == 1)
        eta = np.bincount(
            _rows_concat(node_indptr, node_indices, infected), minlength=n_edges
        )
        clamp_count += int(np.count_nonzero(eta >= clamp_eta))
        edge_factor = ftable[eta]
        row_prod = np.multiply.reduceat(edge_factor[node_indices], node_indptr[:-1])
        row_any = np.maximum.reduceat(
            (eta > 0).astype(np.uint8)[node_indices], node_indptr[:-1]
        )
        eligible = np.flatnonzero((state == 0) & (row_any > 0))
        u_inf = generator.random(len(eligible))
        new_infected = eligible[u_inf < 1.0 - row_prod[eligible]]
        u_rec = generator.random(len(infected))
        recovered = infected[u_rec < gamma]
        state[recovered] = 2
        state[new_infected] = 1
        if track_infection_step:
            infection_step[new_infected] = step
        n_rec += len(recovered)
        n_inf += len(new_infected) - len(recovered)
        if record_series:
            r_series.append(n_rec)
            i_series.append(n_inf)
            s_series.append(n - n_inf - n_rec)
    return {
        "final_recovered": n_rec,
        "final_infected": n_inf,
        "steps": step,
        "r_series": np.asarray(r_series, dtype=np.int64) if record_series else None,
        "i_series": np.asarray(i_series, dtype=np.int64) if record_series else None,
        "s_series": np.asarray(s_series, dtype=np.int64) if record_series else None,
        "infection_step": infection_step,
        "clamp_count": clamp_count,
    }


def sir_final_sizes(
    node_indptr,
    node_indices,
    n_edges,
    ftable,
    clamp_eta,
    gamma,
    seed_nodes_per_run,
    bit_generators,
    max_steps=0,
):
    """Batch of runs returning only final recovered counts and clamp tallies.

    ``seed_nodes_per_run[r]`` is the seed node of run ``r``; each run
    consumes its own bit generator.
    """
    n_runs = len(bit_generators)
    sizes = np.zeros(n_runs, dtype=np.int64)
    clamps = np.zeros(n_runs, dtype=np.int64)
    for r in range(n_runs):
        out = sir_run(
            node_indptr,
            node_indices,
            n_edges,
            ftable,
            clamp_eta,
            gamma,
            np.asarray([seed_nodes_per_run[r]], dtype=np.int64),
            np.random.Generator(bit_generators[r]),
            max_steps=max_steps,
        )
        sizes[r] = out["final_recovered"]
        clamps[r] = out["clamp_count"]
    return sizes, clamps
