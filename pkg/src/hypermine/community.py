"""Community detection: spectral pipelines, nonnegative factorization,
and degree-preserving modularity optimization, plus pairwise precision.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.random import Generator, Philox, SeedSequence

from .hypercore import CommunityLabels, Hypergraph, clique_adjacency, weighted_adjacency
from .linalg import kmeans, smallest_eigenpairs
from .proximity import SimilarityMatrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Partition:
    assignment: np.ndarray
    method: str
    seed: int
    n_requested: int
    n_found: int
    converged: bool = True
    objective: float | None = None


def _inv_sqrt_degrees(graph: Hypergraph) -> sp.dia_matrix:
    d = graph.degrees.astype(np.float64)
    inv = np.zeros_like(d)
    inv[d > 0] = 1.0 / np.sqrt(d[d > 0])
    return sp.diags(inv)


def _spectral_partition(
    affinity, graph: Hypergraph, n_c: int, seed: int, method: str, degree_norm: bool = True
) -> Partition:
    """Shared spectral pipeline: normalized-Laplacian embedding + k-means.

    ``degree_norm=True`` scales by the hypergraph degree diagonal; the
    alternative normalizes by the affinity row sums (sensitivity knob).
    """
    n = graph.n_nodes
    if degree_norm:
        scale = _inv_sqrt_degrees(graph)
    else:
        rows = np.asarray(affinity.sum(axis=1)).ravel()
        inv = np.zeros_like(rows)
        inv[rows > 0] = 1.0 / np.sqrt(rows[rows > 0])
        scale = sp.diags(inv)
    lap = sp.identity(n, format="csr") - scale @ affinity @ scale
    lap = (lap + lap.T) * 0.5
    _, vectors = smallest_eigenpairs(lap, n_c)
    assignment, inertia = kmeans(vectors, n_c, restarts=100, seed=seed)
    return Partition(
        assignment=assignment,
        method=method,
        seed=seed,
        n_requested=n_c,
        n_found=int(len(np.unique(assignment))),
        objective=inertia,
    )


def hra_cd_partition(
    graph: Hypergraph,
    sim: SimilarityMatrix,
    n_c: int,
    seed: int = 0,
    degree_norm: bool = True,
) -> Partition:
    """Spectral clustering on the allocation-based similarity matrix."""
    if n_c < 2:
        raise ValueError("n_c must be >= 2")
    return _spectral_partition(sim.values, graph, n_c, seed, "hra", degree_norm)


def hsc_partition(graph: Hypergraph, n_c: int, seed: int = 0) -> Partition:
    """Spectral clustering on the order-normalized clique expansion."""
    if n_c < 2:
        raise ValueError("n_c must be >= 2")
    return _spectral_partition(
        weighted_adjacency(graph, "order"), graph, n_c, seed, "hsc"
    )


def nmf_factorize(
    a: sp.csr_matrix,
    n_c: int,
    iterations: int = 500,
    tolerance: float = 1e-5,
    seed: int = 0,
):
    """Multiplicative-update nonnegative factorization A ~ F Z.

    Returns ``(f, z, history, converged)``; the Frobenius objective in
    ``history`` is non-increasing per update pass. Non-convergence within
    the iteration budget returns the last iterate with ``converged=False``.
    """
    n = a.shape[0]
    rng = Generator(Philox(SeedSequence(seed)))
    scale = np.sqrt(a.sum() / a.shape[0] ** 2 / n_c) if a.nnz else 1.0 / n_c
    f = rng.random((n, n_c)) * scale + 1e-8
    z = rng.random((n_c, n)) * scale + 1e-8
    eps = 1e-12
    norm_a = float((a.data**2).sum())

    def objective(f, z):
        az = np.asarray(a @ z.T)
        cross = float(np.sum(az * f))
        gram = float(np.sum((f.T @ f) * (z @ z.T)))
        return norm_a - 2.0 * cross + gram

    prev = objective(f, z)
    history = [prev]
    converged = False
    for _ in range(iterations):
        f *= np.asarray(a @ z.T) / (f @ (z @ z.T) + eps)
        z *= np.asarray(f.T @ a) / ((f.T @ f) @ z + eps)
        cur = objective(f, z)
        history.append(cur)
        if prev - cur <= tolerance * max(abs(prev), eps):
            converged = True
            break
        prev = cur
    return f, z, history, converged


def nmf_partition(
    graph: Hypergraph,
    n_c: int,
    iterations: int = 500,
    tolerance: float = 1e-5,
    seed: int = 0,
) -> Partition:
    """Community assignment by row-argmax of the factorized clique adjacency."""
    a = clique_adjacency(graph)
    f, _, history, converged = nmf_factorize(
        a, n_c, iterations=iterations, tolerance=tolerance, seed=seed
    )
    if not converged:
        log.warning("nmf: no convergence after %d iterations", iterations)
    assignment = np.argmax(f, axis=1)
    return Partition(
        assignment=assignment,
        method="nmf",
        seed=seed,
        n_requested=n_c,
        n_found=int(len(np.unique(assignment))),
        converged=converged,
        objective=history[-1],
    )


def _modularity(adj, null_deg, sum_d, membership) -> float:
    """Q = (1/2m) * sum_ij (A_ij - d_i d_j / sum_d) [g_i == g_j]."""
    m2 = adj.sum()
    coo = sp.coo_matrix(adj)
    same = membership[coo.row] == membership[coo.col]
    within_w = float(coo.data[same].sum())
    comm_deg = np.bincount(membership, weights=null_deg)
    within_null = float((comm_deg**2).sum() / sum_d)
    return (within_w - within_null) / m2


def _louvain_level(adj: sp.csr_matrix, null_deg: np.ndarray, sum_d: float, rng, min_gain: float):
    """One local-move phase; returns the membership vector (may be identity)."""
    n = adj.shape[0]
    m = adj.sum() / 2.0
    membership = np.arange(n)
    comm_deg = null_deg.astype(np.float64).copy()
    indptr, indices, data = adj.indptr, adj.indices, adj.data
    improved = True
    while improved:
        improved = False
        for i in rng.permutation(n):
            a = membership[i]
            row = slice(indptr[i], indptr[i + 1])
            cols, w = indices[row], data[row]
            keep = cols != i
            cols, w = cols[keep], w[keep]
            own = null_deg[i]
            # affinity to each candidate community (excluding i itself)
            comms, inverse = np.unique(membership[cols], return_inverse=True)
            if len(comms) == 0:
                continue
            link = np.zeros(len(comms))
            np.add.at(link, inverse, w)
            gain = link - own * (comm_deg[comms] - np.where(comms == a, own, 0.0)) / sum_d
            base_idx = np.flatnonzero(comms == a)
            if base_idx.size:
                base = gain[base_idx[0]]
            else:
                base = -own * (comm_deg[a] - own) / sum_d
            best_idx = int(np.argmax(gain))
            if (gain[best_idx] - base) / m > min_gain and comms[best_idx] != a:
                membership[i] = comms[best_idx]
                comm_deg[a] -= own
                comm_deg[comms[best_idx]] += own
                improved = True
    _, membership = np.unique(membership, return_inverse=True)
    return membership


def _aggregate(adj, null_deg, membership):
    n_comm = int(membership.max()) + 1
    ind = sp.csr_matrix(
        (np.ones(len(membership)), (np.arange(len(membership)), membership)),
        shape=(len(membership), n_comm),
    )
    adj2 = (ind.T @ adj @ ind).tocsr()
    deg2 = np.asarray(ind.T @ null_deg).ravel()
    return adj2, deg2


def ndp_louvain_partition(graph: Hypergraph, n_c: int, seed: int = 0) -> Partition:
    """Greedy modularity maximization with the hypergraph-degree null model.

    Works on the degree-preserving weighted expansion (self-loops kept);
    if the greedy phase ends with more than ``n_c`` communities they are
    merged by average linkage on the mean inter-community modularity
    contribution; with fewer, the result is returned as-is with a flag.
    """
    if n_c < 1:
        raise ValueError("n_c must be >= 1")
    aw = weighted_adjacency(graph, "ndp")
    d = graph.degrees.astype(np.float64)
    sum_d = float(d.sum())
    rng = Generator(Philox(SeedSequence(seed)))

    adj, null_deg = aw.tocsr(), d
    membership = np.arange(graph.n_nodes)
    while True:
        level = _louvain_level(adj, null_deg, sum_d, rng, min_gain=1e-9)
        if len(np.unique(level)) == adj.shape[0]:
            break
        membership = level[membership]
        adj, null_deg = _aggregate(adj, null_deg, level)

    assignment = membership
    n_found = int(len(np.unique(assignment)))
    converged = True
    if n_found > n_c:
        assignment = _agglomerate(adj, null_deg, sum_d, assignment, n_c)
        n_found = int(len(np.unique(assignment)))
    elif n_found < n_c:
        log.warning("ndp-louvain found %d < %d communities", n_found, n_c)
        converged = False
    q = _modularity(aw, d, sum_d, assignment)
    return Partition(
        assignment=assignment,
        method="ndp",
        seed=seed,
        n_requested=n_c,
        n_found=n_found,
        converged=converged,
        objective=q,
    )


def _agglomerate(adj, null_deg, sum_d, assignment, n_c):
    """Average-linkage merging on the mean inter-community modularity term."""
    n_comm = adj.shape[0]
    weight = np.asarray(adj.todense(), dtype=np.float64)
    deg = null_deg.astype(np.float64).copy()
    sizes = np.bincount(assignment, minlength=n_comm).astype(np.float64)
    alive = np.ones(n_comm, dtype=bool)
    merged_into = np.arange(n_comm)
    while int(alive.sum()) > n_c:
        idx = np.flatnonzero(alive)
        best, best_pair = -np.inf, None
        for ai, ci in enumerate(idx):
            for cj in idx[ai + 1 :]:
                mean_b = (
                    weight[ci, cj] - deg[ci] * deg[cj] / sum_d
                ) / (sizes[ci] * sizes[cj])
                if mean_b > best:
                    best, best_pair = mean_b, (ci, cj)
        ci, cj = best_pair
        weight[ci, :] += weight[cj, :]
        weight[:, ci] += weight[:, cj]
        deg[ci] += deg[cj]
        sizes[ci] += sizes[cj]
        alive[cj] = False
        merged_into[merged_into == cj] = ci
    final = merged_into[assignment]
    _, final = np.unique(final, return_inverse=True)
    return final


def precision(pred: Partition | np.ndarray, truth: CommunityLabels | np.ndarray) -> float:
    """Fraction of predicted same-cluster pairs that share a true community."""
    pred_labels = pred.assignment if isinstance(pred, Partition) else np.asarray(pred)
    true_labels = truth.labels if isinstance(truth, CommunityLabels) else np.asarray(truth)
    if pred_labels.shape != true_labels.shape:
        raise ValueError("partition and labels cover different node sets")
    _, pred_ids = np.unique(pred_labels, return_inverse=True)
    _, true_ids = np.unique(true_labels, return_inverse=True)
    counts_pred = np.bincount(pred_ids)
    total = int((counts_pred * (counts_pred - 1) // 2).sum())
    if total == 0:
        log.warning("precision undefined: no same-cluster pairs; returning 0")
        return 0.0
    joint = pred_ids.astype(np.int64) * (true_ids.max() + 1) + true_ids
    counts_joint = np.bincount(joint)
    hits = int((counts_joint * (counts_joint - 1) // 2).sum())
    return hits / total
