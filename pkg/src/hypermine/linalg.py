"""Shared numerical kernels: sparse products, eigensolvers, k-means.

Sparse storage and products are delegated to scipy (single-threaded CSR
kernels with a fixed accumulation order, so results are reproducible).
Dense brute-force oracles for all of these live in the test suite.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

log = logging.getLogger(__name__)

DENSE_EIG_LIMIT = 4000


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance."""


def canonicalize(matrix) -> sp.csr_matrix:
    """CSR with duplicates summed, explicit zeros removed, indices sorted."""
    out = sp.csr_matrix(matrix)
    out.sum_duplicates()
    out.eliminate_zeros()
    out.sort_indices()
    return out


def spmm(a, b) -> sp.csr_matrix:
    """Sparse-sparse product with canonical output."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return canonicalize(sp.csr_matrix(a) @ sp.csr_matrix(b))


def power_iteration(op, dim: int, tol: float = 1e-10, max_iter: int = 5000, seed: int = 0):
    """Dominant eigenpair of a linear operator given as a callable.

    The vector is kept 1-norm normalized; for a nonnegative irreducible
    operator the iterate stays entrywise nonnegative. Returns
    ``(eigenvalue, vector, converged)``; the residual criterion is
    ``||A v - lambda v||_2 / ||v||_2 < tol``.
    """
    rng = np.random.default_rng(seed)
    v = rng.random(dim) + 0.5
    v /= np.abs(v).sum()
    lam = 0.0
    for _ in range(max_iter):
        w = op(v)
        lam = float(v @ w / (v @ v))
        if np.linalg.norm(w - lam * v) <= tol * np.linalg.norm(v):
            return lam, v, True
        norm = np.abs(w).sum()
        if norm == 0.0:
            return 0.0, w, True
        v = w / norm
    log.warning("power iteration hit max_iter=%d (tol=%g)", max_iter, tol)
    return lam, v, False


def spectral_radius(matrix, iterations: int = 100, seed: int = 0) -> float:
    """Power-iteration estimate of the spectral radius."""
    matrix = sp.csr_matrix(matrix)
    rng = np.random.default_rng(seed)
    v = rng.random(matrix.shape[0]) + 0.5
    lam = 0.0
    for _ in range(iterations):
        w = matrix @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        lam = norm / np.linalg.norm(v)
        v = w / norm
    return float(abs(lam))


def smallest_eigenpairs(matrix, count: int):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    Dense LAPACK path up to DENSE_EIG_LIMIT; Lanczos (ARPACK, applied to the
    spectrum flipped around an upper bound) beyond that. Both paths agree
    within 1e-6 on overlapping sizes.
    """
    n = matrix.shape[0]
    if count > n:
        raise ValueError(f"asked for {count} eigenpairs of a {n}x{n} matrix")
    if n <= DENSE_EIG_LIMIT:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
        dense = (dense + dense.T) / 2.0
        vals, vecs = scipy.linalg.eigh(dense, subset_by_index=[0, count - 1])
        return vals, vecs
    matrix = sp.csr_matrix(matrix)
    shift = spectral_radius(matrix) * 1.01 + 1.0
    flipped = sp.identity(n, format="csr") * shift - matrix
    try:
        vals, vecs = spla.eigsh(flipped, k=count, which="LA")
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"Lanczos failed to converge: {exc}") from exc
    vals = shift - vals
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def _farthest_first_centroids(points: np.ndarray, k: int, rng) -> np.ndarray:
    """Greedy farthest-first seeding; only the first pick is random."""
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(d2))
        chosen.append(nxt)
        d2 = np.minimum(d2, np.sum((points - points[nxt]) ** 2, axis=1))
    return points[chosen].copy()


def _lloyd(points, centroids, max_iter, rel_tol):
    n, k = points.shape[0], centroids.shape[0]
    prev_inertia = np.inf
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = (
            np.sum(points**2, axis=1)[:, None]
            - 2.0 * points @ centroids.T
            + np.sum(centroids**2, axis=1)[None, :]
        )
        np.maximum(d2, 0.0, out=d2)
        assign = np.argmin(d2, axis=1)
        closest = d2[np.arange(n), assign]
        # refill empty clusters with the point farthest from its centroid
        for c in range(k):
            if not np.any(assign == c):
                far = int(np.argmax(closest))
                assign[far] = c
                closest[far] = 0.0
        inertia = float(closest.sum())
        for c in range(k):
            centroids[c] = points[assign == c].mean(axis=0)
        if prev_inertia - inertia <= rel_tol * max(prev_inertia, 1e-300):
            break
        prev_inertia = inertia
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        - 2.0 * points @ centroids.T
        + np.sum(centroids**2, axis=1)[None, :]
    )
    np.maximum(d2, 0.0, out=d2)
    assign = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(n), assign].sum())
    return assign, inertia


def kmeans(
    points: np.ndarray,
    k: int,
    restarts: int = 100,
    seed: int = 0,
    max_iter: int = 300,
    rel_tol: float = 1e-6,
):
    """Best-of-restarts Lloyd k-means, deterministic for a given seed.

    Returns ``(assignment, inertia)``. The inertia is non-increasing within
    each run; ties across restarts keep the earliest restart.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points {n}")
    rng = np.random.default_rng(seed)
    best_assign, best_inertia = None, np.inf
    for _ in range(restarts):
        centroids = _farthest_first_centroids(points, k, rng)
        assign, inertia = _lloyd(points, centroids, max_iter, rel_tol)
        if inertia < best_inertia:
            best_assign, best_inertia = assign, inertia
    return best_assign, best_inertia
