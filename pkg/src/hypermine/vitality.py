"""Node centrality measures on hypergraphs.

The allocation-based score ranks a node by how strongly it bridges pairs
of hyperedges; the quadratic-form evaluation needs only the row sums and
row sums-of-squares of the proximity matrix, so it is linear in its
nonzero count. Benchmarks: two-level eigenvector centrality, Katz, the
bipartite principal eigenvector, closed-walk (matrix-exponential diagonal)
centrality, and plain degree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .hypercore import Hypergraph, clique_adjacency, connected_components
from .linalg import DENSE_EIG_LIMIT, power_iteration, spectral_radius
from .proximity import ProximityMatrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CentralityVector:
    values: np.ndarray
    method: str
    converged: bool = True


def hra_centrality(prox: ProximityMatrix) -> CentralityVector:
    """Sum of cross products of each row's entries over distinct hyperedge
    pairs, via (row sum)^2 - row sum of squares."""
    p = prox.values
    row_sum = np.asarray(p.sum(axis=1)).ravel()
    sq = p.copy()
    sq.data = sq.data**2
    row_sq = np.asarray(sq.sum(axis=1)).ravel()
    return CentralityVector(row_sum**2 - row_sq, "hra")


def _per_component(graph: Hypergraph, solver) -> tuple[np.ndarray, bool]:
    """Run an eigenvector-style solver per connected component.

    Values are concatenated without cross-component normalization, which is
    a documented caveat of disconnected inputs.
    """
    n_comp, labels = connected_components(graph)
    if n_comp == 1:
        return solver(graph, np.arange(graph.n_nodes))
    values = np.zeros(graph.n_nodes)
    ok = True
    for comp in range(n_comp):
        nodes = np.flatnonzero(labels == comp)
        edge_mask = np.asarray(
            graph.incidence[nodes].sum(axis=0)
        ).ravel() > 0
        sub = Hypergraph(graph.incidence[nodes][:, edge_mask])
        vals, conv = solver(sub, nodes)
        values[nodes] = vals
        ok = ok and conv
    return values, ok


def hec_centrality(
    graph: Hypergraph, max_iter: int = 10000, tol: float = 1e-12
) -> CentralityVector:
    """Coupled node/hyperedge power iteration x <- M K y, y <- M^T D x with
    1-norm normalization each half-step; returns the node vector."""

    def solve(sub: Hypergraph, _nodes):
        m = sub.incidence
        k = sub.orders.astype(np.float64)
        d = sub.degrees.astype(np.float64)
        x = np.full(sub.n_nodes, 1.0 / sub.n_nodes)
        y = np.full(sub.n_edges, 1.0 / sub.n_edges)
        for _ in range(max_iter):
            x_new = m @ (k * y)
            x_new /= x_new.sum()
            y = m.T @ (d * x_new)
            y /= y.sum()
            if np.abs(x_new - x).sum() < tol:
                return x_new, True
            x = x_new
        log.warning("hec: no convergence after %d iterations", max_iter)
        return x, False

    values, ok = _per_component(graph, solve)
    return CentralityVector(values, "hec", converged=ok)


def katz_centrality(graph: Hypergraph, gamma: float | None = None) -> CentralityVector:
    """Walk-counting centrality x = 1 + gamma * A x on the clique adjacency.

    ``gamma`` defaults to 0.85 over the power-iteration estimate of the
    spectral radius; values at or beyond the convergence radius are
    rejected with the estimate in the message.
    """
    a = clique_adjacency(graph)
    rho = spectral_radius(a)
    if gamma is None:
        gamma = 0.85 / rho if rho > 0 else 1.0
    if rho > 0 and gamma * rho >= 1.0:
        raise ValueError(
            f"gamma={gamma} outside convergence radius (estimated rho(A)={rho:.6g})"
        )
    system = sp.identity(graph.n_nodes, format="csr") - gamma * a
    x = spla.spsolve(system.tocsc(), np.ones(graph.n_nodes))
    return CentralityVector(np.asarray(x).ravel(), "katz")


def nb_centrality(graph: Hypergraph, tol: float = 1e-13, max_iter: int = 100000) -> CentralityVector:
    """Principal eigenvector of the bipartite block matrix [[0, M], [M^T, 0]].

    The node block is returned 1-norm normalized. The bipartite spectrum is
    symmetric, so the iteration runs on the unit-shifted matrix to isolate
    the top eigenvector; the shift leaves eigenvectors unchanged.
    """

    def solve(sub: Hypergraph, _nodes):
        n, m = sub.n_nodes, sub.n_edges
        bip = sp.bmat([[None, sub.incidence], [sub.incidence.T, None]], format="csr")
        shifted = bip + sp.identity(n + m, format="csr")
        lam, vec, ok = power_iteration(
            lambda v: shifted @ v, n + m, tol=tol, max_iter=max_iter, seed=0
        )
        if not ok:
            log.warning("nb: power iteration did not converge")
        node_part = np.abs(vec[:n])
        total = node_part.sum()
        return node_part / total if total > 0 else node_part, ok

    values, ok = _per_component(graph, solve)
    return CentralityVector(values, "nb", converged=ok)


def shc_centrality(graph: Hypergraph) -> CentralityVector:
    """Closed-walk centrality: diagonal of exp(A) via the full spectrum.

    Uses a dense symmetric eigendecomposition, so inputs are capped at
    DENSE_EIG_LIMIT nodes.
    """
    if graph.n_nodes > DENSE_EIG_LIMIT:
        raise ValueError(
            f"shc supports at most {DENSE_EIG_LIMIT} nodes (got {graph.n_nodes})"
        )
    a = clique_adjacency(graph).toarray()
    vals, vecs = scipy.linalg.eigh(a)
    return CentralityVector((vecs**2) @ np.exp(vals), "shc")


def hdc_centrality(graph: Hypergraph) -> CentralityVector:
    """Degree centrality."""
    return CentralityVector(graph.degrees.astype(np.float64), "hdc")


MEASURES = {
    "hra": None,  # needs a proximity matrix; see compute_measures
    "hec": hec_centrality,
    "katz": katz_centrality,
    "nb": nb_centrality,
    "shc": shc_centrality,
    "hdc": hdc_centrality,
}


def compute_measures(
    graph: Hypergraph, names, prox: ProximityMatrix | None = None
) -> dict[str, CentralityVector]:
    """Evaluate a set of centrality measures by name."""
    from .proximity import proximity_matrix

    out: dict[str, CentralityVector] = {}
    for name in names:
        if name == "hra":
            out[name] = hra_centrality(prox if prox is not None else proximity_matrix(graph))
        elif name in MEASURES:
            out[name] = MEASURES[name](graph)
        else:
            raise ValueError(f"unknown centrality measure {name!r}")
    return out
