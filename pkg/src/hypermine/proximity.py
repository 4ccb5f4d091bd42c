"""Resource-allocation proximity: transition operator, proximity iterates,
stationary limit, and the node-node similarity matrix.

One allocation round splits each node's resource equally over its
hyperedges, then each hyperedge's resource equally over its nodes. The
round is the column-stochastic operator ``T = (M K^-1)(M^T D^-1)``; applied
to the incidence matrix it yields the continuous-valued proximity matrix
``P = T M`` whose columns conserve the hyperedge orders.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .hypercore import Hypergraph
from .linalg import canonicalize

log = logging.getLogger(__name__)


def _safe_reciprocal(values: np.ndarray) -> np.ndarray:
    """1/x with 0 mapped to 0 (zero-degree rows contribute nothing)."""
    out = np.zeros(len(values), dtype=np.float64)
    nz = values > 0
    out[nz] = 1.0 / values[nz]
    return out


@dataclass(frozen=True)
class ProximityMatrix:
    """Sparse nonnegative node-by-hyperedge matrix; iterate ``t=0`` is the
    incidence itself."""

    values: sp.csr_matrix
    t: int

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.values.sum(axis=1)).ravel()

    def column_sums(self) -> np.ndarray:
        return np.asarray(self.values.sum(axis=0)).ravel()


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric nonnegative node-by-node matrix with zero diagonal."""

    values: sp.csr_matrix


def transition_matrix(graph: Hypergraph) -> sp.csr_matrix:
    """Explicit allocation operator; columns of positive-degree nodes sum to 1.

    Mostly for tests and small graphs: pipelines use the factored form to
    avoid densification.
    """
    left, right = _transition_factors(graph)
    return canonicalize(left @ right)


def _transition_factors(graph: Hypergraph):
    """(M K^-1, M^T D^-1) as sparse factors."""
    m = graph.incidence
    inv_k = _safe_reciprocal(graph.orders.astype(np.float64))
    inv_d = _safe_reciprocal(graph.degrees.astype(np.float64))
    return m @ sp.diags(inv_k), m.T @ sp.diags(inv_d)


def proximity_matrix(graph: Hypergraph, t: int = 1) -> ProximityMatrix:
    """Apply ``t`` allocation rounds to the incidence matrix."""
    if t < 1:
        raise ValueError("t must be >= 1; use incidence_proximity for t=0")
    left, right = _transition_factors(graph)
    p = graph.incidence
    for _ in range(t):
        p = left @ (right @ p)
    return ProximityMatrix(canonicalize(p), t)


def incidence_proximity(graph: Hypergraph) -> ProximityMatrix:
    """The binary incidence cast to a proximity iterate (t=0)."""
    return ProximityMatrix(canonicalize(graph.incidence), 0)


def ablation_source(graph: Hypergraph, source: str = "P", t: int = 1) -> ProximityMatrix:
    """Select the matrix feeding a downstream pipeline: allocated (``P``)
    or raw incidence (``M``)."""
    if source == "P":
        return proximity_matrix(graph, t=t)
    if source == "M":
        return incidence_proximity(graph)
    raise ValueError(f"unknown source {source!r} (expected 'P' or 'M')")


def stationary_proximity(graph: Hypergraph) -> np.ndarray:
    """Closed-form allocation fixed point ``d_i * k_a / sum(d)`` (dense).

    Exact for connected hypergraphs; with several components it holds per
    component only, so this global form is exposed for convergence testing
    on connected inputs.
    """
    d = graph.degrees.astype(np.float64)
    k = graph.orders.astype(np.float64)
    return np.outer(d, k) / d.sum()


def similarity_matrix(
    prox: ProximityMatrix, graph: Hypergraph, floor: float = 0.0
) -> SimilarityMatrix:
    """Degree-normalized row inner products of the proximity matrix.

    ``S_ij = sum_a P_ia P_ja / sqrt(d_i d_j)`` for ``i != j``, zero on the
    diagonal. Rows of zero-degree nodes are zero by convention (their count
    is logged; this arises only for cross-validation training views).
    ``floor`` optionally prunes entries below a threshold to bound memory on
    large hypergraphs; the default keeps everything.
    """
    if prox.values.shape != graph.incidence.shape:
        raise ValueError("proximity and graph dimensions disagree")
    d = graph.degrees.astype(np.float64)
    zero_rows = int(np.count_nonzero(d == 0))
    if zero_rows:
        log.info("similarity: %d zero-degree node(s) get zero rows", zero_rows)
    scale = sp.diags(np.sqrt(_safe_reciprocal(d)))
    p = prox.values
    s = (scale @ (p @ p.T) @ scale).tolil()
    s.setdiag(0.0)
    s = canonicalize(s)
    if floor > 0.0:
        s.data[s.data < floor] = 0.0
        s.eliminate_zeros()
    # symmetric by construction up to float noise; enforce exactly
    s = (s + s.T) * 0.5
    return SimilarityMatrix(canonicalize(s))


def export_coordinates(matrix, path) -> None:
    """Write a sparse matrix as "row col value" text for external checks."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# shape {coo.shape[0]} {coo.shape[1]}\n")
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{int(r)} {int(c)} {float(v)!r}\n")
