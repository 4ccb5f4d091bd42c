"""Hypergraph representation, validation, and dataset I/O.

The canonical on-disk format is UTF-8 text with one hyperedge per line,
node ids separated by whitespace (or commas). Loaders transparently read
gzip-compressed files. A converter for the triple-file simplicial layout
(``*-nverts.txt`` / ``*-simplices.txt`` / ``*-times.txt``) is provided for
the public dataset releases.
"""

from __future__ import annotations

import gzip
import hashlib
import io
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _bipartite_components

log = logging.getLogger(__name__)


class DatasetError(ValueError):
    """Raised for malformed or inconsistent input files."""


def _open_text(path):
    path = Path(path)
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def _split_line(line: str) -> list[str]:
    return [tok for tok in re.split(r"[,\s]+", line.strip()) if tok]


@dataclass(frozen=True)
class Hypergraph:
    """Immutable sparse incidence structure.

    Nodes are dense indices ``0..n_nodes-1``; the original identifiers are
    kept in ``node_ids`` for reporting. ``incidence`` is a binary CSR matrix
    of shape (n_nodes, n_edges); a CSC copy is kept for column access.
    """

    incidence: sp.csr_matrix
    node_ids: tuple = ()
    _csc: sp.csc_matrix = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        inc = sp.csr_matrix(self.incidence, dtype=np.float64)
        inc.sum_duplicates()
        inc.eliminate_zeros()
        if inc.nnz and not np.all(inc.data == 1.0):
            raise DatasetError("incidence entries must be exactly 0 or 1")
        inc.sort_indices()
        object.__setattr__(self, "incidence", inc)
        object.__setattr__(self, "_csc", inc.tocsc())
        if not self.node_ids:
            object.__setattr__(self, "node_ids", tuple(range(inc.shape[0])))

    @classmethod
    def from_hyperedges(
        cls,
        hyperedges: Sequence[Sequence[int]],
        n_nodes: int | None = None,
        node_ids: Sequence | None = None,
        allow_isolated: bool = False,
    ) -> "Hypergraph":
        """Build from a list of hyperedges given as dense node indices."""
        if not hyperedges:
            raise DatasetError("hypergraph has no hyperedges")
        rows, cols = [], []
        for a, edge in enumerate(hyperedges):
            members = list(edge)
            if len(set(members)) != len(members):
                raise DatasetError(f"duplicate node within hyperedge {a}")
            if len(members) < 2:
                raise DatasetError(f"hyperedge {a} has order < 2")
            rows.extend(members)
            cols.extend([a] * len(members))
        n = n_nodes if n_nodes is not None else max(rows) + 1
        inc = sp.csr_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(n, len(hyperedges))
        )
        graph = cls(inc, tuple(node_ids) if node_ids is not None else ())
        if not allow_isolated and np.any(graph.degrees == 0):
            raise DatasetError("hypergraph contains isolated nodes")
        return graph

    @property
    def n_nodes(self) -> int:
        return self.incidence.shape[0]

    @property
    def n_edges(self) -> int:
        return self.incidence.shape[1]

    @property
    def degrees(self) -> np.ndarray:
        """Number of hyperedges containing each node."""
        return np.asarray(self.incidence.sum(axis=1)).ravel().astype(np.int64)

    @property
    def orders(self) -> np.ndarray:
        """Number of nodes in each hyperedge."""
        return np.asarray(self.incidence.sum(axis=0)).ravel().astype(np.int64)

    @property
    def incidence_csc(self) -> sp.csc_matrix:
        return self._csc

    def hyperedge(self, a: int) -> np.ndarray:
        """Node indices of hyperedge ``a``, ascending."""
        col = self._csc
        return col.indices[col.indptr[a] : col.indptr[a + 1]].astype(np.int64)

    def hyperedges(self) -> list[tuple[int, ...]]:
        return [tuple(self.hyperedge(a)) for a in range(self.n_edges)]

    def restrict_to_hyperedges(self, keep: np.ndarray) -> "Hypergraph":
        """Column-subset view keeping all nodes (degrees may drop to zero).

        Used by cross-validation harnesses; the result intentionally skips
        the isolated-node check.
        """
        keep = np.asarray(keep)
        if keep.dtype == bool:
            keep = np.flatnonzero(keep)
        inc = self._csc[:, keep].tocsr()
        return Hypergraph(inc, self.node_ids)

    def content_hash(self) -> str:
        """Stable hash of the canonical hyperedge list."""
        h = hashlib.sha256()
        for edge in self.hyperedges():
            h.update(" ".join(map(str, edge)).encode())
            h.update(b"\n")
        return h.hexdigest()

    def statistics(self) -> dict:
        d, k = self.degrees, self.orders
        return {
            "n_nodes": self.n_nodes,
            "n_edges": self.n_edges,
            "mean_degree": float(d.mean()),
            "mean_order": float(k.mean()),
        }


@dataclass(frozen=True)
class CommunityLabels:
    """Ground-truth community assignment, ids re-indexed to 0..n_communities-1."""

    labels: np.ndarray
    n_communities: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        present = np.unique(labels)
        if not np.array_equal(present, np.arange(self.n_communities)):
            raise DatasetError("community ids must cover 0..n_communities-1")


def parse_hyperedge_lines(
    lines: Iterable[str], dedupe: bool = False, dedupe_within_line: bool = False
):
    """Parse text lines into (hyperedges, node_ids) with dense indices."""
    index: dict[str, int] = {}
    hyperedges: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    any_line = False
    for lineno, raw in enumerate(lines, start=1):
        tokens = _split_line(raw)
        if not tokens:
            continue
        any_line = True
        if dedupe_within_line:
            tokens = list(dict.fromkeys(tokens))
        elif len(set(tokens)) != len(tokens):
            raise DatasetError(f"line {lineno}: duplicated node id within hyperedge")
        if len(tokens) < 2:
            log.warning("line %d: hyperedge of order < 2 dropped", lineno)
            continue
        members = tuple(index.setdefault(tok, len(index)) for tok in tokens)
        key = tuple(sorted(members))
        if dedupe:
            if key in seen:
                continue
            seen.add(key)
        hyperedges.append(members)
    if not any_line:
        raise DatasetError("empty hyperedge file")
    if not hyperedges:
        raise DatasetError("no hyperedge of order >= 2 in file")
    # nodes that only appeared on dropped lines never entered `index`, and
    # with dedupe some indices may be unused: compact them away
    used = sorted({i for edge in hyperedges for i in edge})
    if len(used) != len(index):
        remap = {old: new for new, old in enumerate(used)}
        hyperedges = [tuple(remap[i] for i in edge) for edge in hyperedges]
        inv = {v: k for k, v in index.items()}
        node_ids = tuple(inv[old] for old in used)
        log.warning("dropped %d isolated node(s)", len(index) - len(used))
    else:
        node_ids = tuple(index.keys())
    return hyperedges, node_ids


def load_hyperedge_list(
    path, dedupe: bool = False, dedupe_within_line: bool = False
) -> Hypergraph:
    """Load the canonical hyperedge-list text format (optionally gzipped)."""
    with _open_text(path) as fh:
        hyperedges, node_ids = parse_hyperedge_lines(
            fh, dedupe=dedupe, dedupe_within_line=dedupe_within_line
        )
    return Hypergraph.from_hyperedges(
        hyperedges, n_nodes=len(node_ids), node_ids=node_ids
    )


def write_hyperedge_list(graph: Hypergraph, path) -> None:
    """Write the canonical format using the original node identifiers."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "wt", encoding="utf-8") as fh:
        for edge in graph.hyperedges():
            fh.write(" ".join(str(graph.node_ids[i]) for i in edge))
            fh.write("\n")


def load_simplicial_triple(nverts_path, simplices_path) -> list[list[str]]:
    """Read the nverts/simplices pair used by public simplicial releases.

    ``nverts`` holds one integer per simplex (its size); ``simplices`` holds
    the concatenated vertex ids, one per line. The companion timestamp file
    is not needed to recover hyperedges and is ignored.
    """
    with _open_text(nverts_path) as fh:
        sizes = [int(tok) for line in fh for tok in _split_line(line)]
    with _open_text(simplices_path) as fh:
        flat = [tok for line in fh for tok in _split_line(line)]
    if sum(sizes) != len(flat):
        raise DatasetError(
            f"simplices file has {len(flat)} vertices, nverts sums to {sum(sizes)}"
        )
    out, pos = [], 0
    for size in sizes:
        out.append(flat[pos : pos + size])
        pos += size
    return out


def load_labels(path, graph: Hypergraph) -> CommunityLabels:
    """Load "node_id label" pairs covering every node of ``graph``."""
    id_to_index = {str(nid): i for i, nid in enumerate(graph.node_ids)}
    raw = np.full(graph.n_nodes, -1, dtype=np.int64)
    label_index: dict[str, int] = {}
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = _split_line(line)
            if not tokens:
                continue
            if len(tokens) != 2:
                raise DatasetError(f"line {lineno}: expected 'node_id label'")
            node_tok, label_tok = tokens
            if node_tok not in id_to_index:
                raise DatasetError(f"line {lineno}: unknown node id {node_tok!r}")
            raw[id_to_index[node_tok]] = label_index.setdefault(
                label_tok, len(label_index)
            )
    missing = np.flatnonzero(raw < 0)
    if missing.size:
        raise DatasetError(
            f"missing node: no label for {graph.node_ids[missing[0]]!r}"
            + (f" (+{missing.size - 1} more)" if missing.size > 1 else "")
        )
    return CommunityLabels(raw, len(label_index))


def clique_adjacency(graph: Hypergraph) -> sp.csr_matrix:
    """Co-membership count matrix M.M^T with the diagonal removed.

    Entry (i, j) counts the hyperedges containing both nodes; the diagonal
    of M.M^T equals the degree vector, so subtracting it leaves an exact
    zero diagonal.
    """
    m = graph.incidence
    a = (m @ m.T).tolil()
    a.setdiag(0)
    a = a.tocsr()
    a.eliminate_zeros()
    return a


def weighted_adjacency(graph: Hypergraph, kind: str = "order") -> sp.csr_matrix:
    """Order-weighted clique expansion.

    ``order``: each hyperedge contributes 1/k to each of its node pairs and
    diagonal entries. ``ndp``: weight 1/(k-1), the degree-preserving variant
    (row sums off-diagonal equal node degrees).
    """
    m = graph.incidence
    k = graph.orders.astype(np.float64)
    if kind == "order":
        w = 1.0 / k
    elif kind == "ndp":
        w = 1.0 / (k - 1.0)
    else:
        raise ValueError(f"unknown weighting {kind!r}")
    a = (m @ sp.diags(w) @ m.T).tocsr()
    a.sum_duplicates()
    return a


def connected_components(graph: Hypergraph) -> tuple[int, np.ndarray]:
    """Components of the bipartite node-hyperedge structure (node labels)."""
    n = graph.n_nodes
    bip = sp.bmat(
        [[None, graph.incidence], [graph.incidence.T, None]], format="csr"
    )
    _, labels = _bipartite_components(bip, directed=False)
    node_labels = labels[:n]
    # renumber so node components are 0..c-1 even if some component held
    # only hyperedges (impossible for valid graphs, but keep it tight)
    _, node_labels = np.unique(node_labels, return_inverse=True)
    return int(node_labels.max()) + 1, node_labels
