import os
from pathlib import Path

import numpy as np
import pytest

from hypermine.hypercore import Hypergraph


@pytest.fixture
def toy_graph():
    """Two overlapping pairs: e1={a,b}, e2={b,c}; d=(1,2,1), k=(2,2)."""
    return Hypergraph.from_hyperedges([(0, 1), (1, 2)], node_ids=("a", "b", "c"))


@pytest.fixture
def single_edge_graph():
    return Hypergraph.from_hyperedges([(0, 1)], node_ids=("a", "b"))


def random_hypergraph(rng, max_nodes=50, max_edges=80, min_nodes=4):
    """Random connected hypergraph covering every node.

    A chain of overlapping hyperedges over a node permutation guarantees
    connectivity and degree >= 1; extra hyperedges are uniform subsets.
    """
    n = int(rng.integers(min_nodes, max_nodes + 1))
    edges = []
    perm = rng.permutation(n)
    pos = 0
    while pos < n - 1:
        size = int(rng.integers(2, min(5, n) + 1))
        chunk = perm[pos : pos + size]
        edges.append(tuple(int(v) for v in chunk))
        pos += len(chunk) - 1
    m = max(len(edges), int(rng.integers(3, max_edges + 1)))
    while len(edges) < m:
        size = int(rng.integers(2, min(6, n) + 1))
        edges.append(tuple(int(v) for v in rng.choice(n, size=size, replace=False)))
    return Hypergraph.from_hyperedges(edges, n_nodes=n)


def well_mixed_hypergraph(rng, max_nodes=30):
    """Connected random hypergraph with small diameter (fast mixing).

    Connectivity comes from random recursive attachment (each node joins a
    dyad with a uniformly random earlier node), then random hyperedges are
    layered on top.
    """
    n = int(rng.integers(10, max_nodes + 1))
    edges = []
    for node in range(1, n):
        partner = int(rng.integers(node))
        edges.append((partner, node))
    for _ in range(2 * n):
        size = int(rng.integers(2, min(6, n) + 1))
        edges.append(tuple(int(v) for v in rng.choice(n, size=size, replace=False)))
    return Hypergraph.from_hyperedges(edges, n_nodes=n)


def two_block_hypergraph(rng, sizes=(9, 6), extra_edges=4):
    """Two node blocks with no cross-block hyperedges, plus truth labels.

    Each block carries one full-block hyperedge (keeping it tightly
    connected) and a few random internal hyperedges.
    """
    edges = []
    offset = 0
    labels = []
    for block, size in enumerate(sizes):
        nodes = np.arange(offset, offset + size)
        edges.append(tuple(int(v) for v in nodes))
        for _ in range(extra_edges):
            order = int(rng.integers(2, min(4, size) + 1))
            edges.append(tuple(int(v) for v in rng.choice(nodes, size=order, replace=False)))
        labels.extend([block] * size)
        offset += size
    graph = Hypergraph.from_hyperedges(edges, n_nodes=offset)
    return graph, np.asarray(labels)


def dataset_dir() -> Path:
    return Path(os.environ.get("HYPERMINE_DATA", Path(__file__).resolve().parents[1] / "data"))


def dataset_path(name: str):
    """Path of a converted public dataset, or None when absent."""
    base = dataset_dir()
    for candidate in (base / f"{name}.txt", base / f"{name}.txt.gz"):
        if candidate.exists():
            return candidate
    return None


def require_dataset(name: str):
    path = dataset_path(name)
    if path is None:
        pytest.skip(f"public dataset {name!r} not present under {dataset_dir()}")
    return path
