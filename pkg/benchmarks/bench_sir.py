#!/usr/bin/env python3
"""Benchmark: compiled spreading kernel vs the pure-numpy fallback.

Runs the influence estimator on synthetic hypergraphs of growing size with
both backends, prints the timings and speedup, and asserts the outputs are
bitwise identical (the backends share one random-stream contract).

Usage: python benchmarks/bench_sir.py [--runs 50] [--sizes 50,150,400]
"""

import argparse
import time

import numpy as np

from hypermine._kernels import available_backends
from hypermine.hypercore import Hypergraph
from hypermine.spreading import SirConfig, node_influence_samples


def synthetic_graph(n: int, seed: int = 0) -> Hypergraph:
    rng = np.random.default_rng(seed)
    edges = [(int(rng.integers(node)), node) for node in range(1, n)]
    for _ in range(2 * n):
        size = int(rng.integers(2, 6))
        edges.append(tuple(int(v) for v in rng.choice(n, size=size, replace=False)))
    return Hypergraph.from_hyperedges(edges, n_nodes=n)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=50, help="runs per seed node")
    parser.add_argument("--sizes", default="50,150,400", help="comma list of node counts")
    parser.add_argument("--beta", type=float, default=0.05)
    args = parser.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; only the python backend is available")
        return

    sizes = [int(tok) for tok in args.sizes.split(",")]
    print(f"{'n':>6} {'edges':>7} {'python':>10} {'cython':>10} {'speedup':>8}  identical")
    for n in sizes:
        graph = synthetic_graph(n)
        config = SirConfig(beta=args.beta, gamma=0.25, kappa=1.25, runs=args.runs, seed=1)
        timings = {}
        samples = {}
        for backend in ("python", "cython"):
            start = time.perf_counter()
            samples[backend] = node_influence_samples(graph, config, backend=backend)
            timings[backend] = time.perf_counter() - start
        identical = bool(np.array_equal(samples["python"], samples["cython"]))
        print(
            f"{n:>6} {graph.n_edges:>7} {timings['python']:>9.2f}s "
            f"{timings['cython']:>9.2f}s {timings['python'] / timings['cython']:>7.1f}x  {identical}"
        )
        if not identical:
            raise SystemExit("backend outputs diverged; random-stream contract broken")


if __name__ == "__main__":
    main()
