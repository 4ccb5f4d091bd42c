"""Command-line front end.

Exit codes: 0 success, 2 invalid configuration, 3 dataset error,
4 numerical non-convergence. ``HYPERMINE_THREADS`` caps the worker pool.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .experiments import (
    ConfigError,
    ExperimentConfig,
    parse_seed_range,
    run,
    verify_run,
)
from .hypercore import (
    DatasetError,
    Hypergraph,
    load_hyperedge_list,
    load_simplicial_triple,
    parse_hyperedge_lines,
    write_hyperedge_list,
)
from .linalg import ConvergenceError

EXIT_CONFIG = 2
EXIT_DATASET = 3
EXIT_NUMERIC = 4


def _fail(message: str, code: int):
    click.echo(message, err=True)
    raise SystemExit(code)


def _execute(config: ExperimentConfig) -> None:
    try:
        record = run(config)
    except ConfigError as exc:
        _fail(f"error: {exc}", EXIT_CONFIG)
    except (DatasetError, FileNotFoundError) as exc:
        _fail(f"dataset error: {exc}", EXIT_DATASET)
    except ConvergenceError as exc:
        _fail(f"numerical error: {exc}", EXIT_NUMERIC)
    for name, stats in sorted(record.aggregates.items()):
        click.echo(f"{name}: {stats}")
    click.echo(f"wrote {Path(config.out).with_suffix('.json')} and .csv")


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    """Hypergraph mining toolkit: proximity-matrix pipelines and benchmarks."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--input", "input_path", required=True, help="Input file or triple-file prefix.")
@click.option(
    "--layout",
    type=click.Choice(["auto", "list", "simplicial"]),
    default="auto",
    show_default=True,
    help="Input layout; 'simplicial' expects <prefix>-nverts.txt and <prefix>-simplices.txt.",
)
@click.option("--dedupe", is_flag=True, help="Collapse repeated identical hyperedges.")
@click.option(
    "--dedupe-within-line", is_flag=True, help="Drop repeated nodes inside one hyperedge."
)
@click.option("--out", required=True, help="Canonical hyperedge list to write.")
def convert(input_path, layout, dedupe, dedupe_within_line, out):
    """Convert a dataset to the canonical hyperedge-list format."""
    try:
        if layout == "auto":
            layout = "simplicial" if _find_triple(input_path) else "list"
        if layout == "simplicial":
            nverts, simplices = _find_triple(input_path) or (None, None)
            if nverts is None:
                raise DatasetError(f"no {input_path}-nverts.txt / -simplices.txt found")
            raw = load_simplicial_triple(nverts, simplices)
            lines = (" ".join(edge) for edge in raw)
        else:
            if not Path(input_path).exists():
                raise DatasetError(f"input not found: {input_path}")
            lines = Path(input_path).read_text(encoding="utf-8").splitlines()
        hyperedges, node_ids = parse_hyperedge_lines(
            lines, dedupe=dedupe, dedupe_within_line=dedupe_within_line
        )
        graph = Hypergraph.from_hyperedges(
            hyperedges, n_nodes=len(node_ids), node_ids=node_ids
        )
        write_hyperedge_list(graph, out)
    except DatasetError as exc:
        click.echo(f"dataset error: {exc}", err=True)
        raise SystemExit(EXIT_DATASET)
    stats = graph.statistics()
    click.echo(
        "N={n_nodes} M={n_edges} mean_degree={mean_degree:.2f} "
        "mean_order={mean_order:.2f}".format(**stats)
    )
    click.echo(f"dedupe={'on' if dedupe else 'off'} -> {out}")


def _find_triple(prefix: str):
    for suffix in (".txt", ".txt.gz"):
        nverts = Path(f"{prefix}-nverts{suffix}")
        simplices = Path(f"{prefix}-simplices{suffix}")
        if nverts.exists() and simplices.exists():
            return nverts, simplices
    return None


def _seed_options(fn):
    fn = click.option("--seed", default=None, type=int, help="Single master seed.")(fn)
    fn = click.option(
        "--seeds", default=None, help="Seed range like 0..9 or list like 0,3,7."
    )(fn)
    return fn


def _resolve_seeds(seed, seeds, default=(0,)):
    if seed is not None and seeds is not None:
        raise click.UsageError("give either --seed or --seeds, not both")
    if seeds is not None:
        return parse_seed_range(seeds)
    if seed is not None:
        return [seed]
    return list(default)


@main.command()
@click.option("--data", required=True, help="Canonical hyperedge list.")
@click.option("--algo", default="hra", show_default=True, help="Comma list of hra,cn,hpra,katz.")
@click.option("--rho", default=0.5, show_default=True, type=float)
@click.option("--folds", default=5, show_default=True, type=int)
@_seed_options
@click.option("--source", type=click.Choice(["P", "M"]), default="P", show_default=True)
@click.option("--t", default=1, show_default=True, type=int, help="Allocation rounds.")
@click.option("--negative-ratio", default=1, show_default=True, type=int,
              help="Negatives per positive hyperedge.")
@click.option("--similarity-floor", default=0.0, show_default=True, type=float,
              help="Prune similarity entries below this value.")
@click.option("--dedupe", is_flag=True)
@click.option("--out", required=True)
def linkpred(data, algo, rho, folds, seed, seeds, source, t, negative_ratio,
             similarity_floor, dedupe, out):
    """Cross-validated hyperedge prediction."""
    config = ExperimentConfig(
        task="linkpred",
        data=data,
        out=out,
        algorithms=[a.strip() for a in algo.split(",") if a.strip()],
        rho=rho,
        folds=folds,
        seeds=_resolve_seeds(seed, seeds, default=(42,)),
        source=source,
        t=t,
        negative_ratio=negative_ratio,
        similarity_floor=similarity_floor,
        dedupe=dedupe,
    )
    _execute(config)


@main.command()
@click.option("--data", required=True)
@click.option("--labels", required=True, help="Ground-truth 'node_id label' file.")
@click.option("--algo", default="hra", show_default=True, help="Comma list of hra,hsc,nmf,ndp.")
@click.option("--nc", default=None, type=int, help="Cluster count (default: from labels).")
@_seed_options
@click.option("--source", type=click.Choice(["P", "M"]), default="P", show_default=True)
@click.option("--t", default=1, show_default=True, type=int)
@click.option("--similarity-floor", default=0.0, show_default=True, type=float)
@click.option("--row-normalize", is_flag=True,
              help="Normalize the Laplacian by similarity row sums instead of degrees.")
@click.option("--dedupe", is_flag=True)
@click.option("--no-assignments", is_flag=True, help="Skip per-seed assignment files.")
@click.option("--out", required=True)
def community(data, labels, algo, nc, seed, seeds, source, t, similarity_floor,
              row_normalize, dedupe, no_assignments, out):
    """Community detection against ground-truth labels."""
    config = ExperimentConfig(
        task="community",
        data=data,
        out=out,
        labels=labels,
        algorithms=[a.strip() for a in algo.split(",") if a.strip()],
        n_c=nc,
        seeds=_resolve_seeds(seed, seeds),
        source=source,
        t=t,
        similarity_floor=similarity_floor,
        degree_norm=not row_normalize,
        dedupe=dedupe,
        write_assignments=not no_assignments,
    )
    _execute(config)


@main.command()
@click.option("--data", required=True)
@click.option(
    "--measures",
    default="hra,hec,katz,nb,shc,hdc",
    show_default=True,
    help="Comma list of centrality measures.",
)
@click.option("--source", type=click.Choice(["P", "M"]), default="P", show_default=True)
@click.option("--t", default=1, show_default=True, type=int)
@click.option("--dedupe", is_flag=True)
@click.option("--out", required=True)
def vital(data, measures, source, t, dedupe, out):
    """Node centrality table."""
    config = ExperimentConfig(
        task="vital",
        data=data,
        out=out,
        measures=[m.strip() for m in measures.split(",") if m.strip()],
        source=source,
        t=t,
        dedupe=dedupe,
    )
    _execute(config)


@main.command()
@click.option("--data", required=True)
@click.option("--beta-grid", default="0.001:0.2:40", show_default=True, help="start:stop:count.")
@click.option("--kappa", default=1.25, show_default=True, type=float)
@click.option("--gamma", default=0.25, show_default=True, type=float)
@click.option("--runs", default=2000, show_default=True, type=int, help="Ensemble runs per point.")
@_seed_options
@click.option("--dedupe", is_flag=True)
@click.option("--out", required=True)
def sir(data, beta_grid, kappa, gamma, runs, seed, seeds, dedupe, out):
    """Susceptibility sweep: locate the spreading threshold."""
    config = ExperimentConfig(
        task="sir",
        data=data,
        out=out,
        beta_grid=beta_grid,
        kappa=kappa,
        gamma=gamma,
        ensemble_runs=runs,
        seeds=_resolve_seeds(seed, seeds, default=(7,)),
        dedupe=dedupe,
    )
    _execute(config)


@main.command("vital-eval")
@click.option("--data", required=True)
@click.option(
    "--beta",
    default="rel:1.0",
    show_default=True,
    help="abs:X, plain number, rel:X, or rel:A..B:K (multiples of the cached threshold).",
)
@click.option(
    "--measures", default="hra,hec,katz,nb,shc,hdc", show_default=True
)
@click.option("--kappa", default=1.25, show_default=True, type=float)
@click.option("--gamma", default=0.25, show_default=True, type=float)
@click.option("--runs", default=100, show_default=True, type=int, help="Runs per seed node.")
@click.option("--ensemble-runs", default=2000, show_default=True, type=int)
@click.option("--beta-grid", default="0.001:0.2:40", show_default=True)
@click.option("--batches", default=10, show_default=True, type=int)
@_seed_options
@click.option("--dedupe", is_flag=True)
@click.option("--out", required=True)
def vital_eval(
    data, beta, measures, kappa, gamma, runs, ensemble_runs, beta_grid, batches,
    seed, seeds, dedupe, out,
):
    """Rank-correlate centralities against simulated influence."""
    config = ExperimentConfig(
        task="vital-eval",
        data=data,
        out=out,
        measures=[m.strip() for m in measures.split(",") if m.strip()],
        beta=beta,
        beta_grid=beta_grid,
        kappa=kappa,
        gamma=gamma,
        runs=runs,
        ensemble_runs=ensemble_runs,
        batches=batches,
        seeds=_resolve_seeds(seed, seeds, default=(7,)),
        dedupe=dedupe,
    )
    _execute(config)


@main.command()
@click.option("--data", required=True)
@click.option(
    "--task",
    "ablation_task",
    type=click.Choice(["linkpred", "community", "vital"]),
    default="linkpred",
    show_default=True,
)
@click.option("--labels", default=None)
@click.option("--rho", default=0.5, show_default=True, type=float)
@click.option("--folds", default=5, show_default=True, type=int)
@click.option("--nc", default=None, type=int)
@click.option("--beta", default="rel:1.0", show_default=True)
@click.option("--kappa", default=1.25, show_default=True, type=float)
@click.option("--gamma", default=0.25, show_default=True, type=float)
@click.option("--runs", default=100, show_default=True, type=int)
@click.option("--t", default=1, show_default=True, type=int)
@_seed_options
@click.option("--dedupe", is_flag=True)
@click.option("--out", required=True)
def ablation(
    data, ablation_task, labels, rho, folds, nc, beta, kappa, gamma, runs, t,
    seed, seeds, dedupe, out,
):
    """Paired comparison of allocation-based vs raw-incidence pipelines."""
    config = ExperimentConfig(
        task="ablation",
        data=data,
        out=out,
        ablation_task=ablation_task,
        labels=labels,
        rho=rho,
        folds=folds,
        n_c=nc,
        beta=beta,
        kappa=kappa,
        gamma=gamma,
        runs=runs,
        t=t,
        seeds=_resolve_seeds(seed, seeds, default=(42,)),
        dedupe=dedupe,
    )
    _execute(config)


@main.command()
@click.argument("result_json", type=click.Path(exists=True))
def verify(result_json):
    """Re-check a persisted run (dataset hash, config snapshot)."""
    problems = verify_run(result_json)
    if problems:
        for problem in problems:
            click.echo(f"FAIL: {problem}", err=True)
        raise SystemExit(1)
    click.echo("ok")


if __name__ == "__main__":
    sys.exit(main())
