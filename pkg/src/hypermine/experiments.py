"""Batch experiment runner behind the CLI.

An ``ExperimentConfig`` captures one task invocation; ``run`` executes it,
writes ``<out stem>.json`` (full record) plus ``<out stem>.csv`` (headline
numbers) and returns the in-memory record. Identical configs reproduce
identical files for any worker count.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import community as community_mod
from . import linkpred as linkpred_mod
from . import spreading as spreading_mod
from . import vitality as vitality_mod
from .hypercore import Hypergraph, load_hyperedge_list, load_labels
from .proximity import ablation_source, proximity_matrix, similarity_matrix
from .results import Checkpoint, EvaluationRun, file_sha256, write_csv

log = logging.getLogger(__name__)

TASKS = ("linkpred", "community", "vital", "sir", "vital-eval", "ablation")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    task: str
    data: str
    out: str
    labels: str | None = None
    algorithms: list = field(default_factory=lambda: ["hra"])
    measures: list = field(default_factory=lambda: ["hra", "hec", "katz", "nb", "shc", "hdc"])
    seeds: list = field(default_factory=lambda: [0])
    rho: float = 0.5
    folds: int = 5
    n_c: int | None = None
    t: int = 1
    source: str = "P"
    beta: str = "rel:1.0"
    beta_grid: str = "0.001:0.2:40"
    gamma: float = 0.25
    kappa: float = 1.25
    runs: int = 100
    ensemble_runs: int = 2000
    batches: int = 10
    negative_ratio: int = 1
    similarity_floor: float = 0.0
    degree_norm: bool = True
    dedupe: bool = False
    ablation_task: str = "linkpred"
    write_assignments: bool = True

    def validate(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}")
        if not 0.0 <= self.rho < 1.0:
            raise ConfigError("rho must be in [0, 1)")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.t < 1:
            raise ConfigError("t must be >= 1")
        if self.source not in ("P", "M"):
            raise ConfigError("source must be 'P' or 'M'")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError("gamma must be in (0, 1]")
        if self.kappa <= 0:
            raise ConfigError("kappa must be > 0")
        if self.runs < 1 or self.ensemble_runs < 1:
            raise ConfigError("run counts must be >= 1")
        if self.negative_ratio < 1:
            raise ConfigError("negative_ratio must be >= 1")
        if self.similarity_floor < 0:
            raise ConfigError("similarity_floor must be >= 0")
        if not self.seeds:
            raise ConfigError("at least one seed required")
        if self.task == "community" and not self.labels:
            raise ConfigError("community task requires --labels")
        if self.task == "ablation" and self.ablation_task not in (
            "linkpred",
            "community",
            "vital",
        ):
            raise ConfigError(f"unknown ablation task {self.ablation_task!r}")

    def snapshot(self) -> dict:
        return asdict(self)

    @classmethod
    def from_snapshot(cls, payload: dict) -> "ExperimentConfig":
        return cls(**payload)


def parse_seed_range(text: str) -> list[int]:
    """"0..9" -> [0, 1, ..., 9]; "3" -> [3]; "1,4,7" -> [1, 4, 7]."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    if "," in text:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    return [int(text)]


def parse_beta_grid(text: str) -> np.ndarray:
    """"start:stop:count" -> linear grid."""
    try:
        start, stop, count = text.split(":")
        grid = np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise ConfigError(f"bad beta grid {text!r} (want start:stop:count)") from exc
    return grid


def parse_beta_spec(text: str) -> tuple[str, np.ndarray]:
    """Infectivity spec: "abs:X" or plain number for absolute values,
    "rel:X" or "rel:A..B:K" for multiples of the estimated threshold."""
    text = str(text).strip()
    try:
        if text.startswith("rel:"):
            body = text[4:]
            if ".." in body:
                span, count = body.rsplit(":", 1)
                lo, hi = span.split("..")
                return "rel", np.linspace(float(lo), float(hi), int(count))
            return "rel", np.asarray([float(body)])
        if text.startswith("abs:"):
            return "abs", np.asarray([float(text[4:])])
        return "abs", np.asarray([float(text)])
    except ValueError as exc:
        raise ConfigError(f"bad beta spec {text!r}") from exc


def _out_paths(out: str) -> tuple[Path, Path]:
    stem = Path(out)
    if stem.suffix in (".json", ".csv"):
        stem = stem.with_suffix("")
    return stem.with_suffix(".json"), stem.with_suffix(".csv")


def threshold_cache_path(data_path: str) -> Path:
    return Path(str(data_path) + ".betac.json")


def resolve_threshold(
    graph: Hypergraph, config: ExperimentConfig, dataset_hash: str
) -> float:
    """Cached susceptibility-peak threshold for the dataset + SIR params."""
    cache_key = {
        "dataset_hash": dataset_hash,
        "gamma": config.gamma,
        "kappa": config.kappa,
        "beta_grid": config.beta_grid,
        "ensemble_runs": config.ensemble_runs,
        "seed": config.seeds[0],
    }
    cache_file = threshold_cache_path(config.data)
    if cache_file.exists():
        payload = json.loads(cache_file.read_text(encoding="utf-8"))
        if payload.get("key") == cache_key:
            return float(payload["beta_c"])
        log.info("threshold cache stale, re-estimating")
    template = spreading_mod.SirConfig(
        beta=0.0, gamma=config.gamma, kappa=config.kappa, seed=config.seeds[0]
    )
    estimate = spreading_mod.estimate_threshold(
        graph,
        template,
        parse_beta_grid(config.beta_grid),
        ensemble_runs=config.ensemble_runs,
    )
    cache_file.write_text(
        json.dumps({"key": cache_key, "beta_c": estimate.beta_c}, indent=2) + "\n",
        encoding="utf-8",
    )
    return estimate.beta_c


def _run_linkpred(graph: Hypergraph, config: ExperimentConfig):
    units, rows = [], []
    for algorithm in config.algorithms:
        for seed in config.seeds:
            result = linkpred_mod.run_linkpred_experiment(
                graph,
                algorithm=algorithm,
                rho=config.rho,
                folds=config.folds,
                seed=seed,
                source=config.source,
                t=config.t,
                negative_ratio=config.negative_ratio,
                similarity_floor=config.similarity_floor,
            )
            for fold_result in result["per_fold"]:
                units.append({"algorithm": algorithm, "seed": seed, **fold_result})
            rows.append(
                [algorithm, config.source, config.rho, seed, result["auc_mean"], result["ndcg_mean"]]
            )
    aggregates = {}
    for algorithm in config.algorithms:
        aucs = [u["auc"] for u in units if u["algorithm"] == algorithm]
        ndcgs = [u["ndcg"] for u in units if u["algorithm"] == algorithm]
        aggregates[algorithm] = {
            "auc_mean": float(np.mean(aucs)),
            "ndcg_mean": float(np.mean(ndcgs)),
        }
        rows.append([algorithm, config.source, config.rho, "all", *aggregates[algorithm].values()])
    header = ["algorithm", "source", "rho", "seed", "auc", "ndcg"]
    return units, aggregates, header, rows


def _community_partition(graph, labels, algorithm, n_c, seed, sim_cache, config):
    if algorithm == "hra":
        if "sim" not in sim_cache:
            prox = ablation_source(graph, config.source, t=config.t)
            sim_cache["sim"] = similarity_matrix(
                prox, graph, floor=config.similarity_floor
            )
        return community_mod.hra_cd_partition(
            graph, sim_cache["sim"], n_c, seed, degree_norm=config.degree_norm
        )
    if algorithm == "hsc":
        return community_mod.hsc_partition(graph, n_c, seed)
    if algorithm == "nmf":
        return community_mod.nmf_partition(graph, n_c, seed=seed)
    if algorithm == "ndp":
        return community_mod.ndp_louvain_partition(graph, n_c, seed)
    raise ConfigError(f"unknown community algorithm {algorithm!r}")


def _run_community(graph: Hypergraph, config: ExperimentConfig, out_stem: Path):
    labels = load_labels(config.labels, graph)
    n_c = config.n_c or labels.n_communities
    units, rows = [], []
    sim_cache: dict = {}
    for algorithm in config.algorithms:
        precisions = []
        for seed in config.seeds:
            part = _community_partition(
                graph, labels, algorithm, n_c, seed, sim_cache, config
            )
            prec = community_mod.precision(part, labels)
            precisions.append(prec)
            units.append(
                {
                    "algorithm": algorithm,
                    "seed": seed,
                    "precision": prec,
                    "n_found": part.n_found,
                    "converged": part.converged,
                }
            )
            rows.append([algorithm, seed, prec])
            if config.write_assignments:
                path = out_stem.parent / f"{out_stem.name}.assign-{algorithm}-seed{seed}.txt"
                with open(path, "w", encoding="utf-8") as fh:
                    for node, cluster in zip(graph.node_ids, part.assignment):
                        fh.write(f"{node} {cluster}\n")
        rows.append([algorithm, "mean", float(np.mean(precisions))])
    aggregates = {
        algorithm: {
            "precision_mean": float(
                np.mean([u["precision"] for u in units if u["algorithm"] == algorithm])
            )
        }
        for algorithm in config.algorithms
    }
    header = ["algorithm", "seed", "precision"]
    return units, aggregates, header, rows


def _run_vital(graph: Hypergraph, config: ExperimentConfig):
    prox = ablation_source(graph, config.source, t=config.t)
    measures = vitality_mod.compute_measures(graph, config.measures, prox=prox)
    units = [
        {"measure": name, "values": vec.values.tolist(), "converged": vec.converged}
        for name, vec in measures.items()
    ]
    header = ["node_id", *config.measures]
    rows = [
        [graph.node_ids[i], *(measures[name].values[i] for name in config.measures)]
        for i in range(graph.n_nodes)
    ]
    return units, {}, header, rows


def _run_sir(graph: Hypergraph, config: ExperimentConfig, out_stem: Path):
    grid = parse_beta_grid(config.beta_grid)
    template = spreading_mod.SirConfig(
        beta=0.0, gamma=config.gamma, kappa=config.kappa, seed=config.seeds[0]
    )
    checkpoint = Checkpoint(out_stem.with_suffix(".partial.jsonl"))
    estimate = spreading_mod.estimate_threshold(
        graph,
        template,
        grid,
        ensemble_runs=config.ensemble_runs,
        checkpoint=checkpoint,
    )
    checkpoint.clear()
    units = [
        {"beta": float(b), "chi": float(c), "mean_size": float(m)}
        for b, c, m in zip(estimate.betas, estimate.chi, estimate.mean_size)
    ]
    aggregates = {
        "beta_c": estimate.beta_c,
        "no_threshold": estimate.no_threshold,
        "ensemble_runs": estimate.ensemble_runs,
    }
    header = ["beta", "chi", "mean_size"]
    rows = [[u["beta"], u["chi"], u["mean_size"]] for u in units]
    return units, aggregates, header, rows


def _run_vital_eval(graph: Hypergraph, config: ExperimentConfig, dataset_hash: str, out_stem: Path):
    mode, values = parse_beta_spec(config.beta)
    if mode == "rel":
        beta_c = resolve_threshold(graph, config, dataset_hash)
        betas = values * beta_c
        rel = values
    else:
        beta_c = None
        betas = values
        rel = [None] * len(values)
    prox = proximity_matrix(graph, t=config.t)
    measures = vitality_mod.compute_measures(graph, config.measures, prox=prox)
    checkpoint = Checkpoint(out_stem.with_suffix(".partial.jsonl"))
    units, rows = [], []
    for b_idx, beta in enumerate(betas):
        unit_key = f"beta:{b_idx}:{float(beta)!r}"
        cached = checkpoint.get(unit_key)
        if cached is not None and not all(name in cached for name in config.measures):
            cached = None  # measure list changed since the checkpoint
        if cached is None:
            sir = spreading_mod.SirConfig(
                beta=float(beta),
                gamma=config.gamma,
                kappa=config.kappa,
                runs=config.runs,
                seed=config.seeds[0],
            )
            samples = spreading_mod.node_influence_samples(graph, sir)
            cached = {}
            for name in config.measures:
                res = spreading_mod.tau_with_se(
                    measures[name].values, samples, batches=config.batches
                )
                cached[name] = {"tau": res.tau, "se": res.se}
            checkpoint.put(unit_key, cached)
        for name in config.measures:
            entry = {
                "measure": name,
                "beta": float(beta),
                "beta_rel": None if rel[b_idx] is None else float(rel[b_idx]),
                "tau": cached[name]["tau"],
                "se": cached[name]["se"],
            }
            units.append(entry)
            rows.append(
                [name, entry["beta"], "" if entry["beta_rel"] is None else entry["beta_rel"], entry["tau"], entry["se"]]
            )
    checkpoint.clear()
    aggregates = {"beta_c": beta_c}
    header = ["measure", "beta", "beta_rel", "tau", "se"]
    return units, aggregates, header, rows


def _run_ablation(graph: Hypergraph, config: ExperimentConfig, out_stem: Path):
    units, rows = [], []
    header = ["unit", "metric", "value_P", "value_M", "delta"]
    if config.ablation_task == "linkpred":
        for seed in config.seeds:
            paired = {}
            for source in ("P", "M"):
                paired[source] = linkpred_mod.run_linkpred_experiment(
                    graph,
                    algorithm="hra",
                    rho=config.rho,
                    folds=config.folds,
                    seed=seed,
                    source=source,
                    t=config.t,
                )
            for metric in ("auc_mean", "ndcg_mean"):
                vp, vm = paired["P"][metric], paired["M"][metric]
                units.append(
                    {"seed": seed, "metric": metric, "P": vp, "M": vm, "delta": vp - vm}
                )
                rows.append([f"seed={seed}", metric, vp, vm, vp - vm])
    elif config.ablation_task == "community":
        if not config.labels:
            raise ConfigError("community ablation requires --labels")
        labels = load_labels(config.labels, graph)
        n_c = config.n_c or labels.n_communities
        for seed in config.seeds:
            vals = {}
            for source in ("P", "M"):
                prox = ablation_source(graph, source, t=config.t)
                sim = similarity_matrix(prox, graph)
                part = community_mod.hra_cd_partition(graph, sim, n_c, seed)
                vals[source] = community_mod.precision(part, labels)
            units.append(
                {
                    "seed": seed,
                    "metric": "precision",
                    "P": vals["P"],
                    "M": vals["M"],
                    "delta": vals["P"] - vals["M"],
                }
            )
            rows.append([f"seed={seed}", "precision", vals["P"], vals["M"], vals["P"] - vals["M"]])
    else:  # vital
        mode, values = parse_beta_spec(config.beta)
        if mode == "rel":
            raise ConfigError("vital ablation needs an absolute beta (abs:X)")
        sir = spreading_mod.SirConfig(
            beta=float(values[0]),
            gamma=config.gamma,
            kappa=config.kappa,
            runs=config.runs,
            seed=config.seeds[0],
        )
        samples = spreading_mod.node_influence_samples(graph, sir)
        taus = {}
        for source in ("P", "M"):
            cent = vitality_mod.hra_centrality(ablation_source(graph, source, t=config.t))
            taus[source] = spreading_mod.tau_with_se(
                cent.values, samples, batches=config.batches
            ).tau
        units.append(
            {
                "metric": "tau",
                "beta": float(values[0]),
                "P": taus["P"],
                "M": taus["M"],
                "delta": taus["P"] - taus["M"],
            }
        )
        rows.append([f"beta={float(values[0])!r}", "tau", taus["P"], taus["M"], taus["P"] - taus["M"]])
    return units, {}, header, rows


def run(config: ExperimentConfig) -> EvaluationRun:
    """Execute one experiment and persist its JSON + CSV outputs."""
    config.validate()
    data_path = Path(config.data)
    if not data_path.exists():
        raise FileNotFoundError(f"dataset not found: {data_path}")
    graph = load_hyperedge_list(data_path, dedupe=config.dedupe)
    dataset_hash = file_sha256(data_path)
    json_path, csv_path = _out_paths(config.out)
    out_stem = json_path.with_suffix("")
    started = time.perf_counter()
    if config.task == "linkpred":
        units, aggregates, header, rows = _run_linkpred(graph, config)
    elif config.task == "community":
        units, aggregates, header, rows = _run_community(graph, config, out_stem)
    elif config.task == "vital":
        units, aggregates, header, rows = _run_vital(graph, config)
    elif config.task == "sir":
        units, aggregates, header, rows = _run_sir(graph, config, out_stem)
    elif config.task == "vital-eval":
        units, aggregates, header, rows = _run_vital_eval(
            graph, config, dataset_hash, out_stem
        )
    else:
        units, aggregates, header, rows = _run_ablation(graph, config, out_stem)
    record = EvaluationRun(
        task=config.task,
        config=config.snapshot(),
        dataset_hash=dataset_hash,
        units=units,
        aggregates=aggregates,
        wall_clock=time.perf_counter() - started,
    )
    record.to_json(json_path)
    write_csv(csv_path, header, rows)
    return record


def verify_run(json_path) -> list[str]:
    """Re-check a persisted run; returns a list of problems (empty = ok)."""
    record = EvaluationRun.from_json(json_path)
    problems = []
    data = record.config.get("data")
    if not data or not Path(data).exists():
        problems.append(f"dataset missing: {data!r}")
    elif file_sha256(data) != record.dataset_hash:
        problems.append("dataset hash mismatch")
    try:
        cfg = ExperimentConfig.from_snapshot(record.config)
        cfg.validate()
    except (TypeError, ConfigError) as exc:
        problems.append(f"config snapshot invalid: {exc}")
    return problems
