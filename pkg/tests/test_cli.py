"""CLI behavior: conversion, experiment dispatch, persistence, exit codes."""

import gzip
import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from hypermine.cli import main
from hypermine.experiments import (
    ConfigError,
    ExperimentConfig,
    parse_beta_grid,
    parse_beta_spec,
    parse_seed_range,
    run,
    verify_run,
)


@pytest.fixture
def toy_files(tmp_path):
    data = tmp_path / "toy.txt"
    data.write_text("a b\nb c\na c\nc d\nb d\na d\n")
    labels = tmp_path / "toy_labels.txt"
    labels.write_text("a 0\nb 0\nc 1\nd 1\n")
    return data, labels


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


class TestParsers:
    def test_seed_range(self):
        assert parse_seed_range("0..3") == [0, 1, 2, 3]
        assert parse_seed_range("7") == [7]
        assert parse_seed_range("1,4,9") == [1, 4, 9]

    def test_beta_grid(self):
        grid = parse_beta_grid("0.1:0.5:5")
        assert np.allclose(grid, [0.1, 0.2, 0.3, 0.4, 0.5])
        with pytest.raises(ConfigError):
            parse_beta_grid("nope")

    def test_beta_spec(self):
        assert parse_beta_spec("abs:0.3") == ("abs", pytest.approx([0.3]))
        assert parse_beta_spec("0.25")[0] == "abs"
        mode, values = parse_beta_spec("rel:0.5..2.0:4")
        assert mode == "rel"
        assert np.allclose(values, [0.5, 1.0, 1.5, 2.0])
        with pytest.raises(ConfigError):
            parse_beta_spec("rel:x..y:3")


class TestConvert:
    def test_list_identity(self, tmp_path):
        src = tmp_path / "in.txt"
        src.write_text("a b c\nb c\n")
        out = tmp_path / "out.txt"
        result = invoke("convert", "--input", src, "--out", out)
        assert result.exit_code == 0, result.output
        assert out.read_text() == "a b c\nb c\n"
        assert "N=3 M=2" in result.output

    def test_simplicial_triple(self, tmp_path):
        (tmp_path / "ds-nverts.txt").write_text("2\n3\n")
        (tmp_path / "ds-simplices.txt").write_text("5\n6\n5\n6\n7\n")
        out = tmp_path / "ds.txt"
        result = invoke("convert", "--input", tmp_path / "ds", "--out", out)
        assert result.exit_code == 0, result.output
        assert out.read_text() == "5 6\n5 6 7\n"

    def test_gzip_triple(self, tmp_path):
        with gzip.open(tmp_path / "gz-nverts.txt.gz", "wt") as fh:
            fh.write("2\n2\n")
        with gzip.open(tmp_path / "gz-simplices.txt.gz", "wt") as fh:
            fh.write("1\n2\n2\n3\n")
        out = tmp_path / "gz.txt"
        result = invoke("convert", "--input", tmp_path / "gz", "--out", out)
        assert result.exit_code == 0, result.output
        assert out.read_text() == "1 2\n2 3\n"

    def test_dedupe_flag(self, tmp_path):
        src = tmp_path / "in.txt"
        src.write_text("a b\nb a\n")
        out = tmp_path / "out.txt"
        result = invoke("convert", "--input", src, "--dedupe", "--out", out)
        assert result.exit_code == 0
        assert out.read_text().count("\n") == 1

    def test_missing_input_exit_3(self, tmp_path):
        result = invoke("convert", "--input", tmp_path / "nope.txt", "--out", tmp_path / "o.txt")
        assert result.exit_code == 3


class TestExitCodes:
    def test_bad_rho_exit_2(self, toy_files, tmp_path):
        data, _ = toy_files
        with pytest.raises(ConfigError):
            run(ExperimentConfig(task="linkpred", data=str(data), out=str(tmp_path / "x"), rho=1.5))
        result = invoke(
            "linkpred", "--data", data, "--rho", "1.5", "--folds", "3",
            "--out", tmp_path / "x.json",
        )
        assert result.exit_code == 2

    def test_missing_dataset_exit_3(self, tmp_path):
        result = invoke(
            "linkpred", "--data", tmp_path / "missing.txt", "--out", tmp_path / "x.json"
        )
        assert result.exit_code == 3

    def test_seed_and_seeds_conflict(self, toy_files, tmp_path):
        data, _ = toy_files
        result = invoke(
            "linkpred", "--data", data, "--seed", "1", "--seeds", "0..2",
            "--out", tmp_path / "x.json",
        )
        assert result.exit_code == 2


class TestRunOutputs:
    def test_linkpred_files(self, toy_files, tmp_path):
        data, _ = toy_files
        out = tmp_path / "lp.json"
        result = invoke(
            "linkpred", "--data", data, "--algo", "hra", "--folds", "3",
            "--seed", "42", "--out", out,
        )
        assert result.exit_code == 0, result.output
        assert out.exists() and out.with_suffix(".csv").exists()
        payload = json.loads(out.read_text())
        assert payload["task"] == "linkpred"
        assert payload["dataset_hash"]
        assert len(payload["units"]) == 3

    def test_community_files_and_assignments(self, toy_files, tmp_path):
        data, labels = toy_files
        out = tmp_path / "cd.json"
        result = invoke(
            "community", "--data", data, "--labels", labels, "--algo", "hra,nmf",
            "--seeds", "0..1", "--out", out,
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "cd.assign-hra-seed0.txt").exists()
        assert (tmp_path / "cd.assign-nmf-seed1.txt").exists()
        lines = (tmp_path / "cd.assign-hra-seed0.txt").read_text().splitlines()
        assert len(lines) == 4 and lines[0].split()[0] == "a"

    def test_vital_csv_shape(self, toy_files, tmp_path):
        data, _ = toy_files
        out = tmp_path / "cent.json"
        result = invoke(
            "vital", "--data", data, "--measures", "hra,hdc", "--out", out
        )
        assert result.exit_code == 0, result.output
        lines = out.with_suffix(".csv").read_text().splitlines()
        assert lines[0] == "node_id,hra,hdc"
        assert len(lines) == 5

    def test_verify_ok_and_corrupted(self, toy_files, tmp_path):
        data, _ = toy_files
        out = tmp_path / "lp.json"
        assert invoke(
            "linkpred", "--data", data, "--folds", "3", "--out", out
        ).exit_code == 0
        assert invoke("verify", out).exit_code == 0
        # corrupt the dataset after the run
        data.write_text("a b\nb c\n")
        result = invoke("verify", out)
        assert result.exit_code == 1
        assert "hash mismatch" in result.output

    def test_ablation_paired_rows(self, toy_files, tmp_path):
        data, _ = toy_files
        out = tmp_path / "abl.json"
        result = invoke(
            "ablation", "--data", data, "--task", "linkpred", "--folds", "3",
            "--seed", "1", "--out", out,
        )
        assert result.exit_code == 0, result.output
        lines = out.with_suffix(".csv").read_text().splitlines()
        assert lines[0] == "unit,metric,value_P,value_M,delta"
        assert len(lines) == 3

    def test_vital_ablation_requires_abs_beta(self, toy_files, tmp_path):
        data, _ = toy_files
        result = invoke(
            "ablation", "--data", data, "--task", "vital", "--beta", "rel:1.0",
            "--runs", "10", "--out", tmp_path / "a.json",
        )
        assert result.exit_code == 2

    def test_vital_ablation_abs_beta(self, toy_files, tmp_path):
        data, _ = toy_files
        out = tmp_path / "av.json"
        result = invoke(
            "ablation", "--data", data, "--task", "vital", "--beta", "abs:0.2",
            "--runs", "10", "--seed", "3", "--out", out,
        )
        assert result.exit_code == 0, result.output
        rows = out.with_suffix(".csv").read_text().splitlines()
        assert len(rows) == 2 and rows[1].startswith("beta=0.2,tau,")


class TestDeterminismAndResume:
    def test_csv_byte_identical_across_workers(self, toy_files, tmp_path, monkeypatch):
        data, labels = toy_files
        outputs = {}
        for workers in ("1", "8"):
            monkeypatch.setenv("HYPERMINE_THREADS", workers)
            blobs = []
            for task, kwargs in (
                ("linkpred", dict(task="linkpred", folds=3, seeds=[42])),
                ("community", dict(task="community", labels=str(labels), seeds=[0, 1])),
                ("vital", dict(task="vital")),
            ):
                out = tmp_path / f"{task}-{workers}.json"
                run(ExperimentConfig(data=str(data), out=str(out), **kwargs))
                blobs.append(out.with_suffix(".csv").read_bytes())
            outputs[workers] = blobs
        assert outputs["1"] == outputs["8"]

    def test_sir_checkpoint_resume(self, toy_files, tmp_path):
        data, _ = toy_files
        out = tmp_path / "chi.json"
        config = ExperimentConfig(
            task="sir",
            data=str(data),
            out=str(out),
            beta_grid="0.05:0.9:10",
            ensemble_runs=80,
            seeds=[7],
        )
        record = run(config)
        # pre-seed a partial file with one bogus unit: resume must reuse it
        partial = out.with_suffix(".partial.jsonl")
        bogus = {"unit": "beta:0", "result": {"chi": 123.0, "mean_size": 1.0}}
        partial.write_text(json.dumps(bogus) + "\n")
        resumed = run(config)
        assert not partial.exists()  # cleared after a completed sweep
        grid = parse_beta_grid(config.beta_grid)
        chi_by_beta = {u["beta"]: u["chi"] for u in resumed.units}
        assert chi_by_beta[float(grid[0])] == 123.0
        original = {u["beta"]: u["chi"] for u in record.units}
        # untouched grid points recompute to identical values
        assert chi_by_beta[float(grid[1])] == original[float(grid[1])]

    def test_vital_eval_uses_threshold_cache(self, toy_files, tmp_path):
        data, _ = toy_files
        out = tmp_path / "tau.json"
        config = ExperimentConfig(
            task="vital-eval",
            data=str(data),
            out=str(out),
            measures=["hdc"],
            beta="rel:1.0",
            beta_grid="0.05:0.9:10",
            runs=20,
            ensemble_runs=60,
            seeds=[7],
        )
        run(config)
        cache = tmp_path / "toy.txt.betac.json"
        assert cache.exists()
        stamp = cache.read_text()
        run(config)  # second run must reuse the cache unchanged
        assert cache.read_text() == stamp

    def test_rerun_reproduces_json_units(self, toy_files, tmp_path):
        data, _ = toy_files
        config = ExperimentConfig(
            task="linkpred", data=str(data), out=str(tmp_path / "r.json"),
            folds=3, seeds=[5],
        )
        first = run(config)
        second = run(config)
        assert first.units == second.units
        assert verify_run(tmp_path / "r.json") == []
