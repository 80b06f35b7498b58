#!/usr/bin/env python3
"""
Test Script for the Experiment Runner

Drives the command-line entry point end to end: exit codes, CSV reports,
parameter precedence and configuration errors.
"""

import json
import os
import sys

import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from gcrm import ConfigurationError
from gcrm.runner import main
from gcrm.runner.report_io import COLUMNS, read_report
from gcrm.runner.schemas import ExperimentConfig, parse_atoms, parse_real

A1_ARGS = ["pair-corr", "--sampler", "a1", "--alpha", "1.5", "--b", "1", "--samples", "100000", "--seed", "42"]


def run(argv, out):
    return main(argv + ["--out", str(out)])


def params_of(frame):
    return json.loads(frame["param_json"].iloc[0])


def test_orthogonality_report(tmp_path):
    out = tmp_path / "o.csv"
    assert run(["orthogonality", "--alpha", "1.0", "--max-degree", "6"], out) == 0
    frame = read_report(out)
    assert list(frame.columns) == COLUMNS
    assert len(frame) == 49
    assert (frame["z_score"].abs() <= 1).all()
    print("✓ orthogonality report written")


def test_pair_corr_a1(tmp_path):
    out = tmp_path / "a1.csv"
    assert run(A1_ARGS + ["--n", "1,2,3"], out) == 0
    frame = read_report(out)
    assert list(frame["n_index"]) == ["1", "2", "3"]
    assert list(frame["exact"]) == pytest.approx([0.5, 0.25, 0.125])
    params = params_of(frame)
    assert params["seed"] == 42 and params["samples"] == 100000 and params["sampler"] == "a1"


def test_reports_are_reproducible(tmp_path):
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert run(A1_ARGS + ["--n", "1,2"], first) == 0
    assert run(A1_ARGS + ["--n", "1,2"], second) == 0
    assert first.read_bytes() == second.read_bytes()
    assert b"\r\n" not in first.read_bytes()


def test_streams_pool_to_full_sample(tmp_path):
    out = tmp_path / "streams.csv"
    assert run(A1_ARGS + ["--n", "1", "--streams", "4"], out) == 0
    assert params_of(read_report(out))["streams"] == "4"


def test_config_file_and_flag_precedence(tmp_path):
    config = tmp_path / "a1.conf"
    config.write_text("# a1 run\nsampler=a1\nalpha=1.5\nb=1\nn=1\nseed=5\nsamples=50000\n", encoding="utf-8")
    out = tmp_path / "conf.csv"
    assert run(["pair-corr", "--config", str(config), "--b", "3"], out) == 0
    frame = read_report(out)
    assert frame["exact"].iloc[0] == pytest.approx(0.75)
    params = params_of(frame)
    assert params["seed"] == 5 and params["samples"] == 50000 and params["b"] == "3"


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("GCRM_SEED", "77")
    out = tmp_path / "env.csv"
    argv = ["pair-corr", "--sampler", "a1", "--alpha", "1", "--b", "1", "--samples", "20000", "--n", "1"]
    assert run(argv, out) == 0
    assert params_of(read_report(out))["seed"] == 77


def test_output_dir_setting(tmp_path, monkeypatch):
    monkeypatch.setenv("GCRM_OUTPUT_DIR", str(tmp_path / "reports"))
    assert main(["genfun-check", "--alpha", "2"]) == 0
    assert (tmp_path / "reports" / "genfun-check.csv").exists()


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    [],
    ["pair-corr", "--sampler", "a9", "--alpha", "1"],
    ["pair-corr", "--sampler", "a1", "--b", "1"],
    ["pair-corr", "--sampler", "a1", "--alpha", "1", "--b", "1", "--seed", "-3"],
    ["pair-corr", "--sampler", "a1", "--alpha", "1", "--b", "1", "--seed", "abc"],
    ["pair-corr", "--sampler", "a1", "--alpha", "1", "--b", "1", "--samples", "0"],
    ["dirichlet-moments", "--theta", "-1", "--base", "0.5"],
    ["merge-check", "--kernel", "common", "--eta", "0.5", "--i", "0", "--j", "0"],
    ["laplace-ratio", "--kernel", "degenerate", "--z", "0.5", "--trunc", "500"],
])
def test_configuration_errors(argv, tmp_path, capsys):
    out = tmp_path / "err.csv"
    assert main(argv + ["--out", str(out)] if argv else argv) == 2
    err = capsys.readouterr().err
    assert err.startswith("gcrm: configuration error")
    assert err.count("\n") == 1
    assert not out.exists()


def test_unknown_config_file_key(tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("sampler=a1\nalpha=1\nb=1\ncolour=red\n", encoding="utf-8")
    assert run(["pair-corr", "--config", str(config)], tmp_path / "bad.csv") == 2
    assert "colour" in capsys.readouterr().err


def test_subordinate_factorization(tmp_path):
    base = ["subordinate", "--mode", "factorization", "--samples", "100000", "--seed", "7"]
    assert run(base + ["--drift", "1"], tmp_path / "drift.csv") == 0
    assert run(base + ["--rate", "1", "--jump", "log4"], tmp_path / "jumps.csv") == 0
    frame = read_report(tmp_path / "jumps.csv")
    assert abs(frame["z_score"].iloc[0]) > 5
    assert run(base + ["--rate", "1", "--jump", "log4", "--expect", "factorize"], tmp_path / "fail.csv") == 1


def test_subordinate_corr_and_chain(tmp_path):
    base = ["subordinate", "--rate", "1", "--jump", "log(4)", "--samples", "100000", "--seed", "7"]
    assert run(base + ["--n", "1,2"], tmp_path / "corr.csv") == 0
    exact = read_report(tmp_path / "corr.csv")["exact"]
    assert list(exact) == pytest.approx([0.6065306597126334, 0.4723665527410147])
    assert run(base + ["--mode", "chain", "--n", "1"], tmp_path / "chain.csv") == 0
    assert len(read_report(tmp_path / "chain.csv")) == 3


@pytest.mark.parametrize("argv", [
    ["merge-check", "--alpha", "1,2", "--kernel", "common", "--eta", "0.5"],
    ["merge-check", "--alpha", "0.5,1", "--kernel", "percell", "--bases", "0@0.5,1@0.5;0.2@0.3,0.9@0.7"],
    ["merge-check", "--alpha", "1,1", "--kernel", "random", "--law", "beta:2,1"],
    ["laplace-ratio", "--alpha", "1", "--kernel", "degenerate", "--z", "0.5", "--s", "1", "--t", "1"],
    ["laplace-ratio", "--alpha", "1,2", "--kernel", "random", "--law", "beta:1,1", "--s", "1", "--t", "1"],
    ["density-check", "--alpha", "1", "--z", "0.5"],
    ["dirichlet-moments", "--theta", "1", "--base", "0@0.5,1@0.5", "--samples", "50000"],
    ["stieltjes-check", "--theta", "1", "--base", "0@0.5,1@0.5", "--samples", "50000"],
    ["poisson-embed", "--alpha", "1", "--gamma", "2", "--z", "0.5", "--samples", "100000"],
    ["pair-corr", "--sampler", "a4", "--alpha", "1,1", "--pz", "beta:1,1", "--samples", "100000", "--max-order", "2"],
    ["pair-corr", "--sampler", "dw", "--alpha", "1", "--t", "1", "--samples", "100000", "--scan-degree", "2"],
])
def test_experiments_pass(argv, tmp_path):
    out = tmp_path / "report.csv"
    assert run(argv + ["--seed", "11"], out) == 0
    assert len(read_report(out)) > 0


def test_schema_parsers():
    assert parse_real("log4") == pytest.approx(1.3862943611198906)
    assert parse_real("log(4)") == parse_real("log4")
    assert parse_atoms("0@0.5, 1@0.5") == [(0.0, 0.5), (1.0, 0.5)]
    assert parse_atoms("0.3") == [(0.3, 1.0)]
    config = ExperimentConfig(subcommand="pair-corr", params={"max-order": "3"}, seed=1, samples=10)
    assert config.integer("max_order") == 3
    assert [n.label() for n in config.indices("n", 2, [])] == []
    with pytest.raises(ConfigurationError):
        config.indices("n", 2)


def test_config_file_dotenv_syntax(tmp_path):
    config = tmp_path / "quoted.conf"
    config.write_text('# quoted values\nsampler="a1"\nalpha=\'1.5\'\n\nb=1\nn="1,2"\n', encoding="utf-8")
    out = tmp_path / "quoted.csv"
    assert run(["pair-corr", "--config", str(config), "--samples", "20000", "--seed", "3"], out) == 0
    assert list(read_report(out)["exact"]) == pytest.approx([0.5, 0.25])


def test_config_file_rejects_bare_key(tmp_path, capsys):
    config = tmp_path / "bare.conf"
    config.write_text("sampler=a1\nalpha\n", encoding="utf-8")
    assert run(["pair-corr", "--config", str(config)], tmp_path / "bare.csv") == 2
    assert "expected key=value" in capsys.readouterr().err
    assert run(["pair-corr", "--config", str(tmp_path / "missing.conf")], tmp_path / "bare.csv") == 2


def test_poisson_guard_reports_range_error(tmp_path, capsys):
    out = tmp_path / "range.csv"
    argv = ["pair-corr", "--sampler", "a1", "--alpha", "1", "--b", "1e9", "--samples", "1000", "--seed", "1"]
    assert run(argv, out) == 2
    err = capsys.readouterr().err
    assert err.startswith("gcrm: range error: Poisson mean")
    assert err.count("\n") == 1
    assert not out.exists()
