import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from randstruct import cli, experiments, graphs, growth, permutations, trees
from randstruct.errors import InvalidParameterError
from randstruct.experiments import ExperimentConfig, list_experiments, run_experiment


def run_cli(*argv):
    return cli.main(list(argv))


def test_registry_contains_required_experiments():
    names = set(list_experiments())
    required = {"giant", "connectivity", "fluid-curve", "triangles",
                "spectral-moments", "bgw-size", "parking", "ballot", "cycles",
                "poisson-dirichlet", "dickman", "rrt", "ba", "yule", "coupon",
                "bins", "pills", "corral", "many-to-one"}
    assert required <= names


def test_schemas_list_required_params():
    schemas = list_experiments()
    assert set(schemas["giant"]) == {"n", "c"}
    assert set(schemas["many-to-one"]) == {"k", "t", "functional", "arg"}


def test_unknown_experiment_rejected():
    with pytest.raises(InvalidParameterError) as err:
        run_experiment(ExperimentConfig("nope", {}))
    assert "giant" in str(err.value)


def test_unknown_parameter_rejected():
    with pytest.raises(InvalidParameterError):
        run_experiment(ExperimentConfig("giant", {"n": 100, "zzz": 1}))


def test_missing_parameter_rejected():
    with pytest.raises(InvalidParameterError):
        run_experiment(ExperimentConfig("giant", {"n": 100}))


def test_run_reports_summary():
    report = run_experiment(ExperimentConfig(
        "parking", {"n": 10, "m": 5}, master_seed=5, reps=200))
    assert 0.0 <= report.summary["parked_mean"] <= 1.0
    assert report.summary["exact_probability"] == pytest.approx(
        float(__import__("randstruct.exact", fromlist=["x"])
              .parking_full_prob(10, 5)))
    assert report.verdicts["ci_brackets_exact"] in (True, False)


def test_csv_determinism_across_worker_counts(tmp_path):
    outputs = []
    for i, workers in enumerate((1, 2)):
        out = tmp_path / f"run{i}.csv"
        cfg = ExperimentConfig("cycles", {"n": 50}, master_seed=9, reps=16,
                               workers=workers, out=str(out), per_rep=True)
        run_experiment(cfg)
        reps_file = tmp_path / f"run{i}-reps.csv"
        outputs.append(out.read_bytes() + reps_file.read_bytes())
    assert outputs[0] == outputs[1]


def test_json_report_shape(tmp_path):
    out = tmp_path / "report.json"
    cfg = ExperimentConfig("ballot", {"a": 4, "b": 2}, master_seed=3, reps=50,
                           out=str(out), fmt="json", per_rep=True)
    run_experiment(cfg)
    payload = json.loads(out.read_text())
    assert set(payload) == {"config", "rows", "summary", "verdicts"}
    assert payload["config"]["seed"] == 3
    assert len(payload["rows"]) == 50
    assert payload["summary"]["exact_probability"] == pytest.approx(1 / 3)


def test_connectivity_experiment_brackets_limit():
    report = run_experiment(ExperimentConfig(
        "connectivity", {"n": 1_000, "c": 0.0}, master_seed=11, reps=400))
    assert report.verdicts["ci_brackets_limit"] in (True, False)
    assert abs(report.summary["connected_mean"]
               - report.summary["double_exponential_limit"]) < 0.08


def test_cli_list_exit_code(capsys):
    assert run_cli("list") == 0
    out = capsys.readouterr().out
    assert "giant" in out and "many-to-one" in out


def test_cli_run_and_outputs(tmp_path, capsys):
    out = tmp_path / "giant.csv"
    code = run_cli("run", "--experiment", "giant", "--param", "n=500",
                   "--param", "c=2.0", "--seed", "7", "--reps", "5",
                   "--out", str(out), "--per-rep")
    assert code == 0
    assert out.exists() and (tmp_path / "giant-reps.csv").exists()
    header = out.read_text().splitlines()[0]
    assert header == "experiment,seed,metric,value"
    reps_lines = (tmp_path / "giant-reps.csv").read_text().splitlines()
    assert reps_lines[0].startswith("experiment,seed,rep,")
    assert len(reps_lines) == 6


def test_cli_usage_error_exit_code(capsys):
    assert run_cli("run", "--experiment", "no-such-thing") == 2
    assert run_cli("run", "--experiment", "giant", "--param", "oops") == 2


def test_cli_env_seed(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("RANDSTRUCT_SEED", "123")
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    parser_args = ["run", "--experiment", "cycles", "--param", "n=20",
                   "--reps", "10", "--per-rep"]
    assert cli.main(parser_args + ["--out", str(out1)]) == 0
    assert cli.main(parser_args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert "seed=123" in capsys.readouterr().out


def test_cli_dump_plane_trees(tmp_path):
    out = tmp_path / "corpus.txt"
    assert run_cli("dump", "--kind", "plane-tree", "--count", "5", "--n", "6",
                   "--seed", "2", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5
    for line in lines:
        tree = trees.plane_tree_from_line(line)
        assert tree.n_vertices == 6


def test_cli_dump_graph(tmp_path):
    out = tmp_path / "graph.txt"
    assert run_cli("dump", "--kind", "graph", "--count", "1", "--n", "12",
                   "--p", "0.3", "--seed", "2", "--out", str(out)) == 0
    g = graphs.graph_from_lines(out.read_text().splitlines())
    assert g.n == 12


def test_cli_dump_permutations_and_growth(tmp_path):
    out = tmp_path / "perms.txt"
    assert run_cli("dump", "--kind", "permutation", "--count", "3", "--n", "9",
                   "--seed", "2", "--out", str(out)) == 0
    for line in out.read_text().splitlines():
        assert permutations.perm_from_line(line).n == 9
    out2 = tmp_path / "gt.txt"
    assert run_cli("dump", "--kind", "growth-tree", "--chain", "ba",
                   "--count", "2", "--n", "7", "--seed", "2",
                   "--out", str(out2)) == 0
    for line in out2.read_text().splitlines():
        assert growth.growing_tree_from_line(line).n_vertices == 8


def test_cli_verify_fast_subset(capsys):
    code = run_cli("verify", "--suite", "fast", "--only", "03")
    out = capsys.readouterr().out
    assert "03 first-passage identity" in out
    assert code == 0


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "randstruct.cli", "list"],
                          capture_output=True, text=True,
                          cwd=str(Path(__file__).resolve().parent.parent))
    assert proc.returncode == 0
    assert "giant" in proc.stdout


def test_verify_detects_broken_oracle(monkeypatch, capsys):
    # a fixed-point oracle shifted by 0.05 must fail the giant criterion
    from randstruct import verify as V

    def broken(scale, seed):
        chk = V._Check()
        import randstruct.graphs as G
        summary = G.giant_experiment(5_000, 2.0, 10, seed)
        target = 0.05 + 0.7968121300200679
        chk.within("largest c=2", summary.largest_fraction, target, 0.01)
        return chk.result()

    results = [r for r in [V.CriterionResult(
        "07 giant component", *broken("fast", V.MASTER_SEED), 0.0)]]
    assert not results[0].passed
    assert "largest c=2" in results[0].detail
