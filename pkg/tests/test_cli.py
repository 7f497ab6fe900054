import json
import os
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from ipo_rl import cli
from ipo_rl.errors import ConfigError

TINY = ["--max-iterations", "3", "--n-trajectories", "4", "--epochs", "2",
        "--hidden", "8 8"]


def run_cli(args, tmp_path):
    env = dict(os.environ, IPO_RL_OUTPUT_ROOT=str(tmp_path))
    return subprocess.run([sys.executable, "-m", "ipo_rl.cli", *args],
                          capture_output=True, text=True, env=env)


class TestConfigLoading:
    def test_defaults_plus_scenario_overrides(self):
        run, scenario = cli.load_run_config(
            overrides={"scenario": "point_gather"})
        assert run.algorithm == "ipo"
        assert scenario.name == "point_gather"
        assert run.train.eps_clip == 0.2

    def test_yaml_file_round_trip(self, tmp_path):
        p = tmp_path / "run.yaml"
        p.write_text(
            "scenario: mars_rover\nalgorithm: pdo\nseeds: [1, 2]\n"
            "t: 35.0\nminibatch: 32\noutput_dir: exp1\n")
        run, scenario = cli.load_run_config(str(p))
        assert run.algorithm == "pdo"
        assert run.seeds == (1, 2)
        assert run.train.t == 35.0
        assert run.train.minibatch == 32
        assert run.output_dir == "exp1"

    def test_cli_flags_beat_yaml(self, tmp_path):
        p = tmp_path / "run.yaml"
        p.write_text("scenario: point_gather\nt: 5\n")
        run, _ = cli.load_run_config(str(p), overrides={"t": "50"})
        assert run.train.t == 50.0

    def test_unknown_key_raises(self, tmp_path):
        p = tmp_path / "run.yaml"
        p.write_text("scenario: point_gather\nmystery_knob: 1\n")
        with pytest.raises(ConfigError, match="mystery_knob"):
            cli.load_run_config(str(p))

    def test_missing_scenario_raises(self):
        with pytest.raises(ConfigError, match="scenario"):
            cli.load_run_config(overrides={"algorithm": "ipo"})

    def test_missing_file_raises(self):
        with pytest.raises(ConfigError):
            cli.load_run_config("/no/such/file.yaml")

    def test_bad_algorithm_raises(self):
        with pytest.raises(ConfigError):
            cli.load_run_config(
                overrides={"scenario": "point_gather", "algorithm": "trpo"})


class TestExitCodes:
    def test_unknown_scenario_exits_2_and_names_key(self, tmp_path):
        r = run_cli(["train", "--scenario", "lunar_lander"], tmp_path)
        assert r.returncode == 2
        assert "lunar_lander" in r.stderr + r.stdout

    def test_bad_config_key_exits_2(self, tmp_path):
        p = tmp_path / "bad.yaml"
        p.write_text("scenario: point_gather\nnot_a_key: 3\n")
        r = run_cli(["train", str(p)], tmp_path)
        assert r.returncode == 2
        assert "not_a_key" in r.stderr + r.stdout

    def test_unknown_flag_exits_2(self, tmp_path):
        r = run_cli(["train", "--scenario", "point_gather", "--bogus", "1"],
                    tmp_path)
        assert r.returncode == 2


class TestTrainCommand:
    def test_writes_metrics_and_checkpoint(self, tmp_path):
        r = run_cli(["train", "--scenario", "point_gather", "--seeds", "0",
                     "--output-dir", "a", *TINY], tmp_path)
        assert r.returncode == 0, r.stderr
        out = tmp_path / "a"
        csv = out / "ipo_point_gather_seed0.csv"
        assert csv.is_file()
        assert (out / "ipo_point_gather_seed0.npz").is_file()
        lines = csv.read_text().splitlines()
        assert lines[0] == ",".join(cli.metrics_header(1))
        assert len(lines) == 1 + 3  # header + one row per iteration

    def test_metrics_byte_identical_across_runs(self, tmp_path):
        args = ["train", "--scenario", "point_gather", "--seeds", "3", *TINY]
        run_cli([*args, "--output-dir", "a"], tmp_path)
        run_cli([*args, "--output-dir", "b"], tmp_path)
        a = (tmp_path / "a" / "ipo_point_gather_seed3.csv").read_bytes()
        b = (tmp_path / "b" / "ipo_point_gather_seed3.csv").read_bytes()
        assert a == b

    def test_timing_sidecar_written(self, tmp_path):
        run_cli(["train", "--scenario", "point_gather", "--seeds", "0",
                 "--output-dir", "a", *TINY], tmp_path)
        sidecar = tmp_path / "a" / "ipo_point_gather_seed0.timing.csv"
        assert sidecar.is_file()
        lines = sidecar.read_text().splitlines()
        assert lines[0].startswith("iteration")
        assert len(lines) == 4

    def test_pdo_metrics_include_lambda(self, tmp_path):
        r = run_cli(["train", "--scenario", "point_gather", "--seeds", "0",
                     "--algorithm", "pdo", "--output-dir", "p", *TINY], tmp_path)
        assert r.returncode == 0, r.stderr
        csv = tmp_path / "p" / "pdo_point_gather_seed0.csv"
        lines = csv.read_text().splitlines()
        assert "lambda_1" in lines[0]
        assert lines[1].split(",")[-1] != ""


class TestCompareCommand:
    def test_degenerate_sweep(self, tmp_path):
        r = run_cli(["compare", "--scenario", "point_gather", "--seeds", "0",
                     "--algorithms", "ipo ppo", "--output-dir", "cmp", *TINY],
                    tmp_path)
        assert r.returncode == 0, r.stderr
        summary = json.loads((tmp_path / "cmp" / "summary.json").read_text())
        assert {row["algorithm"] for row in summary} == {"ipo", "ppo"}
        assert all("J_R_mean" in row and "J_C_1_satisfied" in row
                   for row in summary)
        assert (tmp_path / "cmp" / "ppo_point_gather_seed0.csv").is_file()


class TestGapCheckCommand:
    def test_row_per_t_and_pass(self, tmp_path):
        r = run_cli(["gap-check", "--m", "1", "--t", "10,50",
                     "--resolution", "401"], tmp_path)
        assert r.returncode == 0, r.stderr
        rows = [l for l in r.stdout.splitlines() if l and l[0].isdigit()]
        assert len(rows) == 2
        assert all(row.endswith("pass") for row in rows)


class TestPlotCommand:
    def test_svg_outputs_are_valid_xml(self, tmp_path):
        run_cli(["train", "--scenario", "point_gather", "--seeds", "0",
                 "--output-dir", "a", *TINY], tmp_path)
        csv = tmp_path / "a" / "ipo_point_gather_seed0.csv"
        r = run_cli(["plot", str(csv), "--output", str(tmp_path / "plots"),
                     "--scenario", "point_gather"], tmp_path)
        assert r.returncode == 0, r.stderr
        svgs = list((tmp_path / "plots").glob("*.svg"))
        assert len(svgs) >= 2
        for svg in svgs:
            root = ET.parse(svg).getroot()
            assert root.tag.endswith("svg")


class TestEvalCommand:
    def test_reports_objective_and_constraints(self, tmp_path):
        run_cli(["train", "--scenario", "point_gather", "--seeds", "0",
                 "--output-dir", "a", *TINY], tmp_path)
        ckpt = tmp_path / "a" / "ipo_point_gather_seed0.npz"
        r = run_cli(["eval", str(ckpt), "--scenario", "point_gather",
                     "--episodes", "5"], tmp_path)
        assert r.returncode == 0, r.stderr
        assert "J_R" in r.stdout and "J_C_1" in r.stdout and "limit" in r.stdout
