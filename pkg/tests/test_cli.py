from __future__ import annotations

import csv
import json

import pytest
from click.testing import CliRunner

from risdrl.cli import cli

SMALL_RUN = """\
[env]
steps_per_episode = 5

[sac]
hidden_sizes = [8, 8]
batch_size = 4
warmup = 8
"""

SWEEP = """\
[experiment]
name = "power"
sweep_variable = "P_max"
sweep_values = [20, 30]
seeds = [0]
methods = ["RA", "NO_RIS"]
trials = 5
"""


@pytest.fixture
def runner(registry_dir):
    return CliRunner()


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL_RUN)
    return path


def _train(runner, small_config, out):
    return runner.invoke(cli, ["-p", "ci", "-c", str(small_config), "train", "--seed", "1",
                               "--episodes", "2", "--output", str(out)])


def test_profiles_command(runner):
    result = runner.invoke(cli, ["profiles"])
    assert result.exit_code == 0
    for name in ("full", "mid", "ci"):
        assert name in result.output


def test_unknown_profile_is_refused(runner):
    result = runner.invoke(cli, ["-p", "huge", "profiles"])
    assert result.exit_code == 2


def test_oracle_command(runner):
    result = runner.invoke(cli, ["-p", "ci", "oracle", "--seed", "1"])
    assert result.exit_code == 0, result.output
    assert "32 of 32" in result.output
    assert "Best sum-rate" in result.output


def test_oracle_refused_on_large_profile(runner):
    result = runner.invoke(cli, ["-p", "full", "oracle"])
    assert result.exit_code == 1
    assert "refused" in result.output


def test_baselines_command(runner):
    result = runner.invoke(cli, ["-p", "ci", "baselines", "--trials", "10"])
    assert result.exit_code == 0, result.output
    assert "RA      (10 trials)" in result.output
    assert "No RIS  (4 assoc.)" in result.output


def test_baselines_rejects_zero_trials(runner):
    assert runner.invoke(cli, ["-p", "ci", "baselines", "--trials", "0"]).exit_code == 2


def test_train_writes_artifacts_and_registers(runner, small_config, tmp_path):
    out = tmp_path / "train"
    result = _train(runner, small_config, out)
    assert result.exit_code == 0, result.output
    assert "Trained 2 episodes" in result.output
    for suffix in ("csv", "ckpt", "json"):
        assert (out / f"train_seed1.{suffix}").exists()
    with open(out / "train_seed1.csv", newline="") as f:
        assert len(list(csv.DictReader(f))) == 2

    listing = runner.invoke(cli, ["-p", "ci", "list"])
    assert "train_seed1" in listing.output

    exported = runner.invoke(cli, ["-p", "ci", "export", "--format", "csv", "--curve", "train_seed1"])
    assert exported.output.startswith("episode,steps")


def test_evaluate_checkpoint(runner, small_config, tmp_path):
    out = tmp_path / "train"
    _train(runner, small_config, out)
    ckpt = str(out / "train_seed1.ckpt")
    result = runner.invoke(cli, ["-p", "ci", "-c", str(small_config), "evaluate", ckpt,
                                 "--realizations", "2"])
    assert result.exit_code == 0, result.output
    assert "Mean over 2" in result.output

    mismatch = runner.invoke(cli, ["-p", "full", "evaluate", ckpt])
    assert mismatch.exit_code == 2
    assert "do not match" in mismatch.output


@pytest.mark.parametrize("keep", [6, 40])
def test_evaluate_rejects_truncated_checkpoint(runner, small_config, tmp_path, keep):
    out = tmp_path / "train"
    _train(runner, small_config, out)
    broken = tmp_path / "broken.ckpt"
    broken.write_bytes((out / "train_seed1.ckpt").read_bytes()[:keep])
    result = runner.invoke(cli, ["-p", "ci", "evaluate", str(broken)])
    assert result.exit_code == 2
    assert "Cannot read checkpoint" in result.output


def test_sweep_command(runner, tmp_path):
    spec = tmp_path / "sweep.toml"
    spec.write_text(SWEEP)
    out = tmp_path / "out"
    result = runner.invoke(cli, ["-p", "ci", "sweep", str(spec), "--output", str(out)])
    assert result.exit_code == 0, result.output
    assert "4 cell(s)" in result.output
    with open(out / "power.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert [r["method"] for r in rows] == ["RA", "NO_RIS", "RA", "NO_RIS"]
    assert (out / "power.json").exists()

    exported = runner.invoke(cli, ["-p", "ci", "export", "--format", "json"])
    assert '"sweep_variable": "P_max"' in exported.output


def test_sweep_keeps_global_config(runner, tmp_path):
    spec = tmp_path / "sweep.toml"
    spec.write_text(SWEEP)
    base = tmp_path / "base.toml"
    base.write_text("[env]\nr_min = 0.75\n")
    out = tmp_path / "out"
    result = runner.invoke(cli, ["-p", "ci", "-c", str(base), "sweep", str(spec), "--output", str(out)])
    assert result.exit_code == 0, result.output
    sidecar = json.loads((out / "power.json").read_text())
    assert sidecar["env"]["r_min"] == 0.75


def test_sweep_rejects_bad_experiment(runner, tmp_path):
    spec = tmp_path / "sweep.toml"
    spec.write_text('[experiment]\nsweep_variable = "P_max"\nsweep_values = []\nseeds = [0]\n')
    assert runner.invoke(cli, ["-p", "ci", "sweep", str(spec)]).exit_code == 2


def test_export_unknown_run(runner):
    result = runner.invoke(cli, ["-p", "ci", "export", "--format", "csv", "--run", "42"])
    assert result.exit_code == 2


def test_purge_and_clear(runner, small_config, tmp_path):
    for i in range(3):
        _train(runner, small_config, tmp_path / f"t{i}")
    result = runner.invoke(cli, ["-p", "ci", "purge", "--keep", "1"])
    assert "Deleted 2 old run(s)" in result.output
    result = runner.invoke(cli, ["-p", "ci", "clear", "--yes"])
    assert "Deleted 1 run(s)" in result.output
    assert "already empty" in runner.invoke(cli, ["-p", "ci", "clear"]).output
