from __future__ import annotations

import math

import pytest

from risdrl.db.store import Store
from risdrl.experiments.metrics import MetricsRow
from risdrl.export.csv_export import export_csv, parse_metrics_csv
from risdrl.export.json_export import export_json
from risdrl.sac.trainer import EpisodeLog


def _row(method="RA", value=30.0, seed=0):
    return MetricsRow(method, "P_max", value, seed, 1.25, (0.5, 0.75), (0.0, 0.5))


def _episode(i, loss=math.nan):
    return EpisodeLog(episode=i, steps=5, mean_reward=0.1 * i, best_step_reward=0.2, critic1_loss=loss,
                      critic2_loss=loss, policy_loss=loss, alpha=0.5, entropy=1.0, updates=i,
                      eval_reward=0.3, theta=0.0, phi=0.0, ris_bs=0, ue_bs=(0, 1),
                      best_theta=0.0, best_phi=0.0, best_ris_bs=0, best_ue_bs=(0, 1))


@pytest.fixture
def store(tmp_path):
    with Store(tmp_path / "runs.db") as s:
        yield s


def test_run_lifecycle(store):
    run_id = store.create_run("first", "sweep", "abc123def4567890", seed=3, output_dir="out")
    run = store.get_run(run_id)
    assert (run.label, run.kind, run.seed, run.row_count) == ("first", "sweep", 3, 0)
    assert run.short_hash == "abc123def456"
    assert run.created_datetime.year >= 2024
    store.update_run_count(run_id, 7)
    assert store.get_run(run_id).row_count == 7
    assert store.get_latest_run().id == run_id
    assert store.get_run(run_id + 1) is None


def test_list_runs_by_kind(store):
    store.create_run("a", "train", "h")
    store.create_run("b", "sweep", "h")
    assert [r.label for r in store.list_runs()] == ["a", "b"]
    assert [r.label for r in store.list_runs("train")] == ["a"]


def test_metrics_round_trip(store):
    run_id = store.create_run("m", "sweep", "h")
    rows = [_row(), _row("NO_RIS"), _row("RA", 40.0, 1)]
    assert store.insert_metrics(run_id, rows) == 3
    assert store.get_metrics(run_id) == rows
    assert store.get_metrics(run_id, "NO_RIS") == [rows[1]]


def test_episode_nan_losses_round_trip(store):
    run_id = store.create_run("t", "train", "h")
    store.insert_episodes(run_id, "curve", [_episode(0), _episode(1, loss=0.25)])
    first, second = store.get_episodes(run_id, "curve")
    assert math.isnan(first.policy_loss)
    assert second.critic1_loss == 0.25
    assert store.get_curve_names(run_id) == ["curve"]


def test_purge_keeps_recent(store):
    ids = [store.create_run(f"r{i}", "sweep", "h") for i in range(4)]
    store.insert_metrics(ids[0], [_row()])
    assert store.purge_old_runs(keep=2) == 2
    assert [r.id for r in store.list_runs()] == ids[2:]
    assert store.get_metrics(ids[0]) == []
    assert store.purge_old_runs(keep=2) == 0


def test_clear_all(store):
    store.create_run("x", "train", "h")
    store.create_run("y", "train", "h")
    assert store.clear_all_runs() == 2
    assert store.list_runs() == []
    assert store.get_latest_run() is None


def test_exports(store):
    run_id = store.create_run("e", "sweep", "h")
    store.insert_metrics(run_id, [_row()])
    store.insert_episodes(run_id, "c", [_episode(0)])
    assert parse_metrics_csv(export_csv(store, run_id)) == [_row()]
    assert export_csv(store, run_id, curve="c").splitlines()[0].startswith("episode,steps")
    data = export_json(store, run_id)
    assert '"policy_loss": null' in data
    assert '"label": "e"' in data
    with pytest.raises(ValueError):
        export_json(store, 999)


def test_parse_rejects_foreign_csv():
    with pytest.raises(ValueError):
        parse_metrics_csv("a,b,c\n1,2,3\n")
