"""JSON sidecars and stored-run export."""
from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Any, Optional

from risdrl import __version__
from risdrl.config import config_hash, config_to_dict
from risdrl.db.store import Store


def _finite_or_none(value: float) -> Optional[float]:
    return None if value is None or not math.isfinite(value) else value


def build_sidecar(env_config, sac_config, seeds: list[int], profile: str,
                  experiment: Optional[dict[str, Any]] = None) -> dict[str, Any]:
    """Provenance record written next to every result CSV."""
    return {
        "version": __version__,
        "profile": profile,
        "config_hash": config_hash(env_config, sac_config),
        "seeds": list(seeds),
        "env": config_to_dict(env_config),
        "sac": config_to_dict(sac_config),
        "experiment": experiment or {},
    }


def write_sidecar(path: Path, sidecar: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(sidecar, indent=2, sort_keys=True), encoding="utf-8")
    return path


def export_json(store: Store, run_id: int) -> str:
    """Export a stored run with its metrics and training curves."""
    run = store.get_run(run_id)
    if run is None:
        raise ValueError(f"Run {run_id} not found")

    curves = {}
    for name in store.get_curve_names(run_id):
        curves[name] = [
            {
                "episode": e.episode,
                "steps": e.steps,
                "mean_reward": e.mean_reward,
                "critic1_loss": _finite_or_none(e.critic1_loss),
                "critic2_loss": _finite_or_none(e.critic2_loss),
                "policy_loss": _finite_or_none(e.policy_loss),
                "alpha": e.alpha,
                "eval_reward": e.eval_reward,
            }
            for e in store.get_episodes(run_id, name)
        ]

    data = {
        "run": asdict(run),
        "metrics": [
            {**asdict(row), "rates": list(row.rates), "outage": list(row.outage)}
            for row in store.get_metrics(run_id)
        ],
        "curves": curves,
    }
    return json.dumps(data, indent=2)
