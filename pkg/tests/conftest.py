"""Shared fixtures: the desk-scale scenario and small learner settings."""
from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from risdrl.config import SacHyperparams
from risdrl.env.mdp import RisEnv
from risdrl.profiles import get_profile


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ci_profile():
    return get_profile("ci")


@pytest.fixture
def ci_config(ci_profile):
    return ci_profile.env


@pytest.fixture
def ci_env(ci_config):
    env = RisEnv(ci_config, seed=7)
    env.reset(seed=7)
    return env


@pytest.fixture
def short_config(ci_config):
    """CI scenario with short episodes."""
    return replace(ci_config, episodes=3, steps_per_episode=5)


@pytest.fixture
def tiny_hyper():
    return SacHyperparams(batch_size=4, hidden_sizes=(8, 8), warmup=8, buffer_size=1000,
                          learning_rate=1e-3, initial_alpha=0.5)


@pytest.fixture
def registry_dir(tmp_path, monkeypatch):
    """Isolate the run registry and the user config file."""
    db_dir = tmp_path / "db"
    monkeypatch.setenv("RISDRL_DB_DIR", str(db_dir))
    monkeypatch.delenv("RISDRL_SEED", raising=False)
    monkeypatch.setattr("risdrl.profiles.get_config_path", lambda: tmp_path / "no-user-config.toml")
    return db_dir


def numerical_gradient(loss, params, h: float = 1e-6) -> list[np.ndarray]:
    """Central differences of ``loss()`` w.r.t. each array in ``params`` (mutated in place)."""
    grads = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = p[idx]
            p[idx] = orig + h
            up = loss()
            p[idx] = orig - h
            down = loss()
            p[idx] = orig
            g[idx] = (up - down) / (2 * h)
        grads.append(g)
    return grads


def relative_error(analytic: list[np.ndarray], numeric: list[np.ndarray]) -> float:
    a = np.concatenate([np.ravel(x) for x in analytic])
    n = np.concatenate([np.ravel(x) for x in numeric])
    scale = max(np.linalg.norm(a), np.linalg.norm(n), 1e-12)
    return float(np.linalg.norm(a - n) / scale)
