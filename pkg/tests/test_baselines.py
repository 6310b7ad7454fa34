from __future__ import annotations

import itertools
from dataclasses import replace

import numpy as np
import pytest

from risdrl.config import EnvConfig, NetworkConfig
from risdrl.env.mdp import RisEnv
from risdrl.errors import BudgetExceededError, DomainError, ProtocolError
from risdrl.experiments.baselines import (
    baseline_no_ris,
    baseline_random_association,
    exhaustive_search,
    greedy_association,
    oracle_size,
)
from risdrl.network.association import AssociationMatrix, enumerate_associations


def _env(config, seed=7):
    env = RisEnv(config, seed=seed)
    env.reset(seed=seed)
    return env


def test_oracle_covers_every_configuration(ci_env):
    assert oracle_size(ci_env) == 2 ** 2 * 2 * 2 ** 2
    found = exhaustive_search(ci_env)
    assert found.evaluated == 32
    assert found.reward == pytest.approx(found.budget.sum_rate)


def test_oracle_beats_every_random_trial(ci_env):
    found = exhaustive_search(ci_env)
    ra = baseline_random_association(ci_env, np.random.default_rng(3), trials=200)
    assert np.all(ra.rewards <= found.reward)
    assert ra.trials == 200


def test_oracle_on_hand_sized_problem():
    net = NetworkConfig(bs_positions=((0.0, 0.0),), num_ue=1, num_antennas=2, ris_h=2, ris_v=1)
    env = _env(EnvConfig(network=net, bits=1, resample_ue_positions=False, resample_channels=False))
    found = exhaustive_search(env)
    assert found.evaluated == 4
    assoc = AssociationMatrix.from_indices(0, [0], 1)
    manual = max(env.reward(env.evaluate(t, p, assoc)) for t in (0.0, np.pi) for p in (0.0, np.pi))
    assert found.reward == manual


def test_oracle_respects_budget(ci_env):
    with pytest.raises(BudgetExceededError) as excinfo:
        exhaustive_search(ci_env, budget=31)
    assert excinfo.value.required == 32


def test_oracle_refuses_continuous_codebook(ci_config):
    env = _env(replace(ci_config, bits=None))
    with pytest.raises(DomainError):
        exhaustive_search(env)


def test_oracle_needs_channels(ci_config):
    with pytest.raises(ProtocolError):
        exhaustive_search(RisEnv(ci_config))


def test_oracle_never_drops_with_more_bits(ci_config):
    rewards = [exhaustive_search(_env(replace(ci_config, bits=b))).reward for b in (1, 2, 3)]
    assert rewards == sorted(rewards)


def test_strict_oracle_only_considers_full_associations(ci_env):
    found = exhaustive_search(ci_env, strict=True)
    assert found.evaluated == 2 ** 2 * 2 * 2
    assert sorted(found.assoc.ue_bs) == [0, 1]


def test_no_ris_matches_brute_force(ci_env):
    found = baseline_no_ris(ci_env)
    brute = max(
        ci_env.reward(ci_env.evaluate(0.0, 0.0, a, ris_enabled=False))
        for a in enumerate_associations(2, 2, with_ris=False)
    )
    assert found.reward == brute
    assert found.evaluated == 4
    assert found.assoc.ris_bs is None


def test_no_ris_with_single_bs(ci_config):
    net = replace(ci_config.network, bs_positions=((0.0, 0.0),))
    env = _env(replace(ci_config, network=net))
    expected = env.reward(env.evaluate(0.0, 0.0, AssociationMatrix.from_indices(None, [0, 0], 1),
                                       ris_enabled=False))
    assert baseline_no_ris(env).reward == expected


def test_greedy_picks_strongest_direct_link(ci_env):
    assoc = greedy_association(ci_env)
    norms = np.linalg.norm(ci_env.channels.h_d, axis=2)
    np.testing.assert_array_equal(assoc.ue_bs, np.argmax(norms, axis=0))


def test_random_association_is_reproducible(ci_env):
    a = baseline_random_association(ci_env, np.random.default_rng(9), trials=50)
    b = baseline_random_association(ci_env, np.random.default_rng(9), trials=50)
    np.testing.assert_array_equal(a.rewards, b.rewards)
    assert a.mean_reward == pytest.approx(np.mean(a.rewards))
    assert a.mean_rates.shape == (2,)


def test_random_association_rejects_zero_trials(ci_env):
    with pytest.raises(DomainError):
        baseline_random_association(ci_env, np.random.default_rng(0), trials=0)


def test_random_association_draws_codebook_angles(ci_env, monkeypatch):
    seen = []
    original = ci_env.evaluate

    def spy(theta, phi, assoc, ris_enabled=True):
        seen.append((theta, phi))
        return original(theta, phi, assoc, ris_enabled)

    monkeypatch.setattr(ci_env, "evaluate", spy)
    baseline_random_association(ci_env, np.random.default_rng(1), trials=40)
    assert set(itertools.chain.from_iterable(seen)) <= {0.0, np.pi}
