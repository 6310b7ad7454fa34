from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from risdrl.env.mdp import RisEnv, action_dim, decode_action, encode_action, state_dim
from risdrl.errors import DimensionError, ProtocolError
from risdrl.network.association import enumerate_associations
from risdrl.profiles import get_profile


def test_dimensions(ci_config):
    assert action_dim(ci_config) == 3 + 2
    assert state_dim(ci_config) == 2 + 2 * 2 * 2 * 4


def test_reset_state_is_normalized(ci_env):
    state = ci_env.reset()
    assert state.shape == (ci_env.state_dim,)
    assert not state[:2].any()
    features = np.abs(state[2:])
    assert features.max() > 0
    assert features.max() <= 1.0 + 1e-12


@pytest.mark.parametrize("profile", ["mid", "full"])
def test_channel_features_stay_bounded_under_any_action(profile):
    # shadowing can make a far BS the strongest link, so the nearest-BS
    # association at reset is not the worst case
    env = RisEnv(get_profile(profile).env, seed=3)
    rng = np.random.default_rng(3)
    num_ue = env.network.num_ue
    for _ in range(5):
        state = env.reset()
        assert np.abs(state[num_ue:]).max() <= 10.0
        for _ in range(20):
            state, _, _ = env.step(rng.uniform(-1.0, 1.0, env.action_dim))
            assert np.all(np.isfinite(state))
            assert np.abs(state[num_ue:]).max() <= 1.0 + 1e-12


def test_step_before_reset_is_refused(ci_config):
    with pytest.raises(ProtocolError):
        RisEnv(ci_config, seed=0).step(np.zeros(5))


def test_step_reports_rates_and_ends_episode(short_config):
    env = RisEnv(short_config, seed=3)
    env.reset(seed=3)
    for t in range(short_config.steps_per_episode):
        state, reward, done = env.step(np.zeros(env.action_dim))
        np.testing.assert_array_equal(state[:2], env.last_budget.rates)
        assert reward == pytest.approx(env.last_budget.sum_rate)
        assert done == (t == short_config.steps_per_episode - 1)
    with pytest.raises(ProtocolError):
        env.step(np.zeros(env.action_dim))


def test_fixed_realization_survives_reset(ci_env):
    before = ci_env.channels.h_d.copy()
    ci_env.reset()
    np.testing.assert_array_equal(ci_env.channels.h_d, before)


def test_resampling_draws_new_channels(ci_config):
    env = RisEnv(replace(ci_config, resample_channels=True), seed=1)
    env.reset(seed=1)
    before = env.channels.h_d.copy()
    env.reset()
    assert not np.array_equal(env.channels.h_d, before)


def test_decode_inverts_encode(ci_config):
    for theta in (0.0, np.pi):
        for phi in (0.0, np.pi):
            for assoc in enumerate_associations(2, 2):
                raw = encode_action(theta, phi, assoc, ci_config)
                decoded = decode_action(raw, ci_config)
                assert decoded.theta == theta and decoded.phi == phi
                assert decoded.assoc == assoc


def test_decode_rejects_wrong_length(ci_config):
    with pytest.raises(DimensionError):
        decode_action(np.zeros(4), ci_config)


def test_decode_clips_out_of_range_actions(ci_config):
    decoded = decode_action(np.array([9.0, -9.0, 9.0, -9.0, 9.0]), ci_config)
    assert decoded.theta == np.pi and decoded.phi == 0.0
    assert decoded.assoc.ris_bs == 1
    np.testing.assert_array_equal(decoded.assoc.ue_bs, [0, 1])


def test_strict_association_repairs_idle_bs(ci_config):
    strict = replace(ci_config, network=replace(ci_config.network, strict_association=True))
    env = RisEnv(strict, seed=5)
    env.reset(seed=5)
    decoded = env.decode(np.array([0.0, 0.0, -1.0, -1.0, -1.0]))
    assert sorted(decoded.assoc.ue_bs) == [0, 1]


def test_evaluate_action_does_not_advance(ci_env):
    ci_env.reset()
    reward, budget, decoded = ci_env.evaluate_action(np.zeros(ci_env.action_dim))
    _, step_reward, _ = ci_env.step(np.zeros(ci_env.action_dim))
    assert reward == step_reward
    assert budget.sum_rate == pytest.approx(reward)


def test_shortfall_penalty(ci_config):
    env = RisEnv(replace(ci_config, r_min=50.0, penalty_weight=0.5), seed=7)
    env.reset(seed=7)
    reward, budget, _ = env.evaluate_action(np.zeros(env.action_dim))
    assert reward == pytest.approx(budget.sum_rate - 0.5 * np.sum(50.0 - budget.rates))


def test_same_seed_same_trajectory(ci_config):
    actions = np.random.default_rng(0).uniform(-1, 1, size=(6, 5))

    def rollout():
        env = RisEnv(replace(ci_config, resample_channels=True, resample_ue_positions=True), seed=9)
        env.reset(seed=9)
        return [env.step(a)[1] for a in actions]

    assert rollout() == rollout()
