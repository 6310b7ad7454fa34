from __future__ import annotations

import numpy as np
import pytest

from risdrl.channel.models import ChannelSet
from risdrl.errors import SingularChannelError
from risdrl.network.association import AssociationMatrix, enumerate_associations
from risdrl.network.link import (
    candidate_channels,
    compute_sinr,
    equivalent_channel,
    evaluate_configuration,
    precode,
    regularized_zf_precoder,
    sum_rate,
    zf_precoder,
)
from risdrl.ris.phase import phase_vector


def _complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_zf_nulls_intra_cell_interference(rng):
    for _ in range(200):
        n = int(rng.integers(1, 9))
        q = int(rng.integers(1, n + 1))
        H = _complex(rng, n, q)
        power = float(rng.uniform(0.1, 10.0))
        W = zf_precoder(H, power)
        gains = H.conj().T @ W
        off = gains - np.diag(np.diag(gains))
        assert np.max(np.abs(off), initial=0.0) < 1e-9 * np.linalg.norm(H) * np.linalg.norm(W)
        assert np.linalg.norm(W) ** 2 == pytest.approx(power, rel=1e-9)


def test_zf_rejects_more_users_than_antennas(rng):
    with pytest.raises(SingularChannelError):
        zf_precoder(_complex(rng, 2, 3), 1.0)


def test_rank_deficient_channel_falls_back_to_regularized_zf(rng):
    h = _complex(rng, 4, 1)
    H = np.hstack([h, h])
    with pytest.raises(SingularChannelError):
        zf_precoder(H, 1.0)
    W = precode(H, 2.0)
    assert np.all(np.isfinite(W))
    assert np.linalg.norm(W) ** 2 == pytest.approx(2.0)


def test_zero_channel_gives_zero_precoder():
    assert not regularized_zf_precoder(np.zeros((3, 2), dtype=complex), 1.0).any()


def test_no_users_gives_empty_precoder():
    assert zf_precoder(np.zeros((4, 0), dtype=complex), 1.0).shape == (4, 0)


def test_sum_rate_formula():
    rates, total = sum_rate(np.array([[1.0, 0.0], [0.0, 3.0]]))
    np.testing.assert_allclose(rates, [1.0, 2.0])
    assert total == pytest.approx(3.0)


def test_single_pair_channel_agrees_with_batched(rng):
    channels = ChannelSet(G=_complex(rng, 2, 4, 3), h_r=_complex(rng, 2, 3, 4), h_d=_complex(rng, 2, 3, 3))
    f = phase_vector(0.5, 1.1, 2, 2)
    c0 = np.array([0, 1])
    batched = candidate_channels(channels, f, c0)
    for j in range(2):
        for k in range(3):
            row = equivalent_channel(channels.h_d[j, k], channels.h_r[j, k], channels.G[j], np.diag(f), 1, c0[j])
            np.testing.assert_allclose(row, batched[j, k])
    assert not equivalent_channel(channels.h_d[0, 0], channels.h_r[0, 0], channels.G[0], f, 0, 1).any()


def _scalar_loop_rates(channels, f, assoc, power, noise):
    """Direct evaluation of the equivalent channel, ZF and SINR with explicit loops."""
    num_bs, num_ue, num_ris, num_antennas = channels.shape
    rows = np.zeros((num_bs, num_ue, num_antennas), dtype=complex)
    for j in range(num_bs):
        for k in range(num_ue):
            if not assoc.c[j, k]:
                continue
            for n in range(num_antennas):
                value = np.conj(channels.h_d[j, k, n])
                if assoc.c0[j]:
                    for m in range(num_ris):
                        value += np.conj(channels.h_r[j, k, m]) * f[m] * channels.G[j, m, n]
                rows[j, k, n] = value
    rates = np.zeros(num_ue)
    for j in range(num_bs):
        users = [k for k in range(num_ue) if assoc.c[j, k]]
        if not users:
            continue
        W0 = np.linalg.pinv(rows[j, users])
        W = np.sqrt(power) * W0 / np.linalg.norm(W0)
        for a, k in enumerate(users):
            signal = abs(rows[j, k] @ W[:, a]) ** 2
            interference = sum(abs(rows[j, k] @ W[:, b]) ** 2 for b in range(len(users)) if b != a)
            rates[k] += np.log2(1 + signal / (interference + noise))
    return rates


def test_rates_match_scalar_loop_on_every_oracle_configuration(ci_env):
    net = ci_env.network
    checked = 0
    for theta in ci_env.codebook.values:
        for phi in ci_env.codebook.values:
            f = phase_vector(theta, phi, net.ris_h, net.ris_v)
            for assoc in enumerate_associations(net.num_bs, net.num_ue):
                budget = evaluate_configuration(ci_env.channels, f, assoc, net.p_max_watts, net.noise_watts)
                expected = _scalar_loop_rates(ci_env.channels, f, assoc, net.p_max_watts, net.noise_watts)
                np.testing.assert_allclose(budget.rates, expected, rtol=1e-10, atol=1e-14)
                checked += 1
    assert checked == 32


def test_transmit_power_meets_budget(ci_env):
    net = ci_env.network
    assoc = AssociationMatrix.from_indices(0, [0, 1], 2)
    budget = evaluate_configuration(ci_env.channels, phase_vector(0, 0, 2, 2), assoc,
                                    net.p_max_watts, net.noise_watts)
    np.testing.assert_allclose(budget.transmit_powers(), net.p_max_watts, rtol=1e-9)
    assert budget.sum_rate == pytest.approx(budget.rates.sum())


def test_more_power_never_lowers_rates(ci_env):
    net = ci_env.network
    assoc = AssociationMatrix.from_indices(1, [0, 0], 2)
    f = phase_vector(np.pi, 0.0, 2, 2)
    low = evaluate_configuration(ci_env.channels, f, assoc, 0.1, net.noise_watts)
    high = evaluate_configuration(ci_env.channels, f, assoc, 1.0, net.noise_watts)
    assert np.all(high.rates >= low.rates)


def test_compute_sinr_hand_example():
    # BS-0 serves UEs 0 and 1 with identity precoders, BS-1 serves nobody
    h_eq = np.zeros((2, 2, 2), dtype=complex)
    h_eq[0] = [[2.0, 1.0], [0.0, 1.0]]
    precoders = [np.eye(2), np.zeros((2, 0))]
    served = [np.array([0, 1]), np.array([], dtype=int)]
    sinr = compute_sinr(h_eq, precoders, served, noise_power=1.0)
    np.testing.assert_allclose(sinr[0], [4.0 / 2.0, 1.0 / 1.0])
    np.testing.assert_array_equal(sinr[1], [0.0, 0.0])
