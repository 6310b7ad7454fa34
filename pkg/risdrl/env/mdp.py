"""Episodic MDP around the physical model.

Action: 3 + K values in [-1, 1] -> (theta, phi, RIS owner, UE servers).
State:  previous-step rates (K) followed by the real and imaginary parts of
        the zero-padded cascaded channels H_j (2 * J * K * N), the latter
        divided by the largest entry magnitude any configuration of the
        realization can reach, so they stay within [-1, 1].
Reward: sum-rate minus an optional QoS shortfall penalty.
Channels stay frozen within an episode.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from risdrl.channel.geometry import Scenario, build_scenario, draw_ue_positions
from risdrl.channel.models import ChannelSet, generate_channel_set
from risdrl.config import EnvConfig
from risdrl.errors import DimensionError, ProtocolError
from risdrl.network.association import AssociationMatrix, repair_association
from risdrl.network.link import LinkBudget, candidate_channels, evaluate_configuration
from risdrl.ris.codebook import PhaseCodebook, angle_to_raw, bin_index, build_codebook, quantize_angle
from risdrl.ris.phase import phase_vector

logger = logging.getLogger(__name__)


def action_dim(config: EnvConfig) -> int:
    return 3 + config.network.num_ue


def state_dim(config: EnvConfig) -> int:
    net = config.network
    return net.num_ue + 2 * net.num_bs * net.num_ue * net.num_antennas


@dataclass
class DecodedAction:
    theta: float
    phi: float
    assoc: AssociationMatrix


def decode_action(raw, config: EnvConfig, codebook: Optional[PhaseCodebook] = None,
                  channels: Optional[ChannelSet] = None) -> DecodedAction:
    """Bin a raw actor output into angles and an association.

    With ``strict_association`` set and channels given, idle BSs are
    repaired so every BS serves at least one UE.
    """
    net = config.network
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (action_dim(config),):
        raise DimensionError(f"Action has shape {raw.shape}, expected ({action_dim(config)},)")
    raw = np.clip(raw, -1.0, 1.0)
    codebook = codebook or build_codebook(config.bits)
    theta = quantize_angle(raw[0], codebook)
    phi = quantize_angle(raw[1], codebook)
    ris_bs = bin_index(raw[2], net.num_bs)
    ue_bs = [bin_index(value, net.num_bs) for value in raw[3:]]
    assoc = AssociationMatrix.from_indices(ris_bs, ue_bs, net.num_bs)
    if net.strict_association and channels is not None and net.num_ue >= net.num_bs:
        f = phase_vector(theta, phi, net.ris_h, net.ris_v, net.unit_modulus)
        norms = np.linalg.norm(candidate_channels(channels, f, assoc.c0), axis=2)
        assoc = repair_association(assoc, norms)
    return DecodedAction(theta=theta, phi=phi, assoc=assoc)


def encode_action(theta: float, phi: float, assoc: AssociationMatrix, config: EnvConfig,
                  codebook: Optional[PhaseCodebook] = None) -> np.ndarray:
    """A raw action that decodes (without repair) to the given configuration."""
    num_bs = config.network.num_bs
    codebook = codebook or build_codebook(config.bits)

    def bs_raw(index: int) -> float:
        return (2.0 * index + 1.0) / num_bs - 1.0

    return np.array(
        [angle_to_raw(theta, codebook), angle_to_raw(phi, codebook), bs_raw(assoc.ris_bs or 0)]
        + [bs_raw(int(j)) for j in assoc.ue_bs]
    )


class RisEnv:
    """Single-threaded environment; one instance per RNG stream."""

    def __init__(self, config: EnvConfig, seed: Optional[int] = None):
        self.config = config
        self.network = config.network
        self.codebook = build_codebook(config.bits)
        self._rng = np.random.default_rng(seed)
        self.scenario: Optional[Scenario] = None
        self.channels: Optional[ChannelSet] = None
        self.normalization_scale = 1.0
        self.rates = np.zeros(self.network.num_ue)
        self.last_budget: Optional[LinkBudget] = None
        self.last_decoded: Optional[DecodedAction] = None
        self._t = 0
        self._done = True

    @property
    def action_dim(self) -> int:
        return action_dim(self.config)

    @property
    def state_dim(self) -> int:
        return state_dim(self.config)

    @property
    def done(self) -> bool:
        return self._done

    # -- Episode protocol --

    def reset(self, seed: Optional[int] = None) -> np.ndarray:
        """Start an episode; redraw the realization as configured."""
        fresh = seed is not None
        if fresh:
            self._rng = np.random.default_rng(seed)
        if self.scenario is None or fresh:
            self.scenario = build_scenario(self.network, self._rng)
            self.channels = None
        elif self.config.resample_ue_positions:
            self.scenario.ue_positions = draw_ue_positions(
                self.scenario.ue_region_center, self.scenario.ue_region_radius,
                self.network.num_ue, self._rng)
            self.channels = None
        if self.channels is None or self.config.resample_channels:
            self.channels = generate_channel_set(self.network, self.scenario, self._rng)
        return self.reset_episode()

    def reset_episode(self) -> np.ndarray:
        """Restart the episode on the current realization without redrawing it."""
        if self.channels is None:
            raise ProtocolError("No channel realization yet; call reset() first")
        assoc = self.default_association()
        budget = self.evaluate(0.0, 0.0, assoc)
        raw = self._raw_features(budget.equivalent_channels)
        self.normalization_scale = self._feature_bound()
        self.rates = np.zeros(self.network.num_ue)
        self._t = 0
        self._done = False
        return np.concatenate([self.rates, raw / self.normalization_scale])

    def step(self, action) -> tuple[np.ndarray, float, bool]:
        if self._done:
            raise ProtocolError("step() called on a finished episode; call reset() first")
        reward, budget, decoded = self.evaluate_action(action)
        self.last_budget = budget
        self.last_decoded = decoded
        self.rates = budget.rates.copy()
        self._t += 1
        self._done = self._t >= self.config.steps_per_episode
        state = np.concatenate([self.rates, self._raw_features(budget.equivalent_channels)
                                / self.normalization_scale])
        return state, reward, self._done

    # -- Evaluation without advancing the episode --

    def decode(self, action) -> DecodedAction:
        return decode_action(action, self.config, self.codebook, self.channels)

    def evaluate(self, theta: float, phi: float, assoc: AssociationMatrix,
                 ris_enabled: bool = True) -> LinkBudget:
        if self.channels is None:
            raise ProtocolError("No channel realization yet; call reset() first")
        net = self.network
        channels = self.channels if ris_enabled else self.channels.without_ris()
        f = phase_vector(theta, phi, net.ris_h, net.ris_v, net.unit_modulus)
        return evaluate_configuration(channels, f, assoc, net.p_max_watts, net.noise_watts)

    def reward(self, budget: LinkBudget) -> float:
        shortfall = np.maximum(0.0, self.config.r_min - budget.rates).sum()
        return budget.sum_rate - self.config.penalty_weight * float(shortfall)

    def evaluate_action(self, action) -> tuple[float, LinkBudget, DecodedAction]:
        decoded = self.decode(action)
        budget = self.evaluate(decoded.theta, decoded.phi, decoded.assoc)
        return self.reward(budget), budget, decoded

    def default_association(self) -> AssociationMatrix:
        """Every UE and the RIS on their nearest BS."""
        sc = self.scenario
        ue_bs = [sc.nearest_bs(p) for p in sc.ue_positions]
        return AssociationMatrix.from_indices(sc.nearest_bs(sc.ris_position), ue_bs, sc.num_bs)

    def _feature_bound(self) -> float:
        """Peak |h_d| + sum_m |h_r| |f_m| |G| over every (j, k, n).

        |f_m| does not depend on the angles, so this bounds each entry of
        h~_{j,k} under any association and RIS setting.
        """
        ch, net = self.channels, self.network
        f_mod = np.abs(phase_vector(0.0, 0.0, net.ris_h, net.ris_v, net.unit_modulus))
        reflected = np.einsum("jkm,jmn->jkn", np.abs(ch.h_r) * f_mod, np.abs(ch.G))
        peak = float(np.max(np.abs(ch.h_d) + reflected))
        return peak if peak > 0 else 1.0

    def _raw_features(self, h_eq: np.ndarray) -> np.ndarray:
        # H_j columns are h~_{j,k}^H; unserved columns are already zero
        cascaded = np.conj(h_eq).transpose(0, 2, 1)
        return np.concatenate([cascaded.real.ravel(), cascaded.imag.ravel()])
