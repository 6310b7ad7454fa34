"""Random channel realizations: BS->RIS, RIS->UE and BS->UE links.

The BS->RIS link follows a Saleh-Valenzuela sum of L+1 rank-one paths. Path 0
is the line-of-sight path and uses the LOS loss parameters with geometric
angles; paths 1..L are NLOS with angles drawn uniformly on [-pi/2, pi/2].
RIS->UE and BS->UE links are single-path with antenna gains applied.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from risdrl.channel.geometry import PathLossParams, Scenario, azimuth
from risdrl.channel.steering import steering_vector_ula, steering_vector_upa
from risdrl.config import NetworkConfig, dbi_to_amplitude
from risdrl.errors import DimensionError, DomainError

_HALF_PI = np.pi / 2


@dataclass
class ChannelSet:
    """All channels of one coherence block.

    G:   (J, M, N)  BS-j -> RIS
    h_r: (J, K, M)  RIS -> UE-k (identical across j)
    h_d: (J, K, N)  BS-j -> UE-k
    """
    G: np.ndarray
    h_r: np.ndarray
    h_d: np.ndarray

    @property
    def shape(self) -> tuple[int, int, int, int]:
        """(J, K, M, N)."""
        num_bs, num_ris, num_antennas = self.G.shape
        return num_bs, self.h_r.shape[1], num_ris, num_antennas

    def validate(self) -> None:
        num_bs, num_ue, num_ris, num_antennas = self.shape
        if self.h_r.shape != (num_bs, num_ue, num_ris):
            raise DimensionError(f"h_r has shape {self.h_r.shape}, expected {(num_bs, num_ue, num_ris)}")
        if self.h_d.shape != (num_bs, num_ue, num_antennas):
            raise DimensionError(f"h_d has shape {self.h_d.shape}, expected {(num_bs, num_ue, num_antennas)}")
        for name in ("G", "h_r", "h_d"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise DomainError(f"Channel {name} has non-finite entries")

    def without_ris(self) -> "ChannelSet":
        """Copy with the reflected path removed."""
        return ChannelSet(G=np.zeros_like(self.G), h_r=np.zeros_like(self.h_r), h_d=self.h_d.copy())


def path_loss_db(distance: float, params: PathLossParams, shadowing_draw: float = 0.0) -> float:
    """kappa_a + 10 kappa_b log10(d) + shadowing, in dB."""
    if distance <= 0:
        raise DomainError(f"Path loss needs a positive distance, got {distance}")
    return params.kappa_a + 10.0 * params.kappa_b * np.log10(distance) + shadowing_draw


def draw_complex_gain(loss_db: float, rng: np.random.Generator) -> complex:
    """CN(0, 10^(-loss/10)) sample; always consumes two normals."""
    re, im = rng.standard_normal(2)
    variance = 0.0 if np.isposinf(loss_db) else 10.0 ** (-0.1 * loss_db)
    return complex(re, im) * np.sqrt(variance / 2.0)


def _draw_gain(distance: float, params: PathLossParams, rng: np.random.Generator) -> complex:
    shadow = rng.normal(0.0, params.sigma_c) if params.sigma_c > 0 else 0.0
    return draw_complex_gain(path_loss_db(distance, params, shadow), rng)


def bs_ris_channel_from_paths(gains, aoa_azimuths, aoa_elevations, aods,
                              m_h: int, m_v: int, n: int) -> np.ndarray:
    """Sum over paths of alpha * conj(a_M(aoa)) a_N(aod)^T, shape (m_h*m_v, n)."""
    G = np.zeros((m_h * m_v, n), dtype=complex)
    for alpha, az, el, aod in zip(gains, aoa_azimuths, aoa_elevations, aods):
        a_m = steering_vector_upa(az, el, m_h, m_v)
        a_n = steering_vector_ula(aod, n)
        G += alpha * np.outer(a_m.conj(), a_n)
    return G


def ris_ue_channel_from_gain(alpha: complex, xi_t_dbi: float, xi_r_dbi: float,
                             az: float, el: float, m_h: int, m_v: int) -> np.ndarray:
    amplitude = dbi_to_amplitude(xi_t_dbi) * dbi_to_amplitude(xi_r_dbi)
    return alpha * amplitude * steering_vector_upa(az, el, m_h, m_v)


def direct_channel_from_gain(alpha: complex, xi_t_dbi: float, xi_r_dbi: float,
                             aod: float, n: int) -> np.ndarray:
    amplitude = dbi_to_amplitude(xi_t_dbi) * dbi_to_amplitude(xi_r_dbi)
    return alpha * amplitude * steering_vector_ula(aod, n)


def generate_bs_ris_channel(config: NetworkConfig, scenario: Scenario, bs_index: int,
                            rng: np.random.Generator) -> np.ndarray:
    """G_j, shape (M, N)."""
    distance = scenario.bs_ris_distance(bs_index)
    bs = scenario.bs_positions[bs_index]
    ris = scenario.ris_position
    gains, aoa_az, aoa_el, aods = [], [], [], []
    for path in range(config.num_paths + 1):
        if path == 0:
            gains.append(_draw_gain(distance, config.los, rng))
            aoa_az.append(azimuth(ris, bs))
            aoa_el.append(rng.uniform(-_HALF_PI, _HALF_PI))
            aods.append(azimuth(bs, ris))
        else:
            gains.append(_draw_gain(distance, config.nlos, rng))
            aoa_az.append(rng.uniform(-_HALF_PI, _HALF_PI))
            aoa_el.append(rng.uniform(-_HALF_PI, _HALF_PI))
            aods.append(rng.uniform(-_HALF_PI, _HALF_PI))
    return bs_ris_channel_from_paths(gains, aoa_az, aoa_el, aods,
                                     config.ris_h, config.ris_v, config.num_antennas)


def generate_ris_ue_channel(config: NetworkConfig, scenario: Scenario, ue_index: int,
                            rng: np.random.Generator) -> np.ndarray:
    """h_r for UE-k, shape (M,)."""
    if not 0 <= ue_index < scenario.num_ue:
        raise DimensionError(f"UE index {ue_index} out of range for {scenario.num_ue} UEs")
    alpha = _draw_gain(scenario.ris_ue_distance(ue_index), config.los, rng)
    az = azimuth(scenario.ris_position, scenario.ue_positions[ue_index])
    el = rng.uniform(-_HALF_PI, _HALF_PI)
    return ris_ue_channel_from_gain(alpha, config.xi_t_dbi, config.xi_r_dbi,
                                    az, el, config.ris_h, config.ris_v)


def generate_direct_channel(config: NetworkConfig, scenario: Scenario, bs_index: int,
                            ue_index: int, rng: np.random.Generator) -> np.ndarray:
    """h_d for (BS-j, UE-k), shape (N,). Zero in blocked mode."""
    if config.direct_link == "blocked":
        return np.zeros(config.num_antennas, dtype=complex)
    params = config.los if config.direct_link == "los" else config.nlos
    alpha = _draw_gain(scenario.bs_ue_distance(bs_index, ue_index), params, rng)
    aod = azimuth(scenario.bs_positions[bs_index], scenario.ue_positions[ue_index])
    return direct_channel_from_gain(alpha, config.xi_t_dbi, config.xi_r_dbi,
                                    aod, config.num_antennas)


def generate_channel_set(config: NetworkConfig, scenario: Scenario,
                         rng: np.random.Generator) -> ChannelSet:
    """Draw every link of the scenario in a fixed order."""
    num_bs, num_ue = config.num_bs, config.num_ue
    G = np.stack([generate_bs_ris_channel(config, scenario, j, rng) for j in range(num_bs)])
    h_r_ue = np.stack([generate_ris_ue_channel(config, scenario, k, rng) for k in range(num_ue)])
    h_r = np.broadcast_to(h_r_ue, (num_bs, num_ue, config.num_ris)).copy()
    h_d = np.stack([
        np.stack([generate_direct_channel(config, scenario, j, k, rng) for k in range(num_ue)])
        for j in range(num_bs)
    ])
    channels = ChannelSet(G=G, h_r=h_r, h_d=h_d)
    channels.validate()
    return channels
