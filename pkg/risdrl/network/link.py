"""Equivalent channels, ZF precoding, SINR and rates for one configuration."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from risdrl.channel.models import ChannelSet
from risdrl.errors import DimensionError, SingularChannelError
from risdrl.network.association import AssociationMatrix

logger = logging.getLogger(__name__)

# Relative Tikhonov load for rank-deficient stacked channels
_REGULARIZATION = 1e-9


@dataclass
class LinkBudget:
    equivalent_channels: np.ndarray     # (J, K, N) rows h~_{j,k}
    precoders: list[np.ndarray]         # per BS, (N, |Q_j|)
    served: list[np.ndarray]            # per BS, Q_j
    sinr: np.ndarray                    # (J, K)
    rates: np.ndarray                   # (K,) bps/Hz
    sum_rate: float
    noise_power: float                  # watts
    power_budget: np.ndarray = field(default_factory=lambda: np.zeros(0))  # (J,) watts

    def transmit_powers(self) -> np.ndarray:
        """sum_k ||w_{j,k}||^2 per BS."""
        return np.array([float(np.sum(np.abs(W) ** 2)) for W in self.precoders])


def _as_diagonal(Psi: np.ndarray) -> np.ndarray:
    Psi = np.asarray(Psi)
    return np.diag(Psi) if Psi.ndim == 2 else Psi


def equivalent_channel(h_d: np.ndarray, h_r: np.ndarray, G: np.ndarray, Psi: np.ndarray,
                       c_jk: int, c_j0: int) -> np.ndarray:
    """c_jk * (h_d^H + c_j0 * h_r^H Psi G), a length-N row.

    ``Psi`` may be the M x M diagonal matrix or its diagonal.
    """
    f = _as_diagonal(Psi)
    num_ris, num_antennas = G.shape
    if h_d.shape != (num_antennas,) or h_r.shape != (num_ris,) or f.shape != (num_ris,):
        raise DimensionError(
            f"h_d {h_d.shape}, h_r {h_r.shape}, Psi {np.shape(Psi)} do not match G {G.shape}"
        )
    if not c_jk:
        return np.zeros(num_antennas, dtype=complex)
    row = h_d.conj().astype(complex)
    if c_j0:
        row = row + (h_r.conj() * f) @ G
    return row


def candidate_channels(channels: ChannelSet, f: np.ndarray, c0: np.ndarray) -> np.ndarray:
    """Unmasked h_d^H + c_j0 h_r^H Psi G for every (j, k), shape (J, K, N)."""
    reflected = np.einsum("jkm,jmn->jkn", channels.h_r.conj() * f, channels.G)
    return channels.h_d.conj() + c0[:, None, None] * reflected


def equivalent_channels(channels: ChannelSet, f: np.ndarray, assoc: AssociationMatrix) -> np.ndarray:
    """h~_{j,k} for all pairs, zero where c_jk = 0."""
    return candidate_channels(channels, f, assoc.c0) * assoc.c[:, :, None]


def zf_precoder(H: np.ndarray, total_power: float) -> np.ndarray:
    """sqrt(P) * H (H^H H)^{-1}, rescaled to Frobenius norm^2 == P.

    H is N x Q with conjugated user channels as columns.
    """
    num_antennas, num_users = H.shape
    if num_users == 0:
        return np.zeros((num_antennas, 0), dtype=complex)
    if num_users > num_antennas or np.linalg.matrix_rank(H) < num_users:
        raise SingularChannelError(
            f"Stacked channel {H.shape} is not full column rank"
        )
    gram = H.conj().T @ H
    W0 = np.linalg.solve(gram.T, H.T).T
    return np.sqrt(total_power) * W0 / np.linalg.norm(W0)


def regularized_zf_precoder(H: np.ndarray, total_power: float) -> np.ndarray:
    """ZF with (H^H H + eps I)^{-1}, eps = 1e-9 * trace(H^H H) / Q."""
    num_antennas, num_users = H.shape
    gram = H.conj().T @ H
    load = _REGULARIZATION * float(np.trace(gram).real) / max(num_users, 1)
    if load == 0.0:
        return np.zeros((num_antennas, num_users), dtype=complex)
    W0 = np.linalg.solve((gram + load * np.eye(num_users)).T, H.T).T
    norm = np.linalg.norm(W0)
    if norm == 0.0:
        return np.zeros((num_antennas, num_users), dtype=complex)
    return np.sqrt(total_power) * W0 / norm


def precode(H: np.ndarray, total_power: float) -> np.ndarray:
    try:
        return zf_precoder(H, total_power)
    except SingularChannelError:
        logger.debug("Rank-deficient channel %s, using regularized ZF", H.shape)
        return regularized_zf_precoder(H, total_power)


def compute_sinr(h_eq: np.ndarray, precoders: list[np.ndarray], served: list[np.ndarray],
                 noise_power: float) -> np.ndarray:
    """gamma_{j,k} = |h~ w_k|^2 / (sum_{i != k in Q_j} |h~ w_i|^2 + sigma^2)."""
    num_bs, num_ue, _ = h_eq.shape
    sinr = np.zeros((num_bs, num_ue))
    for j in range(num_bs):
        users = served[j]
        if len(users) == 0:
            continue
        gains = np.abs(h_eq[j, users] @ precoders[j]) ** 2
        signal = np.diag(gains)
        interference = gains.sum(axis=1) - signal
        sinr[j, users] = signal / (interference + noise_power)
    return sinr


def sum_rate(sinr: np.ndarray) -> tuple[np.ndarray, float]:
    """Per-UE rates R_k = sum_j log2(1 + gamma_{j,k}) and their total."""
    rates = np.log2(1.0 + sinr).sum(axis=0)
    return rates, float(rates.sum())


def evaluate_configuration(channels: ChannelSet, f: np.ndarray, assoc: AssociationMatrix,
                           p_max_watts: float, noise_watts: float) -> LinkBudget:
    """Full link budget for one RIS phase vector and association."""
    h_eq = equivalent_channels(channels, f, assoc)
    served = [assoc.served_by(j) for j in range(assoc.num_bs)]
    precoders = [precode(h_eq[j, users].conj().T, p_max_watts) for j, users in enumerate(served)]
    sinr = compute_sinr(h_eq, precoders, served, noise_watts)
    rates, total = sum_rate(sinr)
    return LinkBudget(
        equivalent_channels=h_eq,
        precoders=precoders,
        served=served,
        sinr=sinr,
        rates=rates,
        sum_rate=total,
        noise_power=noise_watts,
        power_budget=np.full(assoc.num_bs, p_max_watts),
    )
