"""RIS passive beamforming vector driven by two steering angles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from risdrl.errors import DimensionError


@dataclass
class RisState:
    theta: float        # azimuth steering, radians
    phi: float          # elevation steering, radians
    f: np.ndarray       # (M,)

    @property
    def Psi(self) -> np.ndarray:
        return np.diag(self.f)


def phase_vector(theta: float, phi: float, m_h: int, m_v: int,
                 unit_modulus: bool = False) -> np.ndarray:
    """Horizontal factor exp(-j pi cos(phi) sin(theta) i) times vertical exp(-j pi sin(phi) i).

    Flattened with the horizontal index fastest, the same element order as
    ``steering_vector_upa``. Normalized to unit total power unless
    ``unit_modulus`` is set, in which case every entry has modulus one.
    """
    if m_h < 1 or m_v < 1:
        raise DimensionError(f"RIS needs non-zero dimensions, got {m_h}x{m_v}")
    f_h = np.exp(-1j * np.pi * np.cos(phi) * np.sin(theta) * np.arange(m_h))
    f_v = np.exp(-1j * np.pi * np.sin(phi) * np.arange(m_v))
    if not unit_modulus:
        f_h = f_h / np.sqrt(m_h)
        f_v = f_v / np.sqrt(m_v)
    return np.kron(f_v, f_h)


def ris_state(theta: float, phi: float, m_h: int, m_v: int,
              unit_modulus: bool = False) -> RisState:
    return RisState(theta=theta, phi=phi, f=phase_vector(theta, phi, m_h, m_v, unit_modulus))
