"""Array responses for the BS uniform linear array and the RIS planar array.

Half-wavelength spacing throughout. Planar vectors are flattened with the
horizontal (azimuth) index running fastest: element ``i_v * m_h + i_h``.
"""
from __future__ import annotations

import numpy as np

from risdrl.errors import DimensionError


def steering_vector_ula(angle: float, n: int) -> np.ndarray:
    """[1, e^{j pi sin(angle)}, ..., e^{j pi (n-1) sin(angle)}]."""
    if n < 1:
        raise DimensionError(f"ULA needs at least one element, got {n}")
    return np.exp(1j * np.pi * np.arange(n) * np.sin(angle))


def steering_vector_upa(azimuth: float, elevation: float, m_h: int, m_v: int) -> np.ndarray:
    """Planar response a_el(elevation) ⊗ a_az(azimuth), length m_h * m_v."""
    if m_h < 1 or m_v < 1:
        raise DimensionError(f"UPA needs non-zero dimensions, got {m_h}x{m_v}")
    return np.kron(steering_vector_ula(elevation, m_v), steering_vector_ula(azimuth, m_h))
