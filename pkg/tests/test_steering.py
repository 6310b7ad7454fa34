from __future__ import annotations

import numpy as np
import pytest

from risdrl.channel.steering import steering_vector_ula, steering_vector_upa
from risdrl.errors import DimensionError


def test_ula_broadside_is_all_ones():
    np.testing.assert_allclose(steering_vector_ula(0.0, 5), np.ones(5))


def test_ula_has_unit_modulus_and_linear_phase():
    a = steering_vector_ula(0.3, 8)
    np.testing.assert_allclose(np.abs(a), 1.0)
    np.testing.assert_allclose(a[1], np.exp(1j * np.pi * np.sin(0.3)))
    np.testing.assert_allclose(a[3], np.exp(3j * np.pi * np.sin(0.3)))


def test_ula_rejects_empty_array():
    with pytest.raises(DimensionError):
        steering_vector_ula(0.1, 0)


def test_upa_flattens_with_horizontal_index_fastest():
    az, el, m_h, m_v = 0.4, -0.7, 3, 2
    a = steering_vector_upa(az, el, m_h, m_v)
    assert a.shape == (m_h * m_v,)
    for i_v in range(m_v):
        for i_h in range(m_h):
            expected = np.exp(1j * np.pi * (i_h * np.sin(az) + i_v * np.sin(el)))
            assert a[i_v * m_h + i_h] == pytest.approx(expected)


def test_upa_rejects_zero_dimension():
    with pytest.raises(DimensionError):
        steering_vector_upa(0.0, 0.0, 0, 4)
