"""Quantized steering-angle codebook and the map from actor outputs onto it."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from risdrl.errors import DomainError


@dataclass(frozen=True)
class PhaseCodebook:
    """Uniform grid {2*pi*i / 2^B}; ``bits=None`` means continuous phases."""
    bits: Optional[int]
    values: tuple[float, ...] = field(default=(), repr=False)

    @property
    def is_continuous(self) -> bool:
        return self.bits is None

    @property
    def size(self) -> float:
        return math.inf if self.bits is None else len(self.values)


def build_codebook(bits: Optional[int]) -> PhaseCodebook:
    if bits is None:
        return PhaseCodebook(bits=None)
    if bits < 1:
        raise DomainError(f"Codebook needs at least one bit, got {bits}")
    levels = 2 ** bits
    return PhaseCodebook(bits=bits, values=tuple(2 * np.pi * i / levels for i in range(levels)))


def bin_index(raw: float, count: int) -> int:
    """floor((raw + 1) / 2 * count) clamped to [0, count - 1]."""
    raw = min(max(float(raw), -1.0), 1.0)
    return min(max(int(np.floor((raw + 1.0) / 2.0 * count)), 0), count - 1)


def quantize_angle(raw: float, codebook: PhaseCodebook) -> float:
    """Map an actor output in [-1, 1] to an angle; out-of-range inputs clamp."""
    if codebook.is_continuous:
        return (min(max(float(raw), -1.0), 1.0) + 1.0) * np.pi
    return codebook.values[bin_index(raw, len(codebook.values))]


def angle_to_raw(angle: float, codebook: PhaseCodebook) -> float:
    """A raw value that quantizes back to ``angle`` (bin centre)."""
    if codebook.is_continuous:
        return angle / np.pi - 1.0
    levels = len(codebook.values)
    index = int(np.argmin(np.abs(np.asarray(codebook.values) - angle)))
    return (2.0 * index + 1.0) / levels - 1.0
