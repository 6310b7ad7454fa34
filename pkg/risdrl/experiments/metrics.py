"""Result rows, outage probability and curve smoothing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from risdrl.errors import DomainError

METHODS = ("SAC", "RA", "NO_RIS", "ORACLE")


@dataclass(frozen=True)
class MetricsRow:
    method: str
    sweep_variable: str
    sweep_value: float
    seed: int
    sum_rate: float                 # mean over evaluation realizations, bps/Hz
    rates: tuple[float, ...]        # per-UE mean rates
    outage: tuple[float, ...]       # P_out at each point of the run's R_min grid

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"Unknown method '{self.method}'")
        if any(not 0.0 <= p <= 1.0 for p in self.outage):
            raise DomainError(f"Outage values must lie in [0, 1], got {self.outage}")


def outage_probability(mean_rates, r_min_grid: Sequence[float]) -> np.ndarray:
    """Fraction of (realization, UE) mean rates at or below each R_min.

    ``mean_rates`` is (K,) for one realization or (R, K) for several.
    """
    rates = np.atleast_2d(np.asarray(mean_rates, dtype=np.float64))
    if rates.size == 0:
        raise DomainError("Outage needs at least one realization")
    flat = rates.ravel()
    grid = np.asarray(r_min_grid, dtype=np.float64)
    return np.array([np.count_nonzero(flat <= r) / flat.size for r in grid])


def moving_average(values: Sequence[float], window: int) -> np.ndarray:
    """Trailing mean; the first window-1 points average what is available."""
    if window < 1:
        raise DomainError(f"window must be >= 1, got {window}")
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        return x
    csum = np.cumsum(np.insert(x, 0, 0.0))
    idx = np.arange(1, x.size + 1)
    start = np.maximum(idx - window, 0)
    return (csum[idx] - csum[start]) / (idx - start)


def head_tail_means(values: Sequence[float], fraction: float = 0.1) -> tuple[float, float]:
    """Means of the first and last ``fraction`` of a series (at least one point each)."""
    x = np.asarray(values, dtype=np.float64)
    x = x[np.isfinite(x)]
    if x.size == 0:
        raise DomainError("No finite values to average")
    n = max(1, int(round(fraction * x.size)))
    return float(x[:n].mean()), float(x[-n:].mean())
