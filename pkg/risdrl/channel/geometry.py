"""Node placement and path-loss parameter sets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from risdrl.errors import DomainError


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance path loss: kappa_a + 10*kappa_b*log10(d) + shadowing."""
    kappa_a: float      # dB
    kappa_b: float      # exponent
    sigma_c: float      # dB, shadowing std
    flavor: str = "NLOS"

    def __post_init__(self):
        if self.kappa_b <= 0:
            raise DomainError(f"kappa_b must be positive, got {self.kappa_b}")
        if self.sigma_c < 0:
            raise DomainError(f"sigma_c must be non-negative, got {self.sigma_c}")


NLOS_PARAMS = PathLossParams(kappa_a=72.0, kappa_b=2.92, sigma_c=8.7, flavor="NLOS")
LOS_PARAMS = PathLossParams(kappa_a=61.4, kappa_b=2.0, sigma_c=5.8, flavor="LOS")


@dataclass
class Scenario:
    """2D coordinates (meters) of every node for one realization."""
    bs_positions: np.ndarray        # (J, 2)
    ris_position: np.ndarray        # (2,)
    ue_region_center: np.ndarray    # (2,)
    ue_region_radius: float
    ue_positions: np.ndarray        # (K, 2)

    @property
    def num_bs(self) -> int:
        return len(self.bs_positions)

    @property
    def num_ue(self) -> int:
        return len(self.ue_positions)

    def bs_ris_distance(self, bs_index: int) -> float:
        return float(np.linalg.norm(self.ris_position - self.bs_positions[bs_index]))

    def ris_ue_distance(self, ue_index: int) -> float:
        return float(np.linalg.norm(self.ue_positions[ue_index] - self.ris_position))

    def bs_ue_distance(self, bs_index: int, ue_index: int) -> float:
        return float(np.linalg.norm(self.ue_positions[ue_index] - self.bs_positions[bs_index]))

    def nearest_bs(self, point: np.ndarray) -> int:
        """Index of the BS closest to ``point`` (lowest index on ties)."""
        dists = np.linalg.norm(self.bs_positions - point, axis=1)
        return int(np.argmin(dists))


def azimuth(src: np.ndarray, dst: np.ndarray) -> float:
    """Angle of the src->dst direction in the plane, radians."""
    d = np.asarray(dst, dtype=float) - np.asarray(src, dtype=float)
    return float(np.arctan2(d[1], d[0]))


def draw_ue_positions(center, radius: float, count: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Uniform points in a disc (sqrt-radius sampling)."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=count))
    t = rng.uniform(0.0, 2 * np.pi, size=count)
    center = np.asarray(center, dtype=float)
    return np.column_stack([center[0] + r * np.cos(t), center[1] + r * np.sin(t)])


def build_scenario(config, rng: np.random.Generator) -> Scenario:
    """Place BSs and RIS from config and draw the UE drop."""
    center = np.asarray(config.ue_region_center, dtype=float)
    return Scenario(
        bs_positions=np.asarray(config.bs_positions, dtype=float),
        ris_position=np.asarray(config.ris_position, dtype=float),
        ue_region_center=center,
        ue_region_radius=float(config.ue_region_radius),
        ue_positions=draw_ue_positions(center, config.ue_region_radius, config.num_ue, rng),
    )
