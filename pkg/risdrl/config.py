"""Scenario, environment and learner settings."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import click

from risdrl.channel.geometry import LOS_PARAMS, NLOS_PARAMS, PathLossParams
from risdrl.errors import DomainError

DIRECT_LINK_MODES = ("nlos", "los", "blocked")

# Exhaustive search refuses to enumerate more than this many configurations
DEFAULT_ORACLE_BUDGET = 10**6
# No-RIS baseline enumerates associations up to this many, greedy beyond
NO_RIS_ENUM_LIMIT = 10**6


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def dbi_to_amplitude(dbi: float) -> float:
    """Antenna gain in dBi to a linear field-amplitude factor."""
    return 10.0 ** (dbi / 20.0)


@dataclass(frozen=True)
class NetworkConfig:
    """Single source of truth for one physical scenario."""
    bs_positions: tuple[tuple[float, float], ...] = ((0.0, 0.0), (200.0, 0.0), (0.0, 200.0))
    ris_position: tuple[float, float] = (50.0, 100.0)
    ue_region_center: tuple[float, float] = (150.0, 100.0)
    ue_region_radius: float = 30.0
    num_ue: int = 16
    num_antennas: int = 32
    ris_h: int = 8
    ris_v: int = 8
    num_paths: int = 5
    p_max_dbm: float = 30.0
    noise_dbm: float = -85.0
    xi_t_dbi: float = 9.82
    xi_r_dbi: float = 0.0
    nlos: PathLossParams = NLOS_PARAMS
    los: PathLossParams = LOS_PARAMS
    direct_link: str = "nlos"
    unit_modulus: bool = False
    strict_association: bool = False

    def __post_init__(self):
        if not self.bs_positions:
            raise DomainError("At least one BS position is required")
        for name in ("num_ue", "num_antennas", "ris_h", "ris_v"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.num_paths < 0:
            raise DomainError(f"num_paths must be >= 0, got {self.num_paths}")
        if self.direct_link not in DIRECT_LINK_MODES:
            raise DomainError(
                f"direct_link must be one of {', '.join(DIRECT_LINK_MODES)}, got {self.direct_link!r}"
            )

    @property
    def num_bs(self) -> int:
        return len(self.bs_positions)

    @property
    def num_ris(self) -> int:
        """M = M_h * M_v."""
        return self.ris_h * self.ris_v

    @property
    def p_max_watts(self) -> float:
        return dbm_to_watts(self.p_max_dbm)

    @property
    def noise_watts(self) -> float:
        return dbm_to_watts(self.noise_dbm)


@dataclass(frozen=True)
class EnvConfig:
    """Episode structure and reward shaping around a NetworkConfig."""
    network: NetworkConfig = field(default_factory=NetworkConfig)
    episodes: int = 500
    steps_per_episode: int = 100
    bits: Optional[int] = 2          # None -> continuous phases
    r_min: float = 0.0
    penalty_weight: float = 0.0
    resample_ue_positions: bool = True
    resample_channels: bool = True

    def __post_init__(self):
        if self.steps_per_episode < 1:
            raise DomainError(f"steps_per_episode must be >= 1, got {self.steps_per_episode}")
        if self.episodes < 0:
            raise DomainError(f"episodes must be >= 0, got {self.episodes}")
        if self.penalty_weight < 0:
            raise DomainError(f"penalty_weight must be >= 0, got {self.penalty_weight}")
        if self.bits is not None and self.bits < 1:
            raise DomainError(f"bits must be >= 1 or None (continuous), got {self.bits}")


@dataclass(frozen=True)
class SacHyperparams:
    """Learner settings."""
    gamma: float = 0.95
    tau: float = 0.005
    batch_size: int = 64
    learning_rate: float = 1e-4
    buffer_size: int = 1_000_000
    target_update_interval: int = 1
    gradient_steps: int = 1
    hidden_sizes: tuple[int, ...] = (256, 256)
    target_entropy: Optional[float] = None   # None -> -action_dim
    initial_alpha: float = 1.0
    warmup: int = 1000
    log_std_min: float = -20.0
    log_std_max: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"gamma must be in (0, 1), got {self.gamma}")
        if not 0.0 < self.tau <= 1.0:
            raise DomainError(f"tau must be in (0, 1], got {self.tau}")
        if self.batch_size < 1 or self.buffer_size < 1:
            raise DomainError("batch_size and buffer_size must be >= 1")
        if self.target_update_interval < 1 or self.gradient_steps < 1:
            raise DomainError("target_update_interval and gradient_steps must be >= 1")
        if self.warmup < 0:
            raise DomainError(f"warmup must be >= 0, got {self.warmup}")
        if self.initial_alpha <= 0:
            raise DomainError(f"initial_alpha must be positive, got {self.initial_alpha}")


def config_to_dict(obj) -> dict:
    """Plain-JSON view of any of the config dataclasses."""
    return json.loads(json.dumps(asdict(obj)))


def config_hash(*objs) -> str:
    """SHA-256 over the canonical JSON of the given configs."""
    payload = json.dumps([config_to_dict(o) for o in objs], sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def derive_db_path(profile_name: str) -> Path:
    """Run registry path for a profile. ``RISDRL_DB_DIR`` overrides the app dir."""
    base = os.environ.get("RISDRL_DB_DIR")
    db_dir = Path(base) if base else Path(click.get_app_dir("risdrl")) / "db"
    db_dir.mkdir(parents=True, exist_ok=True)
    return db_dir / f"{profile_name}.db"
