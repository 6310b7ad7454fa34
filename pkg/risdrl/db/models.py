"""Dataclasses for registry rows."""
from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Optional


@dataclass
class Run:
    id: int
    label: str
    kind: str
    created_at: str
    config_hash: str
    seed: Optional[int]
    output_dir: str
    row_count: int

    @property
    def created_datetime(self) -> datetime:
        return datetime.fromisoformat(self.created_at)

    @property
    def short_hash(self) -> str:
        return self.config_hash[:12]


@dataclass
class EpisodeRow:
    """One training-curve point as stored; NULL losses read back as nan."""
    run_id: int
    curve: str
    episode: int
    steps: int
    mean_reward: float
    critic1_loss: Optional[float]
    critic2_loss: Optional[float]
    policy_loss: Optional[float]
    alpha: float
    eval_reward: float

    def __post_init__(self):
        for name in ("critic1_loss", "critic2_loss", "policy_loss"):
            if getattr(self, name) is None:
                setattr(self, name, math.nan)
