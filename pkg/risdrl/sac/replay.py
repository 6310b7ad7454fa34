"""FIFO experience replay memory."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np


@dataclass(slots=True)
class Transition:
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray


@dataclass
class Batch:
    states: np.ndarray          # (B, S)
    actions: np.ndarray         # (B, A)
    rewards: np.ndarray         # (B,)
    next_states: np.ndarray     # (B, S)

    def __len__(self) -> int:
        return len(self.rewards)

    @classmethod
    def from_transitions(cls, transitions: list[Transition]) -> "Batch":
        return cls(
            states=np.stack([t.state for t in transitions]),
            actions=np.stack([t.action for t in transitions]),
            rewards=np.array([t.reward for t in transitions], dtype=np.float64),
            next_states=np.stack([t.next_state for t in transitions]),
        )


class ReplayMemory:
    """Ring of transitions; once full, each insert replaces the oldest."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"Replay capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._next = 0

    def __len__(self) -> int:
        return len(self._items)

    def push(self, state, action, reward: float, next_state) -> None:
        item = Transition(
            state=np.asarray(state, dtype=np.float64).copy(),
            action=np.asarray(action, dtype=np.float64).copy(),
            reward=float(reward),
            next_state=np.asarray(next_state, dtype=np.float64).copy(),
        )
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._next] = item
        self._next = (self._next + 1) % self.capacity

    def __iter__(self) -> Iterator[Transition]:
        """Oldest to newest."""
        if len(self._items) < self.capacity:
            yield from self._items
        else:
            yield from self._items[self._next:]
            yield from self._items[:self._next]

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        """Uniform sample with replacement."""
        if len(self._items) == 0:
            raise ValueError("Cannot sample from an empty replay memory")
        indices = rng.integers(0, len(self._items), size=batch_size)
        return Batch.from_transitions([self._items[i] for i in indices])
