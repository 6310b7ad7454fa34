"""Adam optimizer and Polyak averaging over lists of parameter arrays."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from risdrl.errors import DimensionError


@dataclass
class AdamState:
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_params(cls, params: Sequence[np.ndarray], learning_rate: float = 1e-4, **kwargs) -> "AdamState":
        return cls(
            learning_rate=learning_rate,
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
            **kwargs,
        )


def adam_step(state: AdamState, params: Sequence[np.ndarray],
              gradients: Sequence[np.ndarray]) -> Sequence[np.ndarray]:
    """Bias-corrected Adam update, applied in place."""
    if len(params) != len(gradients) or len(params) != len(state.m):
        raise DimensionError("Parameter, gradient and moment lists differ in length")
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    for p, g, m, v in zip(params, gradients, state.m, state.v):
        if p.shape != np.shape(g):
            raise DimensionError(f"Gradient shape {np.shape(g)} does not match {p.shape}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * np.square(g)
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        p -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return params


def soft_update(target_params: Sequence[np.ndarray], online_params: Sequence[np.ndarray],
                tau: float) -> Sequence[np.ndarray]:
    """target <- tau * online + (1 - tau) * target, in place."""
    for target, online in zip(target_params, online_params):
        if target.shape != online.shape:
            raise DimensionError(f"Target shape {target.shape} does not match {online.shape}")
        target *= 1.0 - tau
        target += tau * online
    return target_params
