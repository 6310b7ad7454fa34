"""Tanh-squashed Gaussian policy head.

The actor network emits [mean, log_std] per action dimension. Actions are
a = tanh(u) with u = mean + std * noise, and the log-density carries the
change-of-variables term -log(1 - tanh(u)^2 + eps).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from risdrl.errors import NumericalError
from risdrl.nn.dense import DenseNet, ForwardCache

LOG_PROB_EPS = 1e-6
LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass
class GaussianPolicyOutput:
    mean: np.ndarray            # (B, A)
    log_std: np.ndarray         # (B, A), clamped
    sampled_action: np.ndarray  # (B, A) in (-1, 1)
    log_prob: np.ndarray        # (B,)
    noise: np.ndarray           # (B, A), zero in deterministic mode
    raw_log_std: np.ndarray     # (B, A), before clamping
    cache: Optional[ForwardCache] = None
    log_std_bounds: tuple[float, float] = (LOG_STD_MIN, LOG_STD_MAX)

    @property
    def std(self) -> np.ndarray:
        return np.exp(self.log_std)

    def log_prob_gradients(self) -> tuple[np.ndarray, np.ndarray]:
        """d log_prob / d mean and d log_prob / d raw_log_std at fixed noise."""
        a = self.sampled_action
        squash = 2.0 * a * (1.0 - a ** 2) / (1.0 - a ** 2 + LOG_PROB_EPS)
        d_mean = squash
        d_log_std = (-1.0 + squash * self.std * self.noise) * self.clamp_mask()
        return d_mean, d_log_std

    def clamp_mask(self) -> np.ndarray:
        low, high = self.log_std_bounds
        return ((self.raw_log_std > low) & (self.raw_log_std < high)).astype(np.float64)


def squashed_gaussian_log_prob(noise: np.ndarray, log_std: np.ndarray, action: np.ndarray) -> np.ndarray:
    """Per-sample log density of a = tanh(mean + std * noise)."""
    gaussian = -0.5 * noise ** 2 - log_std - _HALF_LOG_2PI
    correction = np.log(1.0 - action ** 2 + LOG_PROB_EPS)
    return np.sum(gaussian - correction, axis=-1)


def sample_action(actor: DenseNet, state: np.ndarray, rng: Optional[np.random.Generator] = None,
                  deterministic: bool = False, noise: Optional[np.ndarray] = None,
                  log_std_bounds: tuple[float, float] = (LOG_STD_MIN, LOG_STD_MAX)) -> GaussianPolicyOutput:
    """Reparameterized draw from the policy for a batch of states.

    ``noise`` fixes the standard-normal draw (used by gradient checks);
    otherwise it comes from ``rng``. Deterministic mode returns tanh(mean).
    """
    states = np.atleast_2d(np.asarray(state, dtype=np.float64))
    out, cache = actor.forward_with_cache(states)
    if not np.all(np.isfinite(out)):
        raise NumericalError("Actor produced non-finite outputs")
    dim = out.shape[1] // 2
    mean, raw_log_std = out[:, :dim], out[:, dim:]
    log_std = np.clip(raw_log_std, *log_std_bounds)
    if deterministic:
        eps = np.zeros_like(mean)
    elif noise is not None:
        eps = np.asarray(noise, dtype=np.float64).reshape(mean.shape)
    else:
        if rng is None:
            raise ValueError("Stochastic sampling needs an rng or explicit noise")
        eps = rng.standard_normal(mean.shape)
    action = np.tanh(mean + np.exp(log_std) * eps)
    log_prob = squashed_gaussian_log_prob(eps, log_std, action)
    if not np.all(np.isfinite(log_prob)):
        raise NumericalError("Policy log-probability is not finite")
    return GaussianPolicyOutput(
        mean=mean, log_std=log_std, sampled_action=action, log_prob=log_prob,
        noise=eps, raw_log_std=raw_log_std, cache=cache, log_std_bounds=tuple(log_std_bounds),
    )
