"""Soft actor-critic learner: twin critics, target critics, auto-tuned temperature."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from risdrl.config import SacHyperparams
from risdrl.errors import DimensionError, NumericalError
from risdrl.nn.adam import AdamState, adam_step, soft_update
from risdrl.nn.dense import DenseNet
from risdrl.sac.policy import GaussianPolicyOutput, sample_action
from risdrl.sac.replay import Batch, ReplayMemory

logger = logging.getLogger(__name__)


@dataclass
class UpdateDiagnostics:
    critic1_loss: float
    critic2_loss: float
    policy_loss: float
    temperature_loss: float
    alpha: float
    entropy: float


class SacAgent:
    """Actor, two critics and their targets plus the learnable log-temperature."""

    def __init__(self, state_dim: int, action_dim: int,
                 hyper: Optional[SacHyperparams] = None, seed: Optional[int] = None):
        if state_dim < 1 or action_dim < 1:
            raise DimensionError(f"Invalid dimensions state={state_dim} action={action_dim}")
        self.hyper = hyper or SacHyperparams()
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.rng = np.random.default_rng(seed)

        hidden = self.hyper.hidden_sizes
        self.actor = DenseNet.mlp(state_dim, hidden, 2 * action_dim, rng=self.rng)
        self.critic1 = DenseNet.mlp(state_dim + action_dim, hidden, 1, rng=self.rng)
        self.critic2 = DenseNet.mlp(state_dim + action_dim, hidden, 1, rng=self.rng)
        self.target1 = self.critic1.copy()
        self.target2 = self.critic2.copy()
        self.log_alpha = np.array([np.log(self.hyper.initial_alpha)])
        self.target_entropy = (self.hyper.target_entropy if self.hyper.target_entropy is not None
                               else -float(action_dim))

        lr = self.hyper.learning_rate
        self.actor_opt = AdamState.for_params(self.actor.params, lr)
        self.critic1_opt = AdamState.for_params(self.critic1.params, lr)
        self.critic2_opt = AdamState.for_params(self.critic2.params, lr)
        self.alpha_opt = AdamState.for_params([self.log_alpha], lr)

        self.replay = ReplayMemory(self.hyper.buffer_size)
        self.updates = 0

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha[0]))

    @property
    def log_std_bounds(self) -> tuple[float, float]:
        return self.hyper.log_std_min, self.hyper.log_std_max

    def policy(self, states: np.ndarray, deterministic: bool = False,
               noise: Optional[np.ndarray] = None) -> GaussianPolicyOutput:
        return sample_action(self.actor, states, self.rng, deterministic=deterministic,
                             noise=noise, log_std_bounds=self.log_std_bounds)

    def act(self, state: np.ndarray, deterministic: bool = False) -> np.ndarray:
        """Single action in [-1, 1]^A."""
        return self.policy(state, deterministic=deterministic).sampled_action[0]

    def remember(self, state, action, reward: float, next_state) -> None:
        self.replay.push(state, action, reward, next_state)

    def ready(self) -> bool:
        return len(self.replay) >= max(self.hyper.batch_size, self.hyper.warmup)

    def learn(self) -> Optional[UpdateDiagnostics]:
        """One gradient step from replay; None while the memory is warming up."""
        if not self.ready():
            return None
        batch = self.replay.sample(self.hyper.batch_size, self.rng)
        return self.update(batch)

    def update(self, batch: Batch) -> UpdateDiagnostics:
        """Critics, then actor, then temperature, then the soft target update."""
        alpha = self.alpha
        targets = critic_target(self, batch, alpha)
        loss1, loss2, grads1, grads2 = critic_loss(self, batch, targets)
        adam_step(self.critic1_opt, self.critic1.params, grads1)
        adam_step(self.critic2_opt, self.critic2.params, grads2)

        pi_loss, actor_grads, log_probs = policy_loss(self, batch, alpha)
        adam_step(self.actor_opt, self.actor.params, actor_grads)

        temp_loss, temp_grad = temperature_loss(log_probs, self.log_alpha[0], self.target_entropy)
        adam_step(self.alpha_opt, [self.log_alpha], [np.array([temp_grad])])

        self.updates += 1
        if self.updates % self.hyper.target_update_interval == 0:
            soft_update_targets(self)

        diagnostics = UpdateDiagnostics(
            critic1_loss=loss1, critic2_loss=loss2, policy_loss=pi_loss,
            temperature_loss=temp_loss, alpha=self.alpha, entropy=float(-np.mean(log_probs)),
        )
        for name in ("critic1_loss", "critic2_loss", "policy_loss", "alpha"):
            if not np.isfinite(getattr(diagnostics, name)):
                raise NumericalError(f"Non-finite {name} at update {self.updates}")
        if self.updates % 1000 == 0:
            logger.debug("update %d: critic %.4g/%.4g policy %.4g alpha %.4g",
                         self.updates, loss1, loss2, pi_loss, diagnostics.alpha)
        return diagnostics


def _critic_input(states: np.ndarray, actions: np.ndarray) -> np.ndarray:
    return np.concatenate([states, actions], axis=1)


def critic_target(agent: SacAgent, batch: Batch, alpha: float,
                  noise: Optional[np.ndarray] = None) -> np.ndarray:
    """y = r + gamma * (min target Q(s', a') - alpha * log pi(a'|s')), a' ~ pi(s')."""
    nxt = agent.policy(batch.next_states, noise=noise)
    sa = _critic_input(batch.next_states, nxt.sampled_action)
    q_next = np.minimum(agent.target1(sa), agent.target2(sa))[:, 0]
    return batch.rewards + agent.hyper.gamma * (q_next - alpha * nxt.log_prob)


def critic_loss(agent: SacAgent, batch: Batch,
                targets: np.ndarray) -> tuple[float, float, list[np.ndarray], list[np.ndarray]]:
    """Mean 0.5 * (Q_i(s, a) - y)^2 for both critics with their parameter gradients."""
    sa = _critic_input(batch.states, batch.actions)
    n = len(batch)
    results = []
    for critic in (agent.critic1, agent.critic2):
        q, cache = critic.forward_with_cache(sa)
        err = q[:, 0] - targets
        grads, _ = critic.backward((err / n)[:, None], cache)
        results.append((float(0.5 * np.mean(err ** 2)), grads))
    (loss1, grads1), (loss2, grads2) = results
    return loss1, loss2, grads1, grads2


def policy_loss(agent: SacAgent, batch: Batch, alpha: float,
                noise: Optional[np.ndarray] = None) -> tuple[float, list[np.ndarray], np.ndarray]:
    """Mean(alpha * log pi(a|s) - min_i Q_i(s, a)) with a reparameterized.

    Returns the loss, the actor parameter gradients and the per-sample
    log-probabilities (reused by the temperature step).
    """
    out = agent.policy(batch.states, noise=noise)
    a = out.sampled_action
    n = len(batch)
    sa = _critic_input(batch.states, a)

    q1, cache1 = agent.critic1.forward_with_cache(sa)
    q2, cache2 = agent.critic2.forward_with_cache(sa)
    use_first = q1[:, 0] <= q2[:, 0]
    q_min = np.where(use_first, q1[:, 0], q2[:, 0])
    loss = float(np.mean(alpha * out.log_prob - q_min))

    ones = np.ones((n, 1))
    _, dsa1 = agent.critic1.backward(ones, cache1)
    _, dsa2 = agent.critic2.backward(ones, cache2)
    dq_da = np.where(use_first[:, None], dsa1, dsa2)[:, agent.state_dim:]

    dlogp_dmean, dlogp_dlogstd = out.log_prob_gradients()
    da_du = 1.0 - a ** 2
    dloss_du = -dq_da * da_du
    d_mean = (alpha * dlogp_dmean + dloss_du) / n
    d_log_std = (alpha * dlogp_dlogstd + dloss_du * out.std * out.noise * out.clamp_mask()) / n
    grads, _ = agent.actor.backward(np.concatenate([d_mean, d_log_std], axis=1), out.cache)
    return loss, grads, out.log_prob


def temperature_loss(log_probs: np.ndarray, log_alpha: float,
                     target_entropy: float) -> tuple[float, float]:
    """-alpha * (mean log pi + target_entropy) and its derivative in log alpha."""
    value = float(-np.exp(log_alpha) * (np.mean(log_probs) + target_entropy))
    return value, value


def soft_update_targets(agent: SacAgent, tau: Optional[float] = None) -> None:
    tau = agent.hyper.tau if tau is None else tau
    soft_update(agent.target1.params, agent.critic1.params, tau)
    soft_update(agent.target2.params, agent.critic2.params, tau)

