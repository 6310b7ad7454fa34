"""Episode loop: interleaved environment steps and SAC updates."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from risdrl.env.mdp import RisEnv
from risdrl.sac.agent import SacAgent

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class EpisodeLog:
    episode: int
    steps: int
    mean_reward: float
    best_step_reward: float
    critic1_loss: float         # nan until the first update
    critic2_loss: float
    policy_loss: float
    alpha: float
    entropy: float
    updates: int
    eval_reward: float          # deterministic policy at the episode's last state
    theta: float
    phi: float
    ris_bs: Optional[int]
    ue_bs: tuple[int, ...]
    # configuration decoded at the best-rewarded step of the episode
    best_theta: float
    best_phi: float
    best_ris_bs: Optional[int]
    best_ue_bs: tuple[int, ...]


@dataclass
class TrainingLog:
    episodes: list[EpisodeLog] = field(default_factory=list)
    elapsed: float = 0.0

    def __len__(self) -> int:
        return len(self.episodes)

    def mean_rewards(self) -> np.ndarray:
        return np.array([e.mean_reward for e in self.episodes])

    def eval_rewards(self) -> np.ndarray:
        return np.array([e.eval_reward for e in self.episodes])

    def final(self) -> Optional[EpisodeLog]:
        return self.episodes[-1] if self.episodes else None


EpisodeCallback = Callable[[EpisodeLog], None]


def train(env: RisEnv, agent: SacAgent, episodes: Optional[int] = None, seed: Optional[int] = None,
          on_episode: Optional[EpisodeCallback] = None, log_interval: int = 10) -> TrainingLog:
    """Run the SAC loop on ``env`` and return per-episode diagnostics.

    ``seed`` re-seeds the environment on the first reset only; later episodes
    continue its stream. Updates start once the replay holds ``warmup``
    transitions and bootstrap through episode boundaries.
    """
    episodes = env.config.episodes if episodes is None else episodes
    steps = env.config.steps_per_episode
    log = TrainingLog()
    start = time.perf_counter()

    for ep in range(episodes):
        state = env.reset(seed=seed if ep == 0 else None)
        rewards = np.zeros(steps)
        losses = np.full(3, np.nan)
        entropy = np.nan
        best = None
        for t in range(steps):
            action = agent.act(state)
            next_state, reward, _ = env.step(action)
            agent.remember(state, action, reward, next_state)
            rewards[t] = reward
            if best is None or reward > rewards[best[0]]:
                best = (t, env.last_decoded)
            for _ in range(agent.hyper.gradient_steps):
                diag = agent.learn()
                if diag is not None:
                    losses[:] = (diag.critic1_loss, diag.critic2_loss, diag.policy_loss)
                    entropy = diag.entropy
            state = next_state

        eval_reward, _, decoded = env.evaluate_action(agent.act(state, deterministic=True))
        row = EpisodeLog(
            episode=ep,
            steps=steps,
            mean_reward=float(rewards.mean()),
            best_step_reward=float(rewards.max()),
            critic1_loss=float(losses[0]),
            critic2_loss=float(losses[1]),
            policy_loss=float(losses[2]),
            alpha=agent.alpha,
            entropy=float(entropy),
            updates=agent.updates,
            eval_reward=float(eval_reward),
            theta=decoded.theta,
            phi=decoded.phi,
            ris_bs=decoded.assoc.ris_bs,
            ue_bs=tuple(int(j) for j in decoded.assoc.ue_bs),
            best_theta=best[1].theta,
            best_phi=best[1].phi,
            best_ris_bs=best[1].assoc.ris_bs,
            best_ue_bs=tuple(int(j) for j in best[1].assoc.ue_bs),
        )
        log.episodes.append(row)
        if on_episode is not None:
            on_episode(row)
        if log_interval and (ep + 1) % log_interval == 0:
            logger.info("episode %d/%d: mean reward %.4f, eval %.4f, alpha %.4g",
                        ep + 1, episodes, row.mean_reward, row.eval_reward, row.alpha)

    log.elapsed = time.perf_counter() - start
    logger.info("Trained %d episodes (%d updates) in %.1fs", episodes, agent.updates, log.elapsed)
    return log
