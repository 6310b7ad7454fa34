"""Reference schemes: random association, no-RIS, and the exhaustive oracle.

All three evaluate the environment's current channel realization, so the
environment must have been reset.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from risdrl.config import DEFAULT_ORACLE_BUDGET, NO_RIS_ENUM_LIMIT
from risdrl.env.mdp import RisEnv
from risdrl.errors import BudgetExceededError, DomainError, ProtocolError
from risdrl.network.association import AssociationMatrix, enumerate_associations
from risdrl.network.link import LinkBudget, evaluate_configuration
from risdrl.ris.phase import phase_vector

logger = logging.getLogger(__name__)


@dataclass
class BaselineResult:
    """Averages over random trials."""
    mean_reward: float
    stderr: float
    mean_rates: np.ndarray      # (K,) per-UE rate averaged over trials
    rewards: np.ndarray         # (trials,)

    @property
    def trials(self) -> int:
        return len(self.rewards)


@dataclass
class SearchResult:
    """Best configuration found by an enumeration."""
    reward: float
    theta: float
    phi: float
    assoc: AssociationMatrix
    budget: LinkBudget
    evaluated: int


def _random_association(num_bs: int, num_ue: int, strict: bool,
                        rng: np.random.Generator) -> AssociationMatrix:
    while True:
        ue_bs = rng.integers(0, num_bs, size=num_ue)
        if not strict or len(np.unique(ue_bs)) == num_bs:
            break
    ris_bs = int(rng.integers(0, num_bs))
    return AssociationMatrix.from_indices(ris_bs, ue_bs, num_bs)


def baseline_random_association(env: RisEnv, rng: np.random.Generator, trials: int = 1000) -> BaselineResult:
    """Uniform valid association and uniform codebook angles per trial."""
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    net = env.network
    strict = net.strict_association and net.num_ue >= net.num_bs
    codebook = env.codebook
    rewards = np.empty(trials)
    rates = np.zeros(net.num_ue)
    for i in range(trials):
        if codebook.is_continuous:
            theta, phi = rng.uniform(0.0, 2.0 * np.pi, size=2)
        else:
            theta, phi = (codebook.values[n] for n in rng.integers(0, len(codebook.values), size=2))
        assoc = _random_association(net.num_bs, net.num_ue, strict, rng)
        budget = env.evaluate(float(theta), float(phi), assoc)
        rewards[i] = env.reward(budget)
        rates += budget.rates
    stderr = float(rewards.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return BaselineResult(mean_reward=float(rewards.mean()), stderr=stderr,
                          mean_rates=rates / trials, rewards=rewards)


def greedy_association(env: RisEnv) -> AssociationMatrix:
    """Each UE on the BS with the strongest direct channel; no RIS owner."""
    if env.channels is None:
        raise ProtocolError("No channel realization yet; call reset() first")
    norms = np.linalg.norm(env.channels.h_d, axis=2)
    return AssociationMatrix.from_indices(None, np.argmax(norms, axis=0), env.network.num_bs)


def baseline_no_ris(env: RisEnv) -> SearchResult:
    """Best BS-UE association with the RIS switched off.

    Enumerates all J^K associations when that is at most the enumeration
    limit, otherwise falls back to greedy strongest-channel assignment.
    """
    net = env.network
    strict = net.strict_association and net.num_ue >= net.num_bs
    if net.num_bs ** net.num_ue <= NO_RIS_ENUM_LIMIT:
        candidates = enumerate_associations(net.num_bs, net.num_ue, strict=strict, with_ris=False)
    else:
        logger.debug("J^K = %d^%d too large, greedy no-RIS association", net.num_bs, net.num_ue)
        candidates = iter([greedy_association(env)])

    best: Optional[SearchResult] = None
    evaluated = 0
    for assoc in candidates:
        budget = env.evaluate(0.0, 0.0, assoc, ris_enabled=False)
        reward = env.reward(budget)
        evaluated += 1
        if best is None or reward > best.reward:
            best = SearchResult(reward=reward, theta=0.0, phi=0.0, assoc=assoc, budget=budget, evaluated=0)
    best.evaluated = evaluated
    return best


def oracle_size(env: RisEnv) -> int:
    """|F|^2 * J * J^K decoded configurations."""
    net = env.network
    return len(env.codebook.values) ** 2 * net.num_bs * net.num_bs ** net.num_ue


def exhaustive_search(env: RisEnv, budget: int = DEFAULT_ORACLE_BUDGET,
                      strict: Optional[bool] = None) -> SearchResult:
    """Maximize the reward over every (theta, phi, RIS owner, UE servers).

    Order is theta, phi, RIS owner, then UE servers lexicographically; the
    first maximum wins, so the result is deterministic.
    """
    if env.channels is None:
        raise ProtocolError("No channel realization yet; call reset() first")
    if env.codebook.is_continuous:
        raise DomainError("Exhaustive search needs a finite codebook")
    net = env.network
    required = oracle_size(env)
    if required > budget:
        raise BudgetExceededError(required, budget)
    if strict is None:
        strict = net.strict_association
    strict = strict and net.num_ue >= net.num_bs

    assocs = list(enumerate_associations(net.num_bs, net.num_ue, strict=strict))
    best: Optional[SearchResult] = None
    evaluated = 0
    for theta in env.codebook.values:
        for phi in env.codebook.values:
            f = phase_vector(theta, phi, net.ris_h, net.ris_v, net.unit_modulus)
            for assoc in assocs:
                link = evaluate_configuration(env.channels, f, assoc, net.p_max_watts, net.noise_watts)
                reward = env.reward(link)
                evaluated += 1
                if best is None or reward > best.reward:
                    best = SearchResult(reward=reward, theta=theta, phi=phi, assoc=assoc,
                                        budget=link, evaluated=0)
    best.evaluated = evaluated
    logger.debug("Oracle evaluated %d configurations, best %.6f", evaluated, best.reward)
    return best
