"""Sweep orchestration: one cell per (sweep value, seed, method).

Each cell owns its environments and RNGs, so re-running a cell with the same
seed and config reproduces its row bit for bit. Every method of a cell is
scored on the same evaluation realizations, drawn from a stream seeded
independently of training.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from risdrl.config import DEFAULT_ORACLE_BUDGET, EnvConfig, SacHyperparams, config_hash
from risdrl.db.store import Store
from risdrl.env.mdp import RisEnv
from risdrl.errors import BudgetExceededError, DomainError
from risdrl.experiments.baselines import (
    baseline_no_ris,
    baseline_random_association,
    exhaustive_search,
    oracle_size,
)
from risdrl.experiments.metrics import METHODS, MetricsRow, outage_probability
from risdrl.export.csv_export import MetricsCsvWriter, write_curve_csv
from risdrl.export.json_export import build_sidecar, write_sidecar
from risdrl.sac.agent import SacAgent
from risdrl.sac.trainer import TrainingLog, train

logger = logging.getLogger(__name__)

SWEEP_VARIABLES = ("N", "M", "P_max", "K", "B", "R_min")
# Evaluation realizations use seed + offset so they never coincide with training draws
EVAL_SEED_OFFSET = 1_000_003


def ris_shape(num_elements: int) -> tuple[int, int]:
    """(M_h, M_v) with M_v the largest divisor not above sqrt(M)."""
    if num_elements < 1:
        raise DomainError(f"RIS needs at least one element, got {num_elements}")
    v = int(math.isqrt(num_elements))
    while num_elements % v:
        v -= 1
    return num_elements // v, v


def apply_sweep_value(env: EnvConfig, variable: str, value: float) -> EnvConfig:
    """Copy of ``env`` with one swept parameter replaced."""
    net = env.network
    if variable == "N":
        return replace(env, network=replace(net, num_antennas=int(value)))
    if variable == "M":
        m_h, m_v = ris_shape(int(value))
        return replace(env, network=replace(net, ris_h=m_h, ris_v=m_v))
    if variable == "P_max":
        return replace(env, network=replace(net, p_max_dbm=float(value)))
    if variable == "K":
        return replace(env, network=replace(net, num_ue=int(value)))
    if variable == "B":
        return replace(env, bits=None if math.isinf(value) else int(value))
    if variable == "R_min":
        return replace(env, r_min=float(value))
    raise DomainError(f"Unknown sweep variable '{variable}'")


def _parse_value(value) -> float:
    if isinstance(value, str) and value.lower() in ("inf", "continuous"):
        return math.inf
    return float(value)


@dataclass
class ExperimentSpec:
    name: str
    sweep_variable: str
    sweep_values: tuple[float, ...]
    seeds: tuple[int, ...]
    methods: tuple[str, ...] = ("SAC", "RA", "NO_RIS")
    output_dir: Path = Path("results")
    episodes: Optional[int] = None          # overrides env.episodes for SAC cells
    trials: int = 1000                      # RA trials per evaluation realization
    eval_realizations: int = 5
    r_min_grid: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0, 4.0)
    oracle_budget: int = DEFAULT_ORACLE_BUDGET

    def __post_init__(self):
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise DomainError(
                f"Sweep variable must be one of {', '.join(SWEEP_VARIABLES)}, got '{self.sweep_variable}'")
        if not self.sweep_values:
            raise DomainError("Sweep values must not be empty")
        if not self.seeds:
            raise DomainError("Seeds must not be empty")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown or not self.methods:
            raise DomainError(f"Methods must be drawn from {', '.join(METHODS)}, got {list(self.methods)}")
        if self.eval_realizations < 1 or self.trials < 1:
            raise DomainError("eval_realizations and trials must be >= 1")

    @classmethod
    def from_mapping(cls, data: dict[str, Any], output_dir: Optional[Path] = None) -> "ExperimentSpec":
        """Build from an ``[experiment]`` config section."""
        allowed = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - allowed
        if unknown:
            raise DomainError(f"Unknown experiment key(s): {', '.join(sorted(unknown))}")
        kwargs = dict(data)
        kwargs.setdefault("name", "experiment")
        kwargs["sweep_values"] = tuple(_parse_value(v) for v in data.get("sweep_values", ()))
        kwargs["seeds"] = tuple(int(s) for s in data.get("seeds", ()))
        if "methods" in data:
            kwargs["methods"] = tuple(str(m).upper() for m in data["methods"])
        if "r_min_grid" in data:
            kwargs["r_min_grid"] = tuple(float(r) for r in data["r_min_grid"])
        if output_dir is not None:
            kwargs["output_dir"] = output_dir
        kwargs["output_dir"] = Path(kwargs.get("output_dir", "results"))
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "sweep_variable": self.sweep_variable,
            "sweep_values": ["inf" if math.isinf(v) else v for v in self.sweep_values],
            "seeds": list(self.seeds),
            "methods": list(self.methods),
            "episodes": self.episodes,
            "trials": self.trials,
            "eval_realizations": self.eval_realizations,
            "r_min_grid": list(self.r_min_grid),
            "oracle_budget": self.oracle_budget,
        }

    @property
    def metrics_path(self) -> Path:
        return self.output_dir / f"{self.name}.csv"

    @property
    def sidecar_path(self) -> Path:
        return self.output_dir / f"{self.name}.json"

    def curve_path(self, value: float, seed: int) -> Path:
        return self.output_dir / "curves" / f"{self.name}_{self.sweep_variable}={value:g}_seed{seed}.csv"


@dataclass
class CellResult:
    row: MetricsRow
    training: Optional[TrainingLog] = None


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list[MetricsRow] = field(default_factory=list)
    curves: dict[str, TrainingLog] = field(default_factory=dict)
    run_id: Optional[int] = None
    elapsed: float = 0.0


def _eval_env(env_config: EnvConfig, seed: int) -> RisEnv:
    return RisEnv(replace(env_config, resample_ue_positions=True, resample_channels=True),
                  seed=seed + EVAL_SEED_OFFSET)


def _realizations(env_config: EnvConfig, seed: int, count: int, fixed: bool):
    """Yield the env at each evaluation realization.

    With a fixed realization (no resampling) the training realization is
    scored instead, so the oracle comparison is on the channels learnt on.
    """
    if fixed:
        env = RisEnv(env_config, seed=seed)
        env.reset(seed=seed)
        yield env
        return
    env = _eval_env(env_config, seed)
    for _ in range(count):
        env.reset()
        yield env


def _policy_rates(env: RisEnv, agent: SacAgent) -> tuple[float, np.ndarray]:
    """Deterministic rollout over one episode on the env's current realization."""
    state = env.reset_episode()
    rewards, rates = [], []
    for _ in range(env.config.steps_per_episode):
        state, reward, _ = env.step(agent.act(state, deterministic=True))
        rewards.append(reward)
        rates.append(env.last_budget.rates)
    return float(np.mean(rewards)), np.mean(rates, axis=0)


def run_cell(env_config: EnvConfig, sac: SacHyperparams, method: str, seed: int,
             spec: ExperimentSpec, sweep_value: float) -> CellResult:
    """Train or evaluate one method on one configuration and seed."""
    fixed = not (env_config.resample_channels or env_config.resample_ue_positions)
    rewards: list[float] = []
    rates: list[np.ndarray] = []
    training = None

    if method == "SAC":
        env = RisEnv(env_config, seed=seed)
        agent = SacAgent(env.state_dim, env.action_dim, sac, seed=seed)
        training = train(env, agent, episodes=spec.episodes, seed=seed)
        for eval_env in _realizations(env_config, seed, spec.eval_realizations, fixed):
            reward, mean_rates = _policy_rates(eval_env, agent)
            rewards.append(reward)
            rates.append(mean_rates)
    else:
        rng = np.random.default_rng(seed)
        for eval_env in _realizations(env_config, seed, spec.eval_realizations, fixed):
            if method == "RA":
                result = baseline_random_association(eval_env, rng, spec.trials)
                rewards.append(result.mean_reward)
                rates.append(result.mean_rates)
            elif method == "NO_RIS":
                found = baseline_no_ris(eval_env)
                rewards.append(found.reward)
                rates.append(found.budget.rates)
            else:
                found = exhaustive_search(eval_env, budget=spec.oracle_budget)
                rewards.append(found.reward)
                rates.append(found.budget.rates)

    row = MetricsRow(
        method=method,
        sweep_variable=spec.sweep_variable,
        sweep_value=float(sweep_value),
        seed=int(seed),
        sum_rate=float(np.mean(rewards)),
        rates=tuple(float(r) for r in np.mean(rates, axis=0)),
        outage=tuple(float(p) for p in outage_probability(np.array(rates), spec.r_min_grid)),
    )
    return CellResult(row=row, training=training)


def _check_oracle_budgets(spec: ExperimentSpec, base: EnvConfig):
    if "ORACLE" not in spec.methods:
        return
    for value in spec.sweep_values:
        env = RisEnv(apply_sweep_value(base, spec.sweep_variable, value))
        if env.codebook.is_continuous:
            raise DomainError(f"ORACLE needs a finite codebook ({spec.sweep_variable}={value:g})")
        required = oracle_size(env)
        if required > spec.oracle_budget:
            raise BudgetExceededError(required, spec.oracle_budget)


def run_experiment(spec: ExperimentSpec, env_config: EnvConfig, sac: SacHyperparams,
                   profile: str = "custom", store: Optional[Store] = None,
                   on_row: Optional[Callable[[MetricsRow], None]] = None) -> ExperimentResult:
    """Run every cell, streaming rows to the metrics CSV.

    Writes ``<name>.csv``, ``<name>.json`` and, for SAC cells, one training
    curve per (sweep value, seed) under ``curves/``. When ``store`` is given
    the run is registered with its rows and curves.
    """
    _check_oracle_budgets(spec, env_config)
    start = time.perf_counter()
    result = ExperimentResult(spec=spec)
    write_sidecar(spec.sidecar_path, build_sidecar(env_config, sac, list(spec.seeds), profile, spec.to_dict()))
    if store is not None:
        result.run_id = store.create_run(spec.name, "sweep", config_hash(env_config, sac),
                                         seed=spec.seeds[0], output_dir=str(spec.output_dir))

    with MetricsCsvWriter(spec.metrics_path) as writer:
        for value in spec.sweep_values:
            cell_config = apply_sweep_value(env_config, spec.sweep_variable, value)
            for seed in spec.seeds:
                for method in spec.methods:
                    cell = run_cell(cell_config, sac, method, seed, spec, value)
                    writer.write(cell.row)
                    result.rows.append(cell.row)
                    logger.info("%s %s=%g seed=%d: sum-rate %.4f", method, spec.sweep_variable,
                                value, seed, cell.row.sum_rate)
                    if cell.training is not None:
                        curve_path = spec.curve_path(value, seed)
                        write_curve_csv(curve_path, cell.training.episodes)
                        result.curves[curve_path.stem] = cell.training
                    if store is not None:
                        store.insert_metrics(result.run_id, [cell.row], start_index=len(result.rows) - 1)
                        if cell.training is not None:
                            store.insert_episodes(result.run_id, spec.curve_path(value, seed).stem,
                                                  cell.training.episodes)
                    if on_row is not None:
                        on_row(cell.row)

    if store is not None:
        store.update_run_count(result.run_id, len(result.rows))
    result.elapsed = time.perf_counter() - start
    return result
