"""Scenario profiles and TOML/JSON config files."""
from __future__ import annotations

import json
import os
import re
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Callable, Optional

import click

from risdrl.channel.geometry import PathLossParams
from risdrl.config import EnvConfig, NetworkConfig, SacHyperparams
from risdrl.errors import DomainError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_PROFILE_NAME_RE = re.compile(r"^[a-zA-Z0-9_-]+$")
SEED_ENV_VAR = "RISDRL_SEED"
DEFAULT_PROFILE = "full"
SECTIONS = ("network", "env", "sac", "experiment")


@dataclass
class Profile:
    name: str
    env: EnvConfig
    sac: SacHyperparams
    description: str = ""

    @property
    def network(self) -> NetworkConfig:
        return self.env.network


@dataclass
class ResolvedConfig:
    """Everything a command needs after profile, file and CLI are merged."""
    profile: str
    env: EnvConfig
    sac: SacHyperparams
    experiment: dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    source: Optional[Path] = None

    @property
    def network(self) -> NetworkConfig:
        return self.env.network


def _full() -> Profile:
    return Profile("full", EnvConfig(), SacHyperparams(),
                   "Three BSs, 16 UEs, 32 antennas, 8x8 RIS")


def _mid() -> Profile:
    net = NetworkConfig(num_ue=6, num_antennas=8, ris_h=4, ris_v=4)
    env = EnvConfig(network=net, episodes=200, steps_per_episode=100, bits=2)
    return Profile("mid", env, SacHyperparams(), "Three BSs, 6 UEs, 8 antennas, 4x4 RIS")


def _ci() -> Profile:
    net = NetworkConfig(bs_positions=((0.0, 0.0), (200.0, 0.0)), num_ue=2, num_antennas=4,
                        ris_h=2, ris_v=2)
    env = EnvConfig(network=net, episodes=150, steps_per_episode=50, bits=1,
                    resample_ue_positions=False, resample_channels=False)
    sac = SacHyperparams(learning_rate=1e-3, buffer_size=100_000, hidden_sizes=(64, 64),
                         initial_alpha=0.1, warmup=500)
    return Profile("ci", env, sac, "Two BSs, 2 UEs, 4 antennas, 2x2 RIS, one fixed realization")


BUILTIN_PROFILES: dict[str, Callable[[], Profile]] = {
    "full": _full,
    "mid": _mid,
    "ci": _ci,
}


def validate_profile_name(name: str) -> bool:
    """Check that a profile name is a valid TOML bare key."""
    return bool(_PROFILE_NAME_RE.match(name))


def get_profile(name: str) -> Profile:
    factory = BUILTIN_PROFILES.get(name)
    if factory is None:
        available = ", ".join(BUILTIN_PROFILES)
        raise click.UsageError(f"Profile '{name}' not found. Available profiles: {available}")
    return factory()


def get_config_path() -> Path:
    """User-level default config file, applied before any --config file."""
    return Path(click.get_app_dir("risdrl")) / "config.toml"


def load_config(path: Path) -> dict[str, Any]:
    """Read a TOML or JSON config file (chosen by suffix) into raw sections."""
    if not path.exists():
        raise click.UsageError(f"Config file not found: {path}")
    if path.suffix.lower() == ".json":
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    else:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    unknown = set(data) - set(SECTIONS) - {"profile", "seed"}
    if unknown:
        raise click.UsageError(f"Unknown section(s) in {path}: {', '.join(sorted(unknown))}")
    return data


def _parse_bits(value) -> Optional[int]:
    if value is None or (isinstance(value, str) and value.lower() in ("inf", "continuous")):
        return None
    return int(value)


def _coerce(name: str, value):
    if name == "bs_positions":
        return tuple(tuple(float(x) for x in p) for p in value)
    if name in ("ris_position", "ue_region_center"):
        return tuple(float(x) for x in value)
    if name in ("nlos", "los"):
        return PathLossParams(**value)
    if name == "hidden_sizes":
        return tuple(int(x) for x in value)
    if name == "bits":
        return _parse_bits(value)
    return value


def _apply(obj, section: str, values: dict[str, Any]):
    allowed = {f.name for f in fields(obj)} - {"network"}
    updates = {}
    for key, value in values.items():
        if key not in allowed:
            raise click.UsageError(f"Unknown key '{key}' in [{section}]")
        updates[key] = _coerce(key, value)
    try:
        return replace(obj, **updates)
    except (DomainError, TypeError, ValueError) as exc:
        raise click.UsageError(f"Invalid [{section}] settings: {exc}") from exc


def apply_overrides(profile: Profile, data: dict[str, Any]) -> ResolvedConfig:
    """Layer a config mapping onto a profile."""
    env = profile.env
    network = _apply(env.network, "network", data.get("network", {}))
    env = _apply(replace(env, network=network), "env", data.get("env", {}))
    sac = _apply(profile.sac, "sac", data.get("sac", {}))
    seed = data.get("seed")
    return ResolvedConfig(profile=profile.name, env=env, sac=sac,
                          experiment=dict(data.get("experiment", {})),
                          seed=int(seed) if seed is not None else None)


def resolve_config(profile_name: Optional[str], config_path: Optional[Path],
                   overlay_path: Optional[Path] = None) -> ResolvedConfig:
    """Resolve: overlay file > --config file > user config > --profile > default profile.

    ``overlay_path`` is an experiment file layered over the global --config.
    """
    user_path = get_config_path()
    layers = [load_config(user_path) if user_path.exists() else {}]
    layers += [load_config(p) for p in (config_path, overlay_path) if p is not None]

    named = [d["profile"] for d in reversed(layers) if d.get("profile")]
    name = profile_name or (named[0] if named else DEFAULT_PROFILE)
    if not validate_profile_name(name):
        raise click.UsageError(f"Invalid profile name '{name}'")
    resolved = apply_overrides(get_profile(name), layers[0])
    for data in layers[1:]:
        if not data:
            continue
        merged = apply_overrides(Profile(name, resolved.env, resolved.sac), data)
        merged.experiment = {**resolved.experiment, **merged.experiment}
        if merged.seed is None:
            merged.seed = resolved.seed
        resolved = merged
    resolved.source = overlay_path or config_path
    return resolved


def resolve_seed(cli_seed: Optional[int], file_seed: Optional[int] = None) -> int:
    """RISDRL_SEED beats --seed, which beats the config file; default 0."""
    env_value = os.environ.get(SEED_ENV_VAR)
    if env_value:
        try:
            return int(env_value)
        except ValueError:
            raise click.UsageError(f"{SEED_ENV_VAR} must be an integer, got '{env_value}'")
    if cli_seed is not None:
        return cli_seed
    return file_seed if file_seed is not None else 0
