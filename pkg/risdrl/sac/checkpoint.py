"""Agent checkpoint file.

Layout (little-endian):
  magic(4) 'RSAC' + version(2) + reserved(2) + meta_len(4)
  meta: UTF-8 JSON (hyperparameters, dims, update counter, log_alpha)
  five network blobs: actor, critic1, critic2, target1, target2

Optimizer moments are not stored; a restored agent restarts Adam.
"""
from __future__ import annotations

import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from risdrl.config import SacHyperparams
from risdrl.nn.serialize import pack_net, unpack_net
from risdrl.sac.agent import SacAgent

MAGIC = b"RSAC"
VERSION = 1

_HEADER = struct.Struct("<4sHHI")    # magic(4) + version(2) + reserved(2) + meta_len(4)
_NETS = ("actor", "critic1", "critic2", "target1", "target2")


def pack_agent(agent: SacAgent) -> bytes:
    meta = {
        "state_dim": agent.state_dim,
        "action_dim": agent.action_dim,
        "updates": agent.updates,
        "log_alpha": float(agent.log_alpha[0]),
        "target_entropy": agent.target_entropy,
        "hyper": asdict(agent.hyper),
    }
    meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
    parts = [_HEADER.pack(MAGIC, VERSION, 0, len(meta_bytes)), meta_bytes]
    parts.extend(pack_net(getattr(agent, name)) for name in _NETS)
    return b"".join(parts)


def unpack_agent(data: bytes, seed: int | None = None) -> SacAgent:
    try:
        magic, version, _, meta_len = _HEADER.unpack_from(data, 0)
    except struct.error as exc:
        raise ValueError("Truncated checkpoint header") from exc
    if magic != MAGIC:
        raise ValueError(f"Not an agent checkpoint: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"Unsupported checkpoint version {version}")
    pos = _HEADER.size
    if len(data) < pos + meta_len:
        raise ValueError("Truncated checkpoint metadata")
    meta = json.loads(data[pos:pos + meta_len].decode("utf-8"))
    pos += meta_len

    try:
        hyper_fields = dict(meta["hyper"])
        hyper_fields["hidden_sizes"] = tuple(hyper_fields["hidden_sizes"])
        agent = SacAgent(meta["state_dim"], meta["action_dim"], SacHyperparams(**hyper_fields), seed=seed)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"Malformed checkpoint metadata: {exc}") from exc
    for name in _NETS:
        net, pos = unpack_net(data, pos)
        getattr(agent, name).set_params(net.params)
    agent.log_alpha[0] = meta["log_alpha"]
    agent.target_entropy = meta["target_entropy"]
    agent.updates = int(meta["updates"])
    return agent


def save_checkpoint(agent: SacAgent, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(pack_agent(agent))


def load_checkpoint(path: Path, seed: int | None = None) -> SacAgent:
    return unpack_agent(path.read_bytes(), seed=seed)


def same_weights(a: SacAgent, b: SacAgent) -> bool:
    """Exact equality of every network parameter and the temperature."""
    for name in _NETS:
        for p, q in zip(getattr(a, name).params, getattr(b, name).params):
            if not np.array_equal(p, q):
                return False
    return bool(np.array_equal(a.log_alpha, b.log_alpha))
