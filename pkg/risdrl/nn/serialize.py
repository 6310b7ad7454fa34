"""Binary network codec.

Layout (little-endian):
  magic(4) 'RSNN' + version(2) + layer_count(2)
  layer_count * (fan_in(4) + fan_out(4))
  then per layer: weights fan_in*fan_out float64, biases fan_out float64
"""
from __future__ import annotations

import struct

import numpy as np

from risdrl.nn.dense import DenseNet

MAGIC = b"RSNN"
VERSION = 1

_HEADER = struct.Struct("<4sHH")    # magic(4) + version(2) + layer_count(2)
_SHAPE = struct.Struct("<II")       # fan_in(4) + fan_out(4)
_F64 = np.dtype("<f8")


def pack_net(net: DenseNet) -> bytes:
    parts = [_HEADER.pack(MAGIC, VERSION, len(net.weights))]
    for W in net.weights:
        parts.append(_SHAPE.pack(*W.shape))
    for W, b in zip(net.weights, net.biases):
        parts.append(W.astype(_F64).tobytes())
        parts.append(b.astype(_F64).tobytes())
    return b"".join(parts)


def unpack_net(data: bytes, offset: int = 0) -> tuple[DenseNet, int]:
    """Decode a network starting at ``offset``; returns it and the end offset."""
    try:
        magic, version, layer_count = _HEADER.unpack_from(data, offset)
    except struct.error as exc:
        raise ValueError(f"Truncated network header at offset {offset}") from exc
    if magic != MAGIC:
        raise ValueError(f"Not a network blob: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"Unsupported network blob version {version}")
    if layer_count == 0:
        raise ValueError("Network blob has no layers")
    pos = offset + _HEADER.size
    shapes = []
    try:
        for _ in range(layer_count):
            shapes.append(_SHAPE.unpack_from(data, pos))
            pos += _SHAPE.size
    except struct.error as exc:
        raise ValueError(f"Truncated layer table in network blob at offset {offset}") from exc

    sizes = [shapes[0][0]] + [fan_out for _, fan_out in shapes]
    net = DenseNet(sizes, rng=np.random.default_rng(0))
    for i, (fan_in, fan_out) in enumerate(shapes):
        count = fan_in * fan_out
        net.weights[i][...] = np.frombuffer(data, dtype=_F64, count=count, offset=pos).reshape(fan_in, fan_out)
        pos += count * _F64.itemsize
        net.biases[i][...] = np.frombuffer(data, dtype=_F64, count=fan_out, offset=pos)
        pos += fan_out * _F64.itemsize
    return net, pos

