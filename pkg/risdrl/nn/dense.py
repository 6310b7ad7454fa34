"""Fully connected ReLU network with hand-written backpropagation (float64)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from risdrl.errors import DimensionError


@dataclass
class ForwardCache:
    """Layer inputs and pre-activations of one forward pass."""
    inputs: list[np.ndarray]
    pre_activations: list[np.ndarray]
    squeeze: bool


class DenseNet:
    """Affine layers with ReLU between them and a linear output layer.

    Weights are stored (fan_in, fan_out) and inputs are batches of rows.
    """

    def __init__(self, layer_sizes: Sequence[int], rng: Optional[np.random.Generator] = None):
        if len(layer_sizes) < 2 or any(s < 1 for s in layer_sizes):
            raise DimensionError(f"Invalid layer sizes {list(layer_sizes)}")
        self.layer_sizes = tuple(int(s) for s in layer_sizes)
        rng = rng if rng is not None else np.random.default_rng()
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(rng.uniform(-bound, bound, size=fan_out))
        self._cache: Optional[ForwardCache] = None

    @classmethod
    def mlp(cls, input_dim: int, hidden: Sequence[int], output_dim: int,
            rng: Optional[np.random.Generator] = None) -> "DenseNet":
        return cls([input_dim, *hidden, output_dim], rng=rng)

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    @property
    def params(self) -> list[np.ndarray]:
        """[W0, b0, W1, b1, ...], live references."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out.extend((W, b))
        return out

    @property
    def num_params(self) -> int:
        return sum(p.size for p in self.params)

    def set_params(self, params: Sequence[np.ndarray]) -> None:
        """Copy values in, keeping array identities."""
        current = self.params
        if len(params) != len(current):
            raise DimensionError(f"Expected {len(current)} parameter arrays, got {len(params)}")
        for dst, src in zip(current, params):
            if dst.shape != np.shape(src):
                raise DimensionError(f"Parameter shape {np.shape(src)} does not match {dst.shape}")
            dst[...] = src

    def copy(self) -> "DenseNet":
        clone = DenseNet.__new__(DenseNet)
        clone.layer_sizes = self.layer_sizes
        clone.weights = [W.copy() for W in self.weights]
        clone.biases = [b.copy() for b in self.biases]
        clone._cache = None
        return clone

    def forward_with_cache(self, x: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        if x.shape[1] != self.input_dim:
            raise DimensionError(f"Input width {x.shape[1]} does not match {self.input_dim}")
        inputs, pre = [], []
        h = x
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            z = h @ W + b
            pre.append(z)
            h = z if i == last else np.maximum(z, 0.0)
        cache = ForwardCache(inputs=inputs, pre_activations=pre, squeeze=squeeze)
        return (h[0] if squeeze else h), cache

    def forward(self, x: np.ndarray) -> np.ndarray:
        out, self._cache = self.forward_with_cache(x)
        return out

    __call__ = forward

    def backward(self, output_gradient: np.ndarray,
                 cache: Optional[ForwardCache] = None) -> tuple[list[np.ndarray], np.ndarray]:
        """Reverse pass: (parameter gradients in ``params`` order, input gradient)."""
        cache = cache or self._cache
        if cache is None:
            raise DimensionError("backward() needs a preceding forward pass")
        grad = np.asarray(output_gradient, dtype=np.float64)
        if cache.squeeze:
            grad = grad[None, :]
        grads: list[np.ndarray] = [None] * (2 * len(self.weights))  # type: ignore[list-item]
        last = len(self.weights) - 1
        for i in range(last, -1, -1):
            if i != last:
                grad = grad * (cache.pre_activations[i] > 0.0)
            grads[2 * i] = cache.inputs[i].T @ grad
            grads[2 * i + 1] = grad.sum(axis=0)
            grad = grad @ self.weights[i].T
        return grads, (grad[0] if cache.squeeze else grad)
