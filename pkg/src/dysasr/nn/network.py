"""Network container: an ordered layer stack with a loss."""

from __future__ import annotations

import copy

import numpy as np

from ..errors import GeometryError, ValidationError
from .layers import Conv1D, Dense, Geometry, Layer, Parallel

LOSSES = ("ce", "mse")


class Network:
    """Feed-forward network, optionally with one parallel branch block.

    loss 'ce' expects an integer class-label vector and a softmax output
    layer; 'mse' expects a real target matrix and a linear output layer.
    """

    def __init__(self, layers: list[Layer], loss: str = "ce"):
        if loss not in LOSSES:
            raise ValidationError(f"loss must be one of {LOSSES}")
        self.layers = layers
        self.loss = loss

    # ---- forward / backward -------------------------------------------------

    def forward(self, x: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def forward_until(self, n_layers: int, x: np.ndarray) -> np.ndarray:
        """Activations after the first `n_layers` layers."""
        for layer in self.layers[:n_layers]:
            x = layer.forward(x)
        return x

    def loss_value(self, out: np.ndarray, targets: np.ndarray) -> float:
        if self.loss == "ce":
            p = out[np.arange(len(out)), targets]
            return float(-np.mean(np.log(np.maximum(p, 1e-30))))
        diff = out - targets
        return float(0.5 * np.mean(np.sum(diff * diff, axis=1)))

    def _output_grad(self, out: np.ndarray, targets: np.ndarray) -> np.ndarray:
        B = len(out)
        if self.loss == "ce":
            # combined softmax + cross-entropy: pre-activation gradient
            g = out.copy()
            g[np.arange(B), targets] -= 1.0
            return g / B
        return (out - targets) / B

    def backprop(self, x: np.ndarray, targets: np.ndarray) -> float:
        """Forward + backward; fills every layer's grads, returns the loss."""
        out = self.forward(x)
        loss = self.loss_value(out, targets)
        g = self._output_grad(out, targets)
        for i, layer in enumerate(reversed(self.layers)):
            is_first_layer = i == len(self.layers) - 1
            g = layer.backward(g, need_input_grad=not is_first_layer)
        return loss

    # ---- evaluation ---------------------------------------------------------

    def predict(self, x: np.ndarray) -> np.ndarray:
        out = self.forward(x)
        return out.argmax(axis=1) if self.loss == "ce" else out

    def error_rate(self, x: np.ndarray, targets: np.ndarray,
                   batch: int = 2048) -> float:
        """Frame error rate (ce) or mean squared error (mse)."""
        total = 0.0
        for lo in range(0, len(x), batch):
            xb = x[lo : lo + batch]
            tb = targets[lo : lo + batch]
            out = self.forward(xb)
            if self.loss == "ce":
                total += float(np.sum(out.argmax(axis=1) != tb))
            else:
                total += float(np.sum((out - tb) ** 2) / tb.shape[1])
        return total / len(x)

    # ---- parameter plumbing -------------------------------------------------

    def params(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.params()]

    def grads(self) -> list[np.ndarray]:
        return [g for layer in self.layers for g in layer.grads()]

    def clone(self) -> "Network":
        return copy.deepcopy(self)

    def astype(self, dtype) -> "Network":
        """Copy with all parameters cast (float64 for gradient checking)."""
        net = self.clone()
        for layer in _walk(net.layers):
            for name in ("W", "b", "dW", "db"):
                if hasattr(layer, name):
                    setattr(layer, name, getattr(layer, name).astype(dtype))
        return net

    @property
    def n_params(self) -> int:
        return sum(p.size for p in self.params())

    def config(self) -> dict:
        return {"loss": self.loss, "layers": [l.config() for l in self.layers]}


def _walk(layers):
    for layer in layers:
        if isinstance(layer, Parallel):
            yield from _walk([l for _, l in layer.branches])
        else:
            yield layer


def layer_from_config(cfg: dict) -> Layer:
    kind = cfg["type"]
    if kind == "dense":
        return Dense(cfg["n_in"], cfg["n_out"], activation=cfg["activation"])
    if kind == "conv1d":
        return Conv1D(
            cfg["axis"], cfg["n_filters"], cfg["span"], cfg["pool"],
            Geometry(*cfg["geometry"]),
        )
    if kind == "parallel":
        branches = [
            (slice(b["slice"][0], b["slice"][1]), layer_from_config(b["layer"]))
            for b in cfg["branches"]
        ]
        return Parallel(branches, cfg["in_dim"])
    raise GeometryError(f"unknown layer type {kind!r}")


def network_from_config(cfg: dict) -> Network:
    return Network([layer_from_config(c) for c in cfg["layers"]], loss=cfg["loss"])
