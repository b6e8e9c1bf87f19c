"""Neural-network layers with explicit forward/backward passes.

All layers consume and produce flat (batch, dims) matrices. Convolutional
layers interpret their input through a Geometry describing the flattened
layout: index = time * (chan * freq) + chan * freq_dims + freq, which is
exactly what `frontend.splice(frontend.add_deltas(...))` produces.

Weight init is uniform +-1/sqrt(fan_in) with zero biases, drawn from the
rng passed to the constructor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GeometryError


@dataclass(frozen=True)
class Geometry:
    """Flattened-layout descriptor: (time, channels, freq)."""

    n_time: int
    n_chan: int
    n_freq: int

    @property
    def size(self) -> int:
        return self.n_time * self.n_chan * self.n_freq


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


class Layer:
    """Base layer; subclasses fill in forward/backward and params."""

    def params(self) -> list[np.ndarray]:
        return []

    def grads(self) -> list[np.ndarray]:
        return []

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, gout: np.ndarray,
                 need_input_grad: bool = True) -> np.ndarray | None:
        """Fill parameter grads; return the input gradient, or None when the
        caller does not need it (first layer of a network)."""
        raise NotImplementedError

    @property
    def out_dim(self) -> int:
        raise NotImplementedError

    def config(self) -> dict:
        raise NotImplementedError


class Dense(Layer):
    """Fully connected layer with sigmoid, linear or softmax activation."""

    def __init__(self, n_in: int, n_out: int, activation: str = "sigmoid",
                 rng: np.random.Generator | None = None, dtype=np.float32):
        if activation not in ("sigmoid", "linear", "softmax"):
            raise ValueError(f"unknown activation {activation!r}")
        self.n_in = n_in
        self.n_out = n_out
        self.activation = activation
        rng = rng or np.random.default_rng(0)
        # Glorot uniform; the x4 factor keeps logistic units out of their
        # flat region so deep stacks still pass gradient
        limit = np.sqrt(6.0 / (n_in + n_out))
        if activation == "sigmoid":
            limit *= 4.0
        self.W = rng.uniform(-limit, limit, size=(n_in, n_out)).astype(dtype)
        self.b = np.zeros(n_out, dtype=dtype)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._x = None
        self._out = None

    def params(self):
        return [self.W, self.b]

    def grads(self):
        return [self.dW, self.db]

    @property
    def out_dim(self):
        return self.n_out

    def forward(self, x):
        self._x = x = np.asarray(x, dtype=self.W.dtype)
        z = x @ self.W + self.b
        if self.activation == "sigmoid":
            self._out = _sigmoid(z)
        elif self.activation == "softmax":
            z = z - z.max(axis=1, keepdims=True)
            e = np.exp(z)
            self._out = e / e.sum(axis=1, keepdims=True)
        else:
            self._out = z
        return self._out

    def backward(self, gout, need_input_grad=True):
        """Propagate gradients; for softmax, `gout` must already be the
        pre-activation gradient (softmax - onehot scaled), as produced by
        the cross-entropy loss."""
        if self.activation == "sigmoid":
            dz = gout * self._out * (1.0 - self._out)
        else:
            dz = gout
        dz = dz.astype(self.W.dtype)
        self.dW[...] = self._x.T @ dz
        self.db[...] = dz.sum(axis=0)
        if not need_input_grad:
            return None
        return dz @ self.W.T

    def config(self):
        return {
            "type": "dense",
            "n_in": self.n_in,
            "n_out": self.n_out,
            "activation": self.activation,
        }


class Conv1D(Layer):
    """1-D convolution along time or freq, non-overlapping max-pool, sigmoid.

    The filter spans the full extent of the non-convolved axes, so a freq
    filter has shape (time, chan, span) and a time filter (span, chan, freq).
    Pool remainder positions are truncated. Output layout: [position][filter].
    """

    def __init__(self, axis: str, n_filters: int, span: int, pool: int,
                 geometry: Geometry, rng: np.random.Generator | None = None,
                 dtype=np.float32):
        if axis not in ("time", "freq"):
            raise ValueError(f"axis must be 'time' or 'freq', got {axis!r}")
        self.axis = axis
        self.n_filters = n_filters
        self.span = span
        self.pool = pool
        self.geometry = geometry
        g = geometry
        extent = g.n_freq if axis == "freq" else g.n_time
        if span > extent:
            raise GeometryError(f"span {span} exceeds {axis} extent {extent}")
        self.n_positions = extent - span + 1
        self.n_pooled = self.n_positions // pool
        if self.n_pooled < 1:
            raise GeometryError("pool size larger than number of positions")
        if axis == "freq":
            fan_in = g.n_time * g.n_chan * span
        else:
            fan_in = span * g.n_chan * g.n_freq
        self.fan_in = fan_in
        rng = rng or np.random.default_rng(0)
        # Glorot uniform with the logistic x4 factor (sigmoid after pooling)
        limit = 4.0 * np.sqrt(6.0 / (fan_in + n_filters))
        self.W = rng.uniform(-limit, limit, size=(n_filters, fan_in)).astype(dtype)
        self.b = np.zeros(n_filters, dtype=dtype)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._cols = None
        self._argmax = None
        self._out = None

    def params(self):
        return [self.W, self.b]

    def grads(self):
        return [self.dW, self.db]

    @property
    def out_dim(self):
        return self.n_pooled * self.n_filters

    def _im2col(self, x4):
        # x4: (B, time, chan, freq) -> (B, positions, fan_in)
        if self.axis == "freq":
            win = np.lib.stride_tricks.sliding_window_view(x4, self.span, axis=3)
            win = win.transpose(0, 3, 1, 2, 4)  # (B, P, time, chan, span)
        else:
            win = np.lib.stride_tricks.sliding_window_view(x4, self.span, axis=1)
            win = win.transpose(0, 1, 4, 2, 3)  # (B, P, span, chan, freq)
        return win.reshape(len(x4), self.n_positions, self.fan_in)

    def forward(self, x):
        g = self.geometry
        x = np.asarray(x, dtype=self.W.dtype)
        if x.shape[1] != g.size:
            raise GeometryError(f"input dim {x.shape[1]} != geometry size {g.size}")
        x4 = x.reshape(len(x), g.n_time, g.n_chan, g.n_freq)
        cols = self._im2col(x4)
        self._cols = cols
        # one large GEMM instead of a batched 3-D product
        z = (cols.reshape(-1, self.fan_in) @ self.W.T).reshape(
            len(x), self.n_positions, self.n_filters
        ) + self.b  # (B, positions, filters)
        used = self.n_pooled * self.pool
        zp = z[:, :used].reshape(len(x), self.n_pooled, self.pool, self.n_filters)
        self._argmax = zp.argmax(axis=2)
        zmax = np.take_along_axis(zp, self._argmax[:, :, None, :], axis=2)[:, :, 0, :]
        self._out = _sigmoid(zmax)
        return self._out.reshape(len(x), -1)

    def backward(self, gout, need_input_grad=True):
        B = len(gout)
        gout = gout.reshape(B, self.n_pooled, self.n_filters).astype(self.W.dtype)
        dzmax = gout * self._out * (1.0 - self._out)
        # scatter through max-pool routing
        dz = np.zeros(
            (B, self.n_pooled, self.pool, self.n_filters), dtype=self.W.dtype
        )
        np.put_along_axis(dz, self._argmax[:, :, None, :], dzmax[:, :, None, :], axis=2)
        dz_full = np.zeros((B, self.n_positions, self.n_filters), dtype=self.W.dtype)
        dz_full[:, : self.n_pooled * self.pool] = dz.reshape(B, -1, self.n_filters)

        dz2 = dz_full.reshape(-1, self.n_filters)
        cols2 = self._cols.reshape(-1, self.fan_in)
        self.dW[...] = dz2.T @ cols2
        self.db[...] = dz_full.sum(axis=(0, 1))
        if not need_input_grad:
            return None
        dcols = (dz2 @ self.W).reshape(B, self.n_positions, self.fan_in)

        g = self.geometry
        dx4 = np.zeros((B, g.n_time, g.n_chan, g.n_freq), dtype=self.W.dtype)
        for p in range(self.n_positions):
            if self.axis == "freq":
                dwin = dcols[:, p].reshape(B, g.n_time, g.n_chan, self.span)
                dx4[:, :, :, p : p + self.span] += dwin
            else:
                dwin = dcols[:, p].reshape(B, self.span, g.n_chan, g.n_freq)
                dx4[:, p : p + self.span, :, :] += dwin
        return dx4.reshape(B, -1)

    def config(self):
        return {
            "type": "conv1d",
            "axis": self.axis,
            "n_filters": self.n_filters,
            "span": self.span,
            "pool": self.pool,
            "geometry": [self.geometry.n_time, self.geometry.n_chan,
                         self.geometry.n_freq],
        }


class Parallel(Layer):
    """Parallel branches over column slices of the input, outputs fused by
    concatenation. Branch input slices may overlap (gradients are summed)."""

    def __init__(self, branches: list[tuple[slice, Layer]], in_dim: int):
        self.branches = branches
        self.in_dim = in_dim
        self._widths = [layer.out_dim for _, layer in branches]

    def params(self):
        return [p for _, layer in self.branches for p in layer.params()]

    def grads(self):
        return [g for _, layer in self.branches for g in layer.grads()]

    @property
    def out_dim(self):
        return sum(self._widths)

    def forward(self, x):
        outs = [layer.forward(x[:, sl]) for sl, layer in self.branches]
        return np.concatenate(outs, axis=1)

    def backward(self, gout, need_input_grad=True):
        if not need_input_grad:
            off = 0
            for (sl, layer), width in zip(self.branches, self._widths):
                layer.backward(gout[:, off : off + width], need_input_grad=False)
                off += width
            return None
        gin = np.zeros((len(gout), self.in_dim), dtype=gout.dtype)
        off = 0
        for (sl, layer), width in zip(self.branches, self._widths):
            gin[:, sl] += layer.backward(gout[:, off : off + width]).astype(gout.dtype)
            off += width
        return gin

    def config(self):
        return {
            "type": "parallel",
            "in_dim": self.in_dim,
            "branches": [
                {"slice": [sl.start or 0, sl.stop], "layer": layer.config()}
                for sl, layer in self.branches
            ],
        }
