"""Builders for the four acoustic-model architectures.

All models map a spliced feature vector (layout [frame][stream][bin], see
frontend.splice) to phone-state posteriors:

  dnn    fully connected sigmoid stack
  cnn    frequency convolution (200 filters, span 8, pool 3) + stack
  tfcnn  parallel frequency convolution and time convolution (75 filters,
         span 8, pool 5), fused by concatenation, + stack
  fcnn   tfcnn acoustic branches plus a time convolution (75 filters,
         span 8, pool 5) over a spliced TV context, all fused, + stack

Size classes: small = 4 hidden layers of 1024 units (dysarthric-data
scale), large = 6 x 2048 (normal-data scale). An optional bottleneck
replaces the third hidden layer of the dense stack with a 60-dim linear
layer.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .errors import GeometryError, NotTrainedError, ValidationError
from .nn import Conv1D, Dense, Geometry, Network, Parallel, TrainConfig, sgd_train

ARCH_KINDS = ("dnn", "cnn", "tfcnn", "fcnn")
SIZE_CLASSES = {"small": (4, 1024), "large": (6, 2048)}

FREQ_FILTERS = 200
FREQ_SPAN = 8
FREQ_POOL = 3
TIME_FILTERS = 75
TIME_SPAN = 8
TIME_POOL = 5

BOTTLENECK_DIM = 60
BOTTLENECK_LAYER = 3  # 1-based index into the dense hidden stack


def _dense_stack(
    in_dim: int,
    n_hidden: int,
    width: int,
    n_classes: int,
    bottleneck: int | None,
    rng: np.random.Generator,
) -> list:
    if bottleneck is not None and not 1 <= BOTTLENECK_LAYER <= n_hidden:
        raise GeometryError(
            f"bottleneck layer {BOTTLENECK_LAYER} out of range for "
            f"{n_hidden} hidden layers"
        )
    layers = []
    prev = in_dim
    for i in range(1, n_hidden + 1):
        if bottleneck is not None and i == BOTTLENECK_LAYER:
            layers.append(Dense(prev, bottleneck, "linear", rng))
            prev = bottleneck
        else:
            layers.append(Dense(prev, width, "sigmoid", rng))
            prev = width
    layers.append(Dense(prev, n_classes, "softmax", rng))
    return layers


def build_acoustic_model(
    kind: str,
    size: str,
    n_classes: int,
    acoustic_geometry: Geometry = Geometry(17, 3, 40),
    tv_geometry: Geometry | None = None,
    bottleneck: int | None = None,
    seed: int = 0,
) -> Network:
    """Build an untrained acoustic model as a Network.

    `bottleneck` is the bottleneck dimensionality (usually 60), inserted at
    the third hidden layer. fcnn requires `tv_geometry`; the TV block is
    expected concatenated after the acoustic block in the input vector.
    """
    if kind not in ARCH_KINDS:
        raise ValidationError(f"unknown architecture {kind!r}")
    if size not in SIZE_CLASSES:
        raise ValidationError(f"unknown size class {size!r}")
    n_hidden, width = SIZE_CLASSES[size]
    rng = np.random.default_rng(seed)
    ag = acoustic_geometry
    a_dim = ag.size

    if kind == "dnn":
        in_dim = a_dim
        front: list = []
        stack_in = in_dim
    elif kind == "cnn":
        conv = Conv1D("freq", FREQ_FILTERS, FREQ_SPAN, FREQ_POOL, ag, rng)
        front = [conv]
        stack_in = conv.out_dim
    elif kind == "tfcnn":
        fconv = Conv1D("freq", FREQ_FILTERS, FREQ_SPAN, FREQ_POOL, ag, rng)
        tconv = Conv1D("time", TIME_FILTERS, TIME_SPAN, TIME_POOL, ag, rng)
        fusion = Parallel([(slice(0, a_dim), fconv), (slice(0, a_dim), tconv)], a_dim)
        front = [fusion]
        stack_in = fusion.out_dim
    else:  # fcnn
        if tv_geometry is None:
            raise GeometryError("fcnn requires a TV input branch")
        tvg = tv_geometry
        in_dim = a_dim + tvg.size
        fconv = Conv1D("freq", FREQ_FILTERS, FREQ_SPAN, FREQ_POOL, ag, rng)
        tconv = Conv1D("time", TIME_FILTERS, TIME_SPAN, TIME_POOL, ag, rng)
        tv_conv = Conv1D("time", TIME_FILTERS, TIME_SPAN, TIME_POOL, tvg, rng)
        fusion = Parallel(
            [
                (slice(0, a_dim), fconv),
                (slice(0, a_dim), tconv),
                (slice(a_dim, in_dim), tv_conv),
            ],
            in_dim,
        )
        front = [fusion]
        stack_in = fusion.out_dim

    layers = front + _dense_stack(stack_in, n_hidden, width, n_classes, bottleneck, rng)
    return Network(layers, loss="ce")


def bottleneck_layer_index(net: Network) -> int:
    """Index (for forward_until) of the linear bottleneck layer, inclusive."""
    for i, layer in enumerate(net.layers):
        if isinstance(layer, Dense) and layer.activation == "linear":
            return i + 1
    raise GeometryError("network has no bottleneck layer")


class FrameClassifier(BaseEstimator):
    """sklearn-style frame-level phone-state classifier.

    X is a (frames, dims) float matrix of spliced features (acoustic block
    first, optional TV block concatenated for fcnn); y an int label vector.
    """

    def __init__(
        self,
        arch: str = "dnn",
        size: str = "small",
        n_classes: int = 39,
        freq_bins: int = 40,
        context: int = 17,
        channels: int = 3,
        tv_dims: int = 0,
        bottleneck: int | None = None,
        lr0: float = 0.008,
        batch: int = 256,
        max_epochs: int = 30,
        min_epochs: int = 0,
        seed: int = 0,
        cv_improvement_threshold: float = 0.001,
        target_train_accuracy: float | None = None,
    ):
        self.arch = arch
        self.size = size
        self.n_classes = n_classes
        self.freq_bins = freq_bins
        self.context = context
        self.channels = channels
        self.tv_dims = tv_dims
        self.bottleneck = bottleneck
        self.lr0 = lr0
        self.batch = batch
        self.max_epochs = max_epochs
        self.min_epochs = min_epochs
        self.seed = seed
        self.cv_improvement_threshold = cv_improvement_threshold
        self.target_train_accuracy = target_train_accuracy
        self.network_ = None
        self.train_log_ = None

    def _build(self) -> Network:
        ag = Geometry(self.context, self.channels, self.freq_bins)
        tvg = (
            Geometry(self.context, 1, self.tv_dims) if self.arch == "fcnn" else None
        )
        return build_acoustic_model(
            self.arch, self.size, self.n_classes, ag, tvg,
            bottleneck=self.bottleneck, seed=self.seed,
        )

    def fit(self, X, y, X_cv=None, y_cv=None):
        self.network_ = self._build()
        if X_cv is None:
            X_cv, y_cv = X, y
        cfg = TrainConfig(
            lr0=self.lr0,
            batch=self.batch,
            max_epochs=self.max_epochs,
            min_epochs=self.min_epochs,
            seed=self.seed,
            cv_improvement_threshold=self.cv_improvement_threshold,
            target_train_accuracy=self.target_train_accuracy,
        )
        self.train_log_ = sgd_train(
            self.network_, np.asarray(X, dtype=np.float32), np.asarray(y),
            np.asarray(X_cv, dtype=np.float32), np.asarray(y_cv), cfg,
        )
        return self

    def _check_fitted(self):
        if self.network_ is None:
            raise NotTrainedError("FrameClassifier used before fit")

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        return self.network_.forward(np.asarray(X, dtype=np.float32))

    def predict(self, X) -> np.ndarray:
        return self.predict_proba(X).argmax(axis=1)

    def score(self, X, y) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y)))

    def extract_bottleneck(self, X) -> np.ndarray:
        """Activations at the 60-dim linear bottleneck layer."""
        self._check_fitted()
        idx = bottleneck_layer_index(self.network_)
        return self.network_.forward_until(idx, np.asarray(X, dtype=np.float32))
