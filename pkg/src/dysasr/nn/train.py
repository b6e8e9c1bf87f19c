"""Mini-batch SGD with constant-then-halving learning-rate schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DivergenceError, ValidationError
from .network import Network


@dataclass(frozen=True)
class TrainConfig:
    lr0: float = 0.008
    constant_epochs: int = 4
    batch: int = 256
    seed: int = 0
    max_epochs: int = 30
    min_epochs: int = 0
    # CV error must drop by this much (absolute) to count as significant
    cv_improvement_threshold: float = 0.001
    # optional early exit once training accuracy reaches this level (ce only)
    target_train_accuracy: float | None = None

    def __post_init__(self):
        if self.lr0 <= 0:
            raise ValidationError("lr0 must be > 0")
        if self.batch < 1:
            raise ValidationError("batch must be >= 1")


@dataclass
class TrainLog:
    learning_rates: list[float] = field(default_factory=list)
    train_losses: list[float] = field(default_factory=list)
    cv_errors: list[float] = field(default_factory=list)
    stopped_reason: str = ""

    @property
    def epochs(self) -> int:
        return len(self.learning_rates)


def sgd_train(
    net: Network,
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_cv: np.ndarray,
    y_cv: np.ndarray,
    config: TrainConfig = TrainConfig(),
    trainable_layers: list | None = None,
) -> TrainLog:
    """Train `net` in place; deterministic given config.seed.

    `trainable_layers` restricts updates to the given layer objects (used by
    model adaptation to freeze lower layers); None trains everything.
    """
    if len(x_train) == 0 or len(x_cv) == 0:
        raise ValidationError("train and cv sets must be non-empty")
    if trainable_layers is None:
        trainable_layers = list(net.layers)
    trainable = [(p, g) for layer in trainable_layers
                 for p, g in zip(layer.params(), layer.grads())]

    log = TrainLog()
    lr = config.lr0
    best_cv = np.inf
    halved_without_gain = False

    for epoch in range(1, config.max_epochs + 1):
        order = np.random.default_rng([config.seed, epoch]).permutation(len(x_train))
        epoch_loss = 0.0
        n_batches = 0
        for lo in range(0, len(order), config.batch):
            idx = order[lo : lo + config.batch]
            loss = net.backprop(x_train[idx], y_train[idx])
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"loss became non-finite at epoch {epoch}, batch {n_batches}"
                )
            epoch_loss += loss
            n_batches += 1
            for p, g in trainable:
                p -= lr * g.astype(p.dtype)

        cv_err = net.error_rate(x_cv, y_cv)
        log.learning_rates.append(lr)
        log.train_losses.append(epoch_loss / max(n_batches, 1))
        log.cv_errors.append(cv_err)

        if config.target_train_accuracy is not None and net.loss == "ce":
            # cheap gate: only pay for a full-train pass once the cv set
            # (usually a train subsample in memorization runs) looks close
            if 1.0 - cv_err >= config.target_train_accuracy:
                train_err = net.error_rate(x_train, y_train)
                if 1.0 - train_err >= config.target_train_accuracy:
                    log.stopped_reason = "target train accuracy reached"
                    break

        improved = best_cv - cv_err >= config.cv_improvement_threshold
        best_cv = min(best_cv, cv_err)

        if epoch < max(config.constant_epochs, config.min_epochs):
            continue
        if not improved:
            if halved_without_gain and epoch >= config.min_epochs:
                log.stopped_reason = "no improvement after halving"
                break
            lr /= 2.0
            halved_without_gain = True
        else:
            halved_without_gain = False

    if not log.stopped_reason:
        log.stopped_reason = "max epochs"
    return log
