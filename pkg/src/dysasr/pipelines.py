"""Bottleneck-feature training strategies and two-stage model adaptation.

Strategies (by panel):
  A  bottleneck extractor and acoustic model both trained on dysarthric data
  B  extractor on normal data (optionally adapted on dysarthric data),
     acoustic model on the dysarthric bottleneck features
  C  extractor and acoustic model on normal data, either or both optionally
     adapted on dysarthric data

After adapting an extractor, bottleneck features are re-extracted before
any downstream acoustic-model stage (recorded in the provenance).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arch import BOTTLENECK_DIM, FrameClassifier
from .errors import NotTrainedError, ValidationError
from .frontend import FeatureMatrix, base_kind, splice
from .nn import Network, TrainConfig, TrainLog, sgd_train

AM_CONTEXT = 8  # frames on either side when splicing bottleneck features


@dataclass(frozen=True)
class AdaptConfig:
    lr0: float = 0.001
    min_epochs: int = 3
    max_epochs: int = 10
    n_retrained_layers: int | str = "all"
    cv_improvement_threshold: float = 0.001

    def __post_init__(self):
        if not 1 <= self.min_epochs <= self.max_epochs:
            raise ValidationError("need 1 <= min_epochs <= max_epochs")
        if self.n_retrained_layers != "all" and int(self.n_retrained_layers) < 1:
            raise ValidationError("n_retrained_layers must be >= 1 or 'all'")


@dataclass
class FrameDataset:
    """Per-utterance network inputs + frame labels, stackable for training."""

    features: list[FeatureMatrix]
    labels: list[np.ndarray]

    def __post_init__(self):
        if len(self.features) != len(self.labels):
            raise ValidationError("features/labels length mismatch")
        for fm, lab in zip(self.features, self.labels):
            if fm.n_frames != len(lab):
                raise ValidationError(
                    f"utterance {fm.utt_id}: {fm.n_frames} feature frames vs "
                    f"{len(lab)} labels"
                )

    @property
    def kind(self) -> str:
        return self.features[0].kind if self.features else ""

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.concatenate([fm.data for fm in self.features]).astype(np.float32)
        y = np.concatenate(self.labels)
        return x, y


# ---- adaptation -------------------------------------------------------------


def adapt_network(
    net: Network,
    x: np.ndarray,
    y: np.ndarray,
    x_cv: np.ndarray,
    y_cv: np.ndarray,
    config: AdaptConfig = AdaptConfig(),
    seed: int = 0,
    epochs_override: int | None = None,
) -> tuple[Network, TrainLog]:
    """Retrain a copy of `net` on target-domain data at a reduced rate.

    Only the top `n_retrained_layers` layers are updated; the rest stay
    bit-identical. `epochs_override` (e.g. 0) bypasses the [min, max]
    clamp for identity checks.
    """
    adapted = net.clone()
    if config.n_retrained_layers == "all":
        trainable = list(adapted.layers)
    else:
        n = int(config.n_retrained_layers)
        trainable = adapted.layers[-n:]

    max_epochs = config.max_epochs if epochs_override is None else epochs_override
    min_epochs = config.min_epochs if epochs_override is None else 0
    if max_epochs == 0:
        return adapted, TrainLog(stopped_reason="zero epochs requested")

    cfg = TrainConfig(
        lr0=config.lr0,
        max_epochs=max_epochs,
        min_epochs=min_epochs,
        seed=seed,
        cv_improvement_threshold=config.cv_improvement_threshold,
    )
    log = sgd_train(adapted, x, y, x_cv, y_cv, cfg, trainable_layers=trainable)
    return adapted, log


def adapt_classifier(
    clf: FrameClassifier,
    train: FrameDataset,
    cv: FrameDataset,
    config: AdaptConfig = AdaptConfig(),
    seed: int = 0,
) -> FrameClassifier:
    """Adapted copy of a fitted FrameClassifier."""
    if clf.network_ is None:
        raise NotTrainedError("cannot adapt an unfitted classifier")
    x, y = train.stacked()
    x_cv, y_cv = cv.stacked()
    new = FrameClassifier(**clf.get_params())
    new.network_, new.train_log_ = adapt_network(
        clf.network_, x, y, x_cv, y_cv, config, seed=seed
    )
    return new


# ---- bottleneck features ----------------------------------------------------


def train_bn_extractor(
    arch: str,
    train: FrameDataset,
    cv: FrameDataset,
    size: str = "small",
    n_classes: int = 39,
    seed: int = 0,
    freq_bins: int = 40,
    channels: int = 3,
    context: int = 17,
    **train_overrides,
) -> FrameClassifier:
    """Train a classifier with a 60-dim linear bottleneck at hidden layer 3."""
    clf = FrameClassifier(
        arch=arch, size=size, n_classes=n_classes,
        freq_bins=freq_bins, channels=channels, context=context,
        bottleneck=BOTTLENECK_DIM, seed=seed, **train_overrides,
    )
    x, y = train.stacked()
    x_cv, y_cv = cv.stacked()
    return clf.fit(x, y, x_cv, y_cv)


def extract_bn(extractor: FrameClassifier, fm: FeatureMatrix) -> FeatureMatrix:
    """Bottleneck-layer activations for one utterance, kind 'bn'."""
    data = extractor.extract_bottleneck(fm.data)
    return FeatureMatrix(data.astype(np.float64), kind="bn", utt_id=fm.utt_id)


def bn_dataset(extractor: FrameClassifier, dataset: FrameDataset) -> FrameDataset:
    """Map a raw-acoustic dataset to spliced bottleneck features."""
    features = [
        splice(extract_bn(extractor, fm), AM_CONTEXT, AM_CONTEXT)
        for fm in dataset.features
    ]
    return FrameDataset(features=features, labels=list(dataset.labels))


def _train_bn_am(
    arch: str,
    train: FrameDataset,
    cv: FrameDataset,
    size: str,
    n_classes: int,
    seed: int,
    **train_overrides,
) -> FrameClassifier:
    # stage isolation: the acoustic model only ever sees bottleneck features
    if base_kind(train.kind) != "bn":
        raise ValidationError(
            f"bottleneck acoustic model got {train.kind!r} features"
        )
    clf = FrameClassifier(
        arch=arch, size=size, n_classes=n_classes, seed=seed,
        freq_bins=BOTTLENECK_DIM, context=2 * AM_CONTEXT + 1, channels=1,
        **train_overrides,
    )
    x, y = train.stacked()
    x_cv, y_cv = cv.stacked()
    return clf.fit(x, y, x_cv, y_cv)


# ---- strategy runner --------------------------------------------------------

STRATEGIES = ("A", "B", "C")


@dataclass
class StrategyResult:
    acoustic_model: FrameClassifier
    bn_extractor: FrameClassifier
    provenance: dict = field(default_factory=dict)


def run_strategy(
    strategy: str,
    bn_arch: str,
    am_arch: str,
    normal: tuple[FrameDataset, FrameDataset] | None,
    dysarthric: tuple[FrameDataset, FrameDataset] | None,
    adapt_bn: bool = False,
    adapt_am: bool = False,
    bn_size: str = "small",
    am_size: str = "small",
    n_classes: int = 39,
    seed: int = 0,
    adapt_config: AdaptConfig = AdaptConfig(),
    freq_bins: int = 40,
    channels: int = 3,
    context: int = 17,
    **train_overrides,
) -> StrategyResult:
    """Execute one bottleneck strategy end to end.

    `normal` and `dysarthric` are (train, cv) dataset pairs of spliced raw
    acoustic features. Returns the final acoustic model plus a provenance
    record naming every stage, corpus and seed.
    """
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy!r}")
    stages = []

    def need(corpus, name):
        if corpus is None:
            raise ValidationError(f"strategy {strategy} requires the {name} corpus")
        return corpus

    if strategy == "A":
        bn_train, bn_cv = need(dysarthric, "dysarthric")
        am_domain = "dysarthric"
        if adapt_bn:
            raise ValidationError("strategy A has no separate adaptation corpus")
    elif strategy == "B":
        bn_train, bn_cv = need(normal, "normal")
        am_domain = "dysarthric"
    else:  # C
        bn_train, bn_cv = need(normal, "normal")
        am_domain = "normal"

    bn_corpus_name = "dysarthric" if strategy == "A" else "normal"
    extractor = train_bn_extractor(
        bn_arch, bn_train, bn_cv, size=bn_size, n_classes=n_classes, seed=seed,
        freq_bins=freq_bins, channels=channels, context=context,
        **train_overrides,
    )
    stages.append({"stage": "train_bn", "arch": bn_arch, "corpus": bn_corpus_name,
                   "size": bn_size, "seed": seed})

    if adapt_bn:
        dys_train, dys_cv = need(dysarthric, "dysarthric")
        extractor = adapt_classifier(extractor, dys_train, dys_cv,
                                     adapt_config, seed=seed)
        stages.append({"stage": "adapt_bn", "corpus": "dysarthric", "seed": seed,
                       "note": "bottleneck features re-extracted afterwards"})

    am_train_raw, am_cv_raw = need(
        dysarthric if am_domain == "dysarthric" else normal, am_domain
    )
    am_train = bn_dataset(extractor, am_train_raw)
    am_cv = bn_dataset(extractor, am_cv_raw)
    stages.append({"stage": "extract_bn", "corpus": am_domain, "seed": seed})

    am = _train_bn_am(am_arch, am_train, am_cv, am_size, n_classes, seed,
                      **train_overrides)
    stages.append({"stage": "train_am", "arch": am_arch, "corpus": am_domain,
                   "size": am_size, "seed": seed})

    if adapt_am:
        if strategy != "C":
            raise ValidationError(
                "acoustic-model adaptation only applies to strategy C "
                "(the model is already trained on dysarthric data otherwise)"
            )
        dys_train, dys_cv = need(dysarthric, "dysarthric")
        am = adapt_classifier(
            am, bn_dataset(extractor, dys_train), bn_dataset(extractor, dys_cv),
            adapt_config, seed=seed,
        )
        stages.append({"stage": "adapt_am", "corpus": "dysarthric", "seed": seed})

    provenance = {
        "strategy": strategy,
        "bn_arch": bn_arch,
        "am_arch": am_arch,
        "adapt_bn": adapt_bn,
        "adapt_am": adapt_am,
        "seed": seed,
        "stages": stages,
    }
    return StrategyResult(acoustic_model=am, bn_extractor=extractor,
                          provenance=provenance)
