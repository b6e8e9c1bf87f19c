"""On-disk model bundles for CLI stages.

A bundle is a directory-free trio of files sharing one stem:
  <stem>          network checkpoint (NNCK1)
  <stem>.meta.json  estimator class + constructor params (sorted keys)
  <stem>.norm     optional feature-normalizer stats

All three are deterministic byte-for-byte for fixed inputs.
"""

from __future__ import annotations

import json
import os

from .arch import FrameClassifier
from .errors import UnsupportedFormatError
from .frontend import FeatureNormalizer
from .inversion import SpeechInverter
from .nn import load_checkpoint, save_checkpoint


def _meta_path(stem: str) -> str:
    return stem + ".meta.json"


def _norm_path(stem: str) -> str:
    return stem + ".norm"


def _write_meta(stem: str, kind: str, params: dict) -> None:
    with open(_meta_path(stem), "w", encoding="utf-8") as f:
        json.dump({"kind": kind, "params": params}, f, sort_keys=True, indent=1)
        f.write("\n")


def save_classifier(stem: str, clf: FrameClassifier,
                    normalizer: FeatureNormalizer | None = None) -> None:
    save_checkpoint(stem, clf.network_)
    _write_meta(stem, "frame-classifier", clf.get_params())
    if normalizer is not None:
        normalizer.save(_norm_path(stem))


def save_inverter(stem: str, inv: SpeechInverter) -> None:
    save_checkpoint(stem, inv.network_)
    _write_meta(stem, "speech-inverter", inv.get_params())
    inv.normalizer_.save(_norm_path(stem))


def load_model(stem: str):
    """Load a bundle; returns (estimator, normalizer or None)."""
    with open(_meta_path(stem), encoding="utf-8") as f:
        meta = json.load(f)
    net = load_checkpoint(stem)
    normalizer = None
    if os.path.exists(_norm_path(stem)):
        normalizer = FeatureNormalizer.load(_norm_path(stem))
    if meta["kind"] == "frame-classifier":
        est = FrameClassifier(**meta["params"])
        est.network_ = net
    elif meta["kind"] == "speech-inverter":
        est = SpeechInverter(**meta["params"])
        est.network_ = net
        est.normalizer_ = normalizer
    else:
        raise UnsupportedFormatError(f"unknown model kind {meta['kind']!r}")
    return est, normalizer
