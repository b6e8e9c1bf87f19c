"""Corpus-level Z-normalization, sklearn-style."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..errors import NotTrainedError, ValidationError
from .types import FeatureMatrix

STD_FLOOR = 1e-8


class FeatureNormalizer(TransformerMixin, BaseEstimator):
    """Per-dimension mean/stdev normalizer fitted on the training corpus.

    `fit` accepts a list of FeatureMatrix (or plain arrays); `transform`
    maps a single FeatureMatrix. Stats are immutable after fit.
    """

    def __init__(self, std_floor: float = STD_FLOOR):
        self.std_floor = std_floor
        self.mean_ = None
        self.std_ = None

    def fit(self, features, y=None):
        arrays = [f.data if isinstance(f, FeatureMatrix) else np.asarray(f) for f in features]
        if not arrays:
            raise ValidationError("cannot fit a normalizer on an empty corpus")
        stacked = np.concatenate(arrays, axis=0)
        self.mean_ = stacked.mean(axis=0)
        self.std_ = np.maximum(stacked.std(axis=0), self.std_floor)
        return self

    def transform(self, fm: FeatureMatrix) -> FeatureMatrix:
        if self.mean_ is None:
            raise NotTrainedError("FeatureNormalizer used before fit")
        return FeatureMatrix(
            (fm.data - self.mean_) / self.std_, kind=fm.kind, utt_id=fm.utt_id
        )

    def transform_all(self, features: list[FeatureMatrix]) -> list[FeatureMatrix]:
        return [self.transform(f) for f in features]

    def save(self, path: str) -> None:
        # single .npy (zip archives embed timestamps, breaking reproducibility)
        if self.mean_ is None:
            raise NotTrainedError("nothing to save before fit")
        packed = np.stack([self.mean_, self.std_]).astype(np.float64)
        with open(path, "wb") as f:
            np.save(f, packed)
            np.save(f, np.float64(self.std_floor))

    @classmethod
    def load(cls, path: str) -> "FeatureNormalizer":
        with open(path, "rb") as f:
            packed = np.load(f)
            std_floor = float(np.load(f))
        norm = cls(std_floor=std_floor)
        norm.mean_ = packed[0]
        norm.std_ = packed[1]
        return norm
