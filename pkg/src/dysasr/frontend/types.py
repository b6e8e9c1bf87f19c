"""Feature matrices and front-end configuration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..framing import SAMPLE_RATE

#: Base feature kinds; derived kinds append "+d" (deltas) and/or take a
#: "spliced-" prefix, e.g. "spliced-gfb+d".
BASE_KINDS = ("mfb", "gfb", "nmc", "tv", "bn")


def base_kind(kind: str) -> str:
    """Strip splice/delta decorations: 'spliced-gfb+d' -> 'gfb'."""
    k = kind.removeprefix("spliced-")
    return k.split("+", 1)[0]


@dataclass
class FeatureMatrix:
    """frames x dims real matrix with a named feature kind (10 ms frames)."""

    data: np.ndarray
    kind: str
    utt_id: str = ""

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise ValidationError(f"feature data must be 2-D, got {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise ValidationError(f"{self.kind} features contain NaN/Inf")
        if base_kind(self.kind) not in BASE_KINDS:
            raise ValidationError(f"unknown feature kind {self.kind!r}")

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def dims(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class FrontendConfig:
    sample_rate: int = SAMPLE_RATE
    n_channels: int = 40
    fmin: float = 100.0
    fmax: float = 7600.0
    log_floor: float = 1e-10
    delta_window: int = 2
    n_fft: int = 512

    def __post_init__(self):
        if not 0 < self.fmin < self.fmax <= self.sample_rate / 2:
            raise ValidationError(
                f"need 0 < fmin < fmax <= rate/2, got {self.fmin}, {self.fmax}"
            )
        if self.n_channels < 1:
            raise ValidationError("n_channels must be >= 1")
        if self.log_floor <= 0:
            raise ValidationError("log_floor must be > 0")
