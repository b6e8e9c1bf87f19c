"""Core corpus data types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from ..framing import num_frames
from .lexicon import NUM_LABELS, TV_NAMES


@dataclass
class TVTrajectory:
    """Per-frame values of the six vocal-tract variables (10 ms frame period)."""

    values: np.ndarray  # (frames, 6) float64

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[1] != len(TV_NAMES):
            raise ValidationError(
                f"TV trajectory must be (frames, 6), got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("TV trajectory contains non-finite values")

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]


@dataclass
class Utterance:
    """Mono 16 kHz audio with transcription and optional ground truth."""

    id: str
    samples: np.ndarray  # (n,) float64 in [-1, 1)
    transcription: list[str]
    frame_labels: np.ndarray | None = None  # (frames,) int, one per 10 ms
    tv_truth: TVTrajectory | None = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.size == 0:
            raise ValidationError(f"utterance {self.id}: empty audio")
        if self.frame_labels is not None:
            self.frame_labels = np.asarray(self.frame_labels, dtype=np.int64)
            expected = num_frames(len(self.samples))
            if len(self.frame_labels) != expected:
                raise ValidationError(
                    f"utterance {self.id}: {len(self.frame_labels)} frame labels "
                    f"but framing policy implies {expected} frames"
                )
            if self.frame_labels.size and (
                self.frame_labels.min() < 0 or self.frame_labels.max() >= NUM_LABELS
            ):
                raise ValidationError(
                    f"utterance {self.id}: labels outside [0, {NUM_LABELS})"
                )

    @property
    def n_frames(self) -> int:
        return num_frames(len(self.samples))


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    audio_path: str
    transcription: list[str]
    align_path: str | None = None
    tv_path: str | None = None


@dataclass
class Manifest:
    entries: list[ManifestEntry]
    label_inventory: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class DysarthriaProfile:
    """Articulatory perturbation applied to generated trajectories.

    slowdown stretches gesture timing, undershoot shrinks target excursions
    toward neutral, and tremor adds a sinusoidal oscillation to every TV.
    Labels are never perturbed.
    """

    slowdown: float = 1.0
    undershoot: float = 0.0
    tremor_amp: float = 0.0
    tremor_hz: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.slowdown < 1.0:
            raise ValidationError("slowdown must be >= 1")
        if not 0.0 <= self.undershoot <= 1.0:
            raise ValidationError("undershoot must be in [0, 1]")
        if self.tremor_amp < 0.0:
            raise ValidationError("tremor_amp must be >= 0")
        if self.tremor_hz <= 0.0:
            raise ValidationError("tremor_hz must be > 0")
