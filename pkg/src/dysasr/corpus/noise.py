"""Additive noise mixing at an exact SNR."""

from __future__ import annotations

import zlib

import numpy as np

from ..errors import DegenerateInputError, ValidationError
from ..framing import SAMPLE_RATE
from .types import Utterance

NOISE_KINDS = ("white", "hum", "babble")


def _make_noise(kind: str, n: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "white":
        return rng.standard_normal(n)
    if kind == "hum":
        t = np.arange(n) / SAMPLE_RATE
        phases = rng.uniform(0.0, 2.0 * np.pi, size=3)
        return sum(
            (1.0 / (k + 1)) * np.sin(2.0 * np.pi * 50.0 * (k + 1) * t + phases[k])
            for k in range(3)
        )
    if kind == "babble":
        # several independent noise streams, each amplitude-modulated at a
        # syllable-like rate, summed
        t = np.arange(n) / SAMPLE_RATE
        out = np.zeros(n)
        for _ in range(6):
            env = 1.0 + 0.8 * np.sin(
                2.0 * np.pi * rng.uniform(2.0, 8.0) * t + rng.uniform(0, 2 * np.pi)
            )
            out += env * rng.standard_normal(n)
        return out
    raise ValidationError(f"unknown noise kind {kind!r}; expected one of {NOISE_KINDS}")


def mix_noise(
    utt: Utterance, noise_kind: str, snr_db: float, seed: int = 0
) -> Utterance:
    """Return a copy of `utt` with noise added at exactly `snr_db` dB SNR.

    Labels and TV ground truth are carried over unchanged.
    """
    if not 10.0 <= snr_db <= 80.0:
        raise ValidationError(f"snr_db {snr_db} outside the supported range [10, 80]")
    signal = utt.samples
    p_signal = float(np.mean(signal**2))
    if p_signal == 0.0:
        raise DegenerateInputError("cannot mix noise into a zero-power signal")

    rng = np.random.default_rng([seed, zlib.crc32(utt.id.encode())])
    noise = _make_noise(noise_kind, len(signal), rng)
    p_noise = float(np.mean(noise**2))
    scale = np.sqrt(p_signal / (p_noise * 10.0 ** (snr_db / 10.0)))

    return Utterance(
        id=utt.id,
        samples=signal + scale * noise,
        transcription=list(utt.transcription),
        frame_labels=None if utt.frame_labels is None else utt.frame_labels.copy(),
        tv_truth=utt.tv_truth,
    )
