"""Subband amplitude-modulation features.

The construction is a simplified AM tracker: gammatone subbands are
half-wave rectified and low-pass filtered to an envelope, and each frame
keeps the log mean envelope per channel. Corpus-level Z-normalization is
applied separately by FeatureNormalizer.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import butter, filtfilt

from ..errors import ValidationError
from ..framing import HOP_SAMPLES, WINDOW_SAMPLES, num_frames
from .gammatone import gammatone_subbands
from .types import FeatureMatrix, FrontendConfig

ENVELOPE_CUTOFF_HZ = 28.0


def am_envelopes(samples: np.ndarray, config: FrontendConfig) -> np.ndarray:
    """Subband AM envelopes at sample rate, shape (n_channels, n_samples)."""
    sub = gammatone_subbands(samples, config)
    rectified = np.maximum(sub, 0.0)
    # zero-phase smoothing keeps the envelope aligned with the modulator
    b, a = butter(4, ENVELOPE_CUTOFF_HZ / (config.sample_rate / 2.0))
    return filtfilt(b, a, rectified, axis=1)


def nmc_features(
    samples: np.ndarray, config: FrontendConfig, utt_id: str = ""
) -> FeatureMatrix:
    """Per-frame log mean subband envelope (un-normalized), dims = n_channels."""
    env = am_envelopes(samples, config)
    n = num_frames(env.shape[1])
    if n == 0:
        raise ValidationError("signal shorter than one analysis window")
    idx = np.arange(WINDOW_SAMPLES)[None, :] + HOP_SAMPLES * np.arange(n)[:, None]
    mean_env = env[:, idx].mean(axis=2)  # (channels, frames)
    data = np.log(np.maximum(mean_env.T, config.log_floor))
    return FeatureMatrix(data, kind="nmc", utt_id=utt_id)
