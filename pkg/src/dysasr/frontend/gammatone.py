"""Gammatone filterbank on the ERB scale (Glasberg-Moore)."""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

from ..framing import HOP_SAMPLES, WINDOW_SAMPLES, num_frames
from ..errors import ValidationError
from .types import FeatureMatrix, FrontendConfig

# Glasberg-Moore ERB parameters
_EAR_Q = 4.37 / 1000.0
_MIN_BW = 24.7
_GT_ORDER_BW = 1.019  # bandwidth factor for a 4th-order gammatone

FILTER_TAPS = 1024  # 64 ms impulse response


def erb_bandwidth(f_hz):
    """Equivalent rectangular bandwidth in Hz: 24.7 * (4.37 f/1000 + 1)."""
    return _MIN_BW * (_EAR_Q * np.asarray(f_hz) + 1.0)


def hz_to_erb_number(f_hz):
    return 21.4 * np.log10(_EAR_Q * np.asarray(f_hz) + 1.0)


def erb_number_to_hz(e):
    return (10.0 ** (np.asarray(e) / 21.4) - 1.0) / _EAR_Q


def erb_center_freqs(config: FrontendConfig) -> np.ndarray:
    """n_channels frequencies equally spaced on the ERB-number scale."""
    lo = hz_to_erb_number(config.fmin)
    hi = hz_to_erb_number(config.fmax)
    return erb_number_to_hz(np.linspace(lo, hi, config.n_channels))


def gammatone_impulse_responses(config: FrontendConfig) -> np.ndarray:
    """(n_channels, FILTER_TAPS) 4th-order gammatone FIRs, unit peak gain."""
    t = np.arange(FILTER_TAPS) / config.sample_rate
    cfs = erb_center_freqs(config)
    h = (
        t[None, :] ** 3
        * np.exp(-2.0 * np.pi * _GT_ORDER_BW * erb_bandwidth(cfs)[:, None] * t[None, :])
        * np.cos(2.0 * np.pi * cfs[:, None] * t[None, :])
    )
    gain = np.abs(np.fft.rfft(h, n=4 * FILTER_TAPS, axis=1)).max(axis=1)
    return h / gain[:, None]


def gammatone_subbands(samples: np.ndarray, config: FrontendConfig) -> np.ndarray:
    """Causal filterbank output, shape (n_channels, len(samples))."""
    samples = np.asarray(samples, dtype=np.float64)
    h = gammatone_impulse_responses(config)
    out = fftconvolve(h, samples[None, :], axes=1)[:, : len(samples)]
    return out


def _frame_log_energy(subbands: np.ndarray, config: FrontendConfig) -> np.ndarray:
    n = num_frames(subbands.shape[1])
    if n == 0:
        raise ValidationError("signal shorter than one analysis window")
    idx = np.arange(WINDOW_SAMPLES)[None, :] + HOP_SAMPLES * np.arange(n)[:, None]
    energy = (subbands[:, idx] ** 2).sum(axis=2)  # (channels, frames)
    return np.log(np.maximum(energy.T, config.log_floor))


def gammatone_fbank(
    samples: np.ndarray, config: FrontendConfig, utt_id: str = ""
) -> FeatureMatrix:
    """Per-frame log energy of each gammatone channel."""
    return FeatureMatrix(
        _frame_log_energy(gammatone_subbands(samples, config), config),
        kind="gfb",
        utt_id=utt_id,
    )
