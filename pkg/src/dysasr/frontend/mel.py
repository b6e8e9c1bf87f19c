"""Log-mel filterbank features."""

from __future__ import annotations

import numpy as np

from .framing import frame_signal
from .types import FeatureMatrix, FrontendConfig


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m) / 2595.0) - 1.0)


def mel_center_freqs(config: FrontendConfig) -> np.ndarray:
    """Center frequencies (Hz) of the triangular filters."""
    mels = np.linspace(
        hz_to_mel(config.fmin), hz_to_mel(config.fmax), config.n_channels + 2
    )
    return mel_to_hz(mels)[1:-1]


def mel_filter_table(config: FrontendConfig) -> np.ndarray:
    """(n_channels, n_fft//2+1) triangular weights, unit height."""
    n_bins = config.n_fft // 2 + 1
    fft_freqs = np.arange(n_bins) * config.sample_rate / config.n_fft
    mels = np.linspace(
        hz_to_mel(config.fmin), hz_to_mel(config.fmax), config.n_channels + 2
    )
    edges = mel_to_hz(mels)
    table = np.zeros((config.n_channels, n_bins))
    for ch in range(config.n_channels):
        lo, mid, hi = edges[ch], edges[ch + 1], edges[ch + 2]
        up = (fft_freqs - lo) / (mid - lo)
        down = (hi - fft_freqs) / (hi - mid)
        table[ch] = np.maximum(0.0, np.minimum(up, down))
    return table


def power_spectrum(frames: np.ndarray, config: FrontendConfig) -> np.ndarray:
    spec = np.fft.rfft(frames, n=config.n_fft, axis=1)
    return np.abs(spec) ** 2


def mel_fbank(frames: np.ndarray, config: FrontendConfig, utt_id: str = "") -> FeatureMatrix:
    """Log-mel filterbank energies from windowed frames."""
    energies = power_spectrum(frames, config) @ mel_filter_table(config).T
    data = np.log(np.maximum(energies, config.log_floor))
    return FeatureMatrix(data, kind="mfb", utt_id=utt_id)


def mfb_features(samples: np.ndarray, config: FrontendConfig, utt_id: str = "") -> FeatureMatrix:
    """Convenience: frame + window + log-mel in one call."""
    return mel_fbank(frame_signal(samples), config, utt_id=utt_id)
