"""Signal framing with the global 25 ms / 10 ms Hamming policy."""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from ..framing import HOP_SAMPLES, WINDOW_SAMPLES, num_frames


def frame_signal(samples: np.ndarray, window: bool = True) -> np.ndarray:
    """Slice a signal into Hamming-windowed frames, shape (frames, 400).

    Raises ValidationError when the signal is shorter than one window.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = num_frames(len(samples))
    if n == 0:
        raise ValidationError(
            f"signal of {len(samples)} samples is shorter than one "
            f"{WINDOW_SAMPLES}-sample window"
        )
    idx = np.arange(WINDOW_SAMPLES)[None, :] + HOP_SAMPLES * np.arange(n)[:, None]
    frames = samples[idx]
    if window:
        frames = frames * np.hamming(WINDOW_SAMPLES)[None, :]
    return frames
