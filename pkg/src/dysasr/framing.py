"""Global framing policy: 16 kHz audio, 25 ms Hamming windows, 10 ms hop.

Every component that converts between sample counts and frame counts goes
through these helpers so corpus generation, feature extraction and label
alignment cannot drift apart.
"""

SAMPLE_RATE = 16000
WINDOW_SAMPLES = 400  # 25 ms
HOP_SAMPLES = 160  # 10 ms


def num_frames(n_samples: int) -> int:
    """Frame count for a signal of `n_samples`; requires one full window."""
    if n_samples < WINDOW_SAMPLES:
        return 0
    return 1 + (n_samples - WINDOW_SAMPLES) // HOP_SAMPLES


def samples_for_frames(n_frames: int) -> int:
    """Smallest sample count that yields exactly `n_frames` frames."""
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    return WINDOW_SAMPLES + HOP_SAMPLES * (n_frames - 1)
