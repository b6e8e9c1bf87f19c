"""Temporal context: regression deltas and frame splicing."""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from .types import FeatureMatrix


def _regression_delta(x: np.ndarray, window: int) -> np.ndarray:
    # d_t = sum_n n*(x[t+n] - x[t-n]) / (2 * sum_n n^2), edges replicated
    denom = 2.0 * sum(n * n for n in range(1, window + 1))
    padded = np.pad(x, ((window, window), (0, 0)), mode="edge")
    d = np.zeros_like(x)
    t0 = window
    for n in range(1, window + 1):
        d += n * (padded[t0 + n : t0 + n + len(x)] - padded[t0 - n : t0 - n + len(x)])
    return d / denom


def add_deltas(fm: FeatureMatrix, window: int = 2) -> FeatureMatrix:
    """Append deltas and delta-deltas; output dims = 3 x input dims."""
    if fm.n_frames < 1:
        raise ValidationError("need at least one frame")
    d = _regression_delta(fm.data, window)
    dd = _regression_delta(d, window)
    return FeatureMatrix(
        np.concatenate([fm.data, d, dd], axis=1),
        kind=fm.kind if "+d" in fm.kind else fm.kind + "+d",
        utt_id=fm.utt_id,
    )


def splice(fm: FeatureMatrix, left: int, right: int) -> FeatureMatrix:
    """Concatenate rows t-left..t+right per frame, edges replicated.

    Output dims = (left + right + 1) x input dims; row layout is
    time-major: [frame t-left | ... | frame t+right].
    """
    if left < 0 or right < 0:
        raise ValidationError("left/right must be >= 0")
    if left == 0 and right == 0:
        return FeatureMatrix(fm.data.copy(), kind=fm.kind, utt_id=fm.utt_id)
    n = fm.n_frames
    padded = np.pad(fm.data, ((left, right), (0, 0)), mode="edge")
    cols = [padded[off : off + n] for off in range(left + right + 1)]
    kind = fm.kind if fm.kind.startswith("spliced-") else f"spliced-{fm.kind}"
    return FeatureMatrix(np.concatenate(cols, axis=1), kind=kind, utt_id=fm.utt_id)
