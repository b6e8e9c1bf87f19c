"""Deterministic corpus partitioning."""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from .types import Utterance

DEFAULT_FRACTIONS = (0.88, 0.02, 0.10)


def split_corpus(
    utts: list[Utterance],
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS,
    seed: int = 0,
) -> tuple[list[Utterance], list[Utterance], list[Utterance]]:
    """Shuffle and partition into (train, cv, test) lists.

    Fractions must be non-negative and sum to 1; boundary indices are
    cumulative-rounded so the partition is exhaustive.
    """
    if any(f < 0 for f in fractions):
        raise ValidationError("fractions must be non-negative")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValidationError(f"fractions sum to {sum(fractions)}, expected 1")

    n = len(utts)
    perm = np.random.default_rng(seed).permutation(n)
    b1 = round(fractions[0] * n)
    b2 = round((fractions[0] + fractions[1]) * n)
    train = [utts[i] for i in perm[:b1]]
    cv = [utts[i] for i in perm[b1:b2]]
    test = [utts[i] for i in perm[b2:]]
    return train, cv, test
