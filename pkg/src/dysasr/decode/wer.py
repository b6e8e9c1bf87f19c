"""Word error rate via Levenshtein alignment with unit costs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass
class WerReport:
    substitutions: int
    deletions: int
    insertions: int
    n_ref: int

    @property
    def n_errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        """Error rate in percent: 100 * (S + D + I) / N."""
        return 100.0 * self.n_errors / self.n_ref

    def __add__(self, other: "WerReport") -> "WerReport":
        return WerReport(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.n_ref + other.n_ref,
        )


def wer(ref: list[str], hyp: list[str]) -> WerReport:
    """Align hypothesis to reference and count S/D/I at minimum edit distance."""
    if not ref:
        raise ValidationError("reference must be non-empty")
    n, m = len(ref), len(hyp)
    cost = np.zeros((n + 1, m + 1), dtype=np.int64)
    cost[:, 0] = np.arange(n + 1)  # deletions
    cost[0, :] = np.arange(m + 1)  # insertions
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            sub = cost[i - 1, j - 1] + (ref[i - 1] != hyp[j - 1])
            cost[i, j] = min(sub, cost[i - 1, j] + 1, cost[i, j - 1] + 1)

    # backtrace, preferring matches/substitutions on ties
    s = d = ins = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and cost[i, j] == cost[i - 1, j - 1] + (ref[i - 1] != hyp[j - 1]):
            s += ref[i - 1] != hyp[j - 1]
            i, j = i - 1, j - 1
        elif i > 0 and cost[i, j] == cost[i - 1, j] + 1:
            d += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return WerReport(substitutions=s, deletions=d, insertions=ins, n_ref=n)


def wer_corpus(pairs: list[tuple[list[str], list[str]]]) -> WerReport:
    """Aggregate WER over (reference, hypothesis) pairs."""
    total = WerReport(0, 0, 0, 0)
    for ref, hyp in pairs:
        total = total + wer(ref, hyp)
    return total
