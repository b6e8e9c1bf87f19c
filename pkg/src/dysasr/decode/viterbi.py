"""Token-passing Viterbi decoding over word HMMs.

Each word is a left-to-right chain of phone states (3 per phone, self-loop
0.6 / advance 0.4) scored with scaled likelihoods log(posterior / prior)
plus trigram LM scores applied at word entries and sentence end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..corpus.lexicon import STATES_PER_PHONE, phones_for_word, state_label
from ..errors import ValidationError
from .lm import BOS, EOS, TrigramLM

SELF_LOOP = 0.6
ADVANCE = 0.4

LOG_SELF = math.log(SELF_LOOP)
LOG_ADV = math.log(ADVANCE)


def word_state_sequence(word: str) -> list[int]:
    """Frame-label ids of the word's left-to-right HMM states."""
    return [
        state_label(p, s)
        for p in phones_for_word(word)
        for s in range(STATES_PER_PHONE)
    ]


@dataclass
class DecodeResult:
    words: list[str]
    state_path: list[int]  # one label per frame
    log_score: float


@dataclass
class _Token:
    score: float
    word: str
    pos: int
    history: tuple[str, str]
    parent: "_Token | None"
    state: int


def viterbi_decode(
    posteriors: np.ndarray,
    priors: np.ndarray,
    lexicon: list[str],
    lm: TrigramLM,
    beam: float = math.inf,
) -> DecodeResult:
    """Best word sequence for a (frames, classes) posterior matrix.

    With an infinite beam the search is exact over all word sequences whose
    state chains fit in the frame count.
    """
    if not lexicon:
        raise ValidationError("empty lexicon")
    priors = np.asarray(priors, dtype=np.float64)
    if np.any(priors <= 0):
        raise ValidationError("priors must be strictly positive")
    posteriors = np.asarray(posteriors, dtype=np.float64)
    if posteriors.ndim != 2 or posteriors.shape[1] != len(priors):
        raise ValidationError("posteriors/priors shape mismatch")
    row_sums = posteriors.sum(axis=1)
    if np.any(np.abs(row_sums - 1.0) > 1e-3):
        raise ValidationError("posterior rows must sum to 1")

    emission = np.log(np.maximum(posteriors, 1e-300)) - np.log(priors)[None, :]
    states = {w: word_state_sequence(w) for w in lexicon}
    n_frames = len(posteriors)

    # seed: first frame enters state 0 of any word
    active: dict[tuple, _Token] = {}

    def offer(key, token):
        best = active.get(key)
        if best is None or token.score > best.score:
            active[key] = token

    h0 = (BOS, BOS)
    for w in lexicon:
        s0 = states[w][0]
        tok = _Token(lm.log_prob(w, h0) + emission[0, s0], w, 0, h0, None, s0)
        offer((h0, w, 0), tok)

    for t in range(1, n_frames):
        prev = active
        active = {}
        if beam != math.inf and prev:
            cutoff = max(tok.score for tok in prev.values()) - beam
            prev = {k: v for k, v in prev.items() if v.score >= cutoff}
        for (hist, w, pos), tok in prev.items():
            chain = states[w]
            # self loop
            s = chain[pos]
            offer(
                (hist, w, pos),
                _Token(tok.score + LOG_SELF + emission[t, s], w, pos, hist,
                       tok.parent, s),
            )
            if pos + 1 < len(chain):
                s = chain[pos + 1]
                offer(
                    (hist, w, pos + 1),
                    _Token(tok.score + LOG_ADV + emission[t, s], w, pos + 1,
                           hist, tok.parent, s),
                )
            else:
                # word exit: enter state 0 of any next word
                new_hist = (hist[1], w)
                base = tok.score + LOG_ADV
                for w2 in lexicon:
                    s = states[w2][0]
                    offer(
                        (new_hist, w2, 0),
                        _Token(base + lm.log_prob(w2, new_hist) + emission[t, s],
                               w2, 0, new_hist, tok, s),
                    )

    # finish: only tokens in their word's final state are valid sentence ends
    best_tok = None
    best_score = -math.inf
    for (hist, w, pos), tok in active.items():
        if pos != len(states[w]) - 1:
            continue
        score = tok.score + lm.log_prob(EOS, (hist[1], w))
        if score > best_score:
            best_score = score
            best_tok = tok

    if best_tok is None:
        raise ValidationError(
            f"no word sequence fits in {n_frames} frames (words too long)"
        )

    # reconstruct words by walking parents
    words = []
    cur = best_tok
    while cur is not None:
        words.append(cur.word)
        cur = cur.parent
    words.reverse()

    state_path = _best_state_path(emission, [states[w] for w in words])
    return DecodeResult(words=words, state_path=state_path, log_score=best_score)


def _best_state_path(emission: np.ndarray, chains: list[list[int]]) -> list[int]:
    """Viterbi state alignment of a fixed word sequence (for the path field)."""
    seq = [s for chain in chains for s in chain]
    n_states = len(seq)
    n_frames = len(emission)
    neg = -math.inf
    score = np.full((n_frames, n_states), neg)
    back = np.zeros((n_frames, n_states), dtype=int)
    score[0, 0] = emission[0, seq[0]]
    for t in range(1, n_frames):
        for j in range(min(t + 1, n_states)):
            stay = score[t - 1, j] + LOG_SELF
            move = score[t - 1, j - 1] + LOG_ADV if j > 0 else neg
            if stay >= move:
                score[t, j] = stay + emission[t, seq[j]]
                back[t, j] = j
            else:
                score[t, j] = move + emission[t, seq[j]]
                back[t, j] = j - 1
    path = [n_states - 1]
    for t in range(n_frames - 1, 0, -1):
        path.append(back[t, path[-1]])
    path.reverse()
    return [seq[j] for j in path]


def estimate_priors(label_seqs: list[np.ndarray], n_classes: int,
                    floor: float = 1e-8) -> np.ndarray:
    """State priors from training-label frequencies (scaled-likelihood use)."""
    counts = np.zeros(n_classes)
    for labels in label_seqs:
        counts += np.bincount(np.asarray(labels), minlength=n_classes)
    total = counts.sum()
    if total == 0:
        raise ValidationError("no labels to estimate priors from")
    return np.maximum(counts / total, floor)
