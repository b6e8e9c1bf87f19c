"""Interpolated add-k trigram language model."""

from __future__ import annotations

from collections import Counter

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import NotTrainedError, ValidationError

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"


class TrigramLM(BaseEstimator):
    """Trigram LM with add-k smoothing per order, linearly interpolated.

    The prediction vocabulary is the training vocabulary plus EOS and UNK;
    unknown words in queries are mapped to UNK. Each order's distribution is
    add-k normalized over the prediction vocabulary, so the interpolated
    next-word distribution sums to one.
    """

    def __init__(self, k: float = 0.1,
                 weights: tuple[float, float, float] = (0.6, 0.3, 0.1)):
        self.k = k
        self.weights = weights  # (trigram, bigram, unigram)
        self.vocab_ = None

    def fit(self, sentences: list[list[str]]):
        if not sentences:
            raise ValidationError("cannot train an LM on an empty corpus")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValidationError("interpolation weights must sum to 1")
        uni, bi, tri = Counter(), Counter(), Counter()
        bi_hist, tri_hist = Counter(), Counter()
        n_tokens = 0
        words = set()
        for sent in sentences:
            words.update(sent)
            padded = [BOS, BOS] + list(sent) + [EOS]
            for i in range(2, len(padded)):
                w, h1, h2 = padded[i], padded[i - 1], padded[i - 2]
                uni[w] += 1
                bi[(h1, w)] += 1
                tri[(h2, h1, w)] += 1
                bi_hist[h1] += 1
                tri_hist[(h2, h1)] += 1
                n_tokens += 1
        self.vocab_ = sorted(words) + [EOS, UNK]
        self._uni, self._bi, self._tri = uni, bi, tri
        self._bi_hist, self._tri_hist = bi_hist, tri_hist
        self._n_tokens = n_tokens
        return self

    # ---- probabilities ------------------------------------------------------

    def _map(self, word: str) -> str:
        return word if word in self._known else UNK

    @property
    def _known(self) -> set:
        return set(self.vocab_) | {BOS}

    def prob(self, word: str, history: tuple[str, str]) -> float:
        """Interpolated P(word | history); history is (second-last, last)."""
        if self.vocab_ is None:
            raise NotTrainedError("TrigramLM used before fit")
        v = len(self.vocab_)
        k = self.k
        w = self._map(word)
        h2, h1 = (self._map(h) if h != BOS else BOS for h in history)
        p_uni = (self._uni[w] + k) / (self._n_tokens + k * v)
        p_bi = (self._bi[(h1, w)] + k) / (self._bi_hist[h1] + k * v)
        p_tri = (self._tri[(h2, h1, w)] + k) / (self._tri_hist[(h2, h1)] + k * v)
        wt, wb, wu = self.weights
        return wt * p_tri + wb * p_bi + wu * p_uni

    def log_prob(self, word: str, history: tuple[str, str]) -> float:
        return float(np.log(self.prob(word, history)))

    def next_word_distribution(self, history: tuple[str, str]) -> dict[str, float]:
        return {w: self.prob(w, history) for w in self.vocab_}

    def sentence_log_prob(self, sentence: list[str]) -> float:
        history = (BOS, BOS)
        total = 0.0
        for w in list(sentence) + [EOS]:
            total += self.log_prob(w, history)
            history = (history[1], self._map(w))
        return total

    def perplexity(self, sentences: list[list[str]]) -> float:
        total, n = 0.0, 0
        for sent in sentences:
            total += self.sentence_log_prob(sent)
            n += len(sent) + 1  # includes EOS
        return float(np.exp(-total / n))
