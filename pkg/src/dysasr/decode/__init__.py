from .lm import BOS, EOS, UNK, TrigramLM
from .report import COLUMNS, ResultRow, render_markdown, render_tsv, write_report
from .viterbi import (
    ADVANCE,
    SELF_LOOP,
    DecodeResult,
    estimate_priors,
    viterbi_decode,
    word_state_sequence,
)
from .wer import WerReport, wer, wer_corpus

__all__ = [
    "ADVANCE",
    "BOS",
    "COLUMNS",
    "DecodeResult",
    "EOS",
    "ResultRow",
    "SELF_LOOP",
    "TrigramLM",
    "UNK",
    "WerReport",
    "estimate_priors",
    "render_markdown",
    "render_tsv",
    "viterbi_decode",
    "wer",
    "wer_corpus",
    "word_state_sequence",
    "write_report",
]
