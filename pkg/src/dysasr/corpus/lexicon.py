"""Toy phone inventory and lexicon.

The inventory has 5 vowels and 8 consonants, each modelled with 3 HMM-style
states, giving 39 frame labels. Words are spelled phonemically: every letter
of a word is one phone, so the lexicon is closed over strings drawn from the
13 phone letters.

Each phone carries an articulatory target for the six vocal-tract variables
(LA, LP, TBCL, TBCD, TTCL, TTCD, in normalized units roughly in [-1, 1]),
an excitation class and a nominal duration in 10 ms frames.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import LexiconError

TV_NAMES = ("LA", "LP", "TBCL", "TBCD", "TTCL", "TTCD")
STATES_PER_PHONE = 3


@dataclass(frozen=True)
class Phone:
    symbol: str
    targets: tuple[float, float, float, float, float, float]
    excitation: str  # "voiced" | "noise"
    amplitude: float
    duration_frames: int


# fmt: off
PHONES: tuple[Phone, ...] = (
    # vowels: voiced, long
    Phone("a", ( 0.80, -0.30,  0.50,  0.90, -0.20, -0.40), "voiced", 0.30, 12),
    Phone("e", ( 0.50, -0.10, -0.20,  0.40,  0.30, -0.10), "voiced", 0.30, 12),
    Phone("i", ( 0.30,  0.00, -0.60, -0.20,  0.60,  0.20), "voiced", 0.30, 12),
    Phone("o", ( 0.40,  0.60,  0.60,  0.50, -0.40, -0.30), "voiced", 0.30, 12),
    Phone("u", ( 0.20,  0.80,  0.40, -0.10, -0.50,  0.00), "voiced", 0.30, 12),
    # voiced stops
    Phone("b", (-0.90,  0.20,  0.00,  0.00,  0.00,  0.00), "voiced", 0.12, 6),
    Phone("d", (-0.30,  0.00, -0.30, -0.10,  0.80,  0.70), "voiced", 0.12, 6),
    Phone("g", (-0.20, -0.10,  0.70,  0.70, -0.30, -0.20), "voiced", 0.12, 6),
    # unvoiced stops
    Phone("p", (-0.90,  0.30,  0.10,  0.10, -0.10,  0.10), "noise", 0.08, 6),
    Phone("t", (-0.30,  0.10, -0.20,  0.00,  0.90,  0.80), "noise", 0.08, 6),
    Phone("k", (-0.20,  0.00,  0.80,  0.80, -0.20, -0.10), "noise", 0.08, 6),
    # fricatives
    Phone("s", (-0.10,  0.00, -0.40, -0.30,  0.70,  0.50), "noise", 0.15, 8),
    Phone("f", (-0.60,  0.40, -0.10,  0.00,  0.20,  0.30), "noise", 0.15, 8),
)
# fmt: on

PHONE_INDEX = {p.symbol: i for i, p in enumerate(PHONES)}

#: Ordered phone-state names, e.g. "a_0", "a_1", "a_2", "e_0", ...
LABEL_INVENTORY: tuple[str, ...] = tuple(
    f"{p.symbol}_{s}" for p in PHONES for s in range(STATES_PER_PHONE)
)

NUM_LABELS = len(LABEL_INVENTORY)


def phones_for_word(word: str) -> list[Phone]:
    """Spell `word` into its phone sequence.

    Raises LexiconError if any letter is not in the phone inventory.
    """
    phones = []
    for ch in word:
        if ch not in PHONE_INDEX:
            raise LexiconError(f"word {word!r}: unknown phone {ch!r}")
        phones.append(PHONES[PHONE_INDEX[ch]])
    if not phones:
        raise LexiconError("empty word")
    return phones


def state_label(phone: Phone, state: int) -> int:
    """Frame-label index of `state` (0..2) of `phone`."""
    return PHONE_INDEX[phone.symbol] * STATES_PER_PHONE + state


def phone_state_labels(word_seq: list[str]) -> list[int]:
    """Phone-state label sequence (one entry per state, in order) for words."""
    labels = []
    for word in word_seq:
        for phone in phones_for_word(word):
            for s in range(STATES_PER_PHONE):
                labels.append(state_label(phone, s))
    return labels
