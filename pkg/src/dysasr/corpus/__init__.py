from .io import (
    load_manifest,
    load_utterances,
    read_alignment,
    read_tv_file,
    read_wav,
    write_alignment,
    write_tv_file,
    write_wav,
)
from .lexicon import (
    LABEL_INVENTORY,
    NUM_LABELS,
    PHONES,
    STATES_PER_PHONE,
    TV_NAMES,
    phone_state_labels,
    phones_for_word,
)
from .noise import NOISE_KINDS, mix_noise
from .split import DEFAULT_FRACTIONS, split_corpus
from .synth import generate_corpus, generate_utterance
from .types import DysarthriaProfile, Manifest, ManifestEntry, TVTrajectory, Utterance

__all__ = [
    "DEFAULT_FRACTIONS",
    "DysarthriaProfile",
    "LABEL_INVENTORY",
    "Manifest",
    "ManifestEntry",
    "NOISE_KINDS",
    "NUM_LABELS",
    "PHONES",
    "STATES_PER_PHONE",
    "TVTrajectory",
    "TV_NAMES",
    "Utterance",
    "generate_corpus",
    "generate_utterance",
    "load_manifest",
    "load_utterances",
    "mix_noise",
    "phone_state_labels",
    "phones_for_word",
    "read_alignment",
    "read_tv_file",
    "read_wav",
    "split_corpus",
    "write_alignment",
    "write_tv_file",
    "write_wav",
]
