from .archive import read_archive, write_archive
from .context import add_deltas, splice
from .framing import frame_signal
from .gammatone import (
    erb_bandwidth,
    erb_center_freqs,
    gammatone_fbank,
    gammatone_subbands,
)
from .mel import mel_center_freqs, mel_fbank, mel_filter_table, mfb_features
from .nmc import am_envelopes, nmc_features
from .normalize import FeatureNormalizer
from .types import BASE_KINDS, FeatureMatrix, FrontendConfig, base_kind

__all__ = [
    "BASE_KINDS",
    "FeatureMatrix",
    "FeatureNormalizer",
    "FrontendConfig",
    "add_deltas",
    "am_envelopes",
    "base_kind",
    "erb_bandwidth",
    "erb_center_freqs",
    "frame_signal",
    "gammatone_fbank",
    "gammatone_subbands",
    "mel_center_freqs",
    "mel_fbank",
    "mel_filter_table",
    "mfb_features",
    "nmc_features",
    "read_archive",
    "splice",
    "write_archive",
]
