"""WAV, manifest, alignment and TV-trajectory file I/O.

Formats:
  manifest   UTF-8, one record per line:
             ``<id>\\t<wav-path>\\t<transcription>[\\t<align-path>][\\t<tv-path>]``
  alignment  one integer frame label per line
  TV file    6 tab-separated reals per line, one line per frame
  WAV        RIFF PCM, 16-bit, mono only
"""

from __future__ import annotations

import os
import wave

import numpy as np

from ..errors import DegenerateInputError, ManifestError, UnsupportedFormatError
from .lexicon import LABEL_INVENTORY
from .types import Manifest, ManifestEntry, TVTrajectory, Utterance


def read_wav(path: str) -> tuple[np.ndarray, int]:
    """Read a 16-bit PCM mono WAV; returns (samples in [-1, 1), rate)."""
    with wave.open(path, "rb") as w:
        if w.getnchannels() != 1:
            raise UnsupportedFormatError(f"{path}: only mono WAV is supported")
        if w.getsampwidth() != 2:
            raise UnsupportedFormatError(f"{path}: only 16-bit PCM is supported")
        rate = w.getframerate()
        raw = w.readframes(w.getnframes())
    if not raw:
        raise DegenerateInputError(f"{path}: empty data chunk")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return samples, rate


def write_wav(path: str, samples: np.ndarray, rate: int) -> None:
    clipped = np.clip(samples, -1.0, 32767.0 / 32768.0)
    pcm = np.round(clipped * 32768.0).astype("<i2")
    with wave.open(path, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(pcm.tobytes())


def load_manifest(path: str, label_inventory: list[str] | None = None) -> Manifest:
    """Parse a manifest file; paths are resolved relative to its directory."""
    base = os.path.dirname(os.path.abspath(path))
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if not 3 <= len(fields) <= 5:
                raise ManifestError(
                    f"{path}:{lineno}: expected 3-5 tab-separated fields, "
                    f"got {len(fields)}"
                )
            utt_id = fields[0]
            if utt_id in seen:
                raise ManifestError(f"{path}:{lineno}: duplicate id {utt_id!r}")
            seen.add(utt_id)

            def resolve(p, lineno=lineno):
                full = p if os.path.isabs(p) else os.path.join(base, p)
                if not os.path.exists(full):
                    raise ManifestError(f"{path}:{lineno}: missing file {p!r}")
                return full

            entries.append(
                ManifestEntry(
                    id=utt_id,
                    audio_path=resolve(fields[1]),
                    transcription=fields[2].split(),
                    align_path=resolve(fields[3]) if len(fields) > 3 and fields[3] else None,
                    tv_path=resolve(fields[4]) if len(fields) > 4 and fields[4] else None,
                )
            )
    inventory = list(label_inventory) if label_inventory else list(LABEL_INVENTORY)
    return Manifest(entries=entries, label_inventory=inventory)


def read_alignment(path: str) -> np.ndarray:
    labels = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError as e:
                raise ManifestError(f"{path}:{lineno}: bad label {line!r}") from e
    return np.array(labels, dtype=np.int64)


def write_alignment(path: str, labels: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for lab in labels:
            f.write(f"{int(lab)}\n")


def read_tv_file(path: str) -> TVTrajectory:
    rows = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 6:
                raise ManifestError(
                    f"{path}:{lineno}: expected 6 values, got {len(parts)}"
                )
            rows.append([float(p) for p in parts])
    return TVTrajectory(np.array(rows, dtype=np.float64))


def write_tv_file(path: str, tv: TVTrajectory) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for row in tv.values:
            f.write("\t".join(f"{v:.8f}" for v in row) + "\n")


def load_utterances(manifest: Manifest) -> list[Utterance]:
    """Materialize every manifest entry as an Utterance."""
    utts = []
    for entry in manifest.entries:
        samples, _rate = read_wav(entry.audio_path)
        labels = read_alignment(entry.align_path) if entry.align_path else None
        tv = read_tv_file(entry.tv_path) if entry.tv_path else None
        utts.append(
            Utterance(
                id=entry.id,
                samples=samples,
                transcription=entry.transcription,
                frame_labels=labels,
                tv_truth=tv,
            )
        )
    return utts
