"""Binary feature archive (magic ``FARC1``).

Layout, all little-endian, after the 5-byte magic:
  per record: u32 id length, id bytes (UTF-8), u32 rows, u32 cols,
  u8 kind tag, rows*cols float32 values (row-major).

The kind tag packs the feature kind: bits 0-2 base kind index
(mfb, gfb, nmc, tv, bn), bit 3 deltas, bit 4 spliced.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import UnsupportedFormatError
from .types import BASE_KINDS, FeatureMatrix

MAGIC = b"FARC1"


def kind_to_tag(kind: str) -> int:
    spliced = kind.startswith("spliced-")
    k = kind.removeprefix("spliced-")
    deltas = k.endswith("+d")
    k = k.removesuffix("+d")
    try:
        tag = BASE_KINDS.index(k)
    except ValueError:
        raise UnsupportedFormatError(f"cannot encode feature kind {kind!r}") from None
    if deltas:
        tag |= 0x08
    if spliced:
        tag |= 0x10
    return tag


def tag_to_kind(tag: int) -> str:
    base = tag & 0x07
    if base >= len(BASE_KINDS):
        raise UnsupportedFormatError(f"bad kind tag {tag:#x}")
    kind = BASE_KINDS[base]
    if tag & 0x08:
        kind += "+d"
    if tag & 0x10:
        kind = "spliced-" + kind
    return kind


def write_archive(path: str, features: list[FeatureMatrix]) -> None:
    with open(path, "wb") as f:
        f.write(MAGIC)
        for fm in features:
            ident = fm.utt_id.encode("utf-8")
            rows, cols = fm.data.shape
            f.write(struct.pack("<I", len(ident)))
            f.write(ident)
            f.write(struct.pack("<IIB", rows, cols, kind_to_tag(fm.kind)))
            f.write(fm.data.astype("<f4").tobytes())


def read_archive(path: str) -> list[FeatureMatrix]:
    out = []
    with open(path, "rb") as f:
        if f.read(5) != MAGIC:
            raise UnsupportedFormatError(f"{path}: not a FARC1 archive")
        while True:
            head = f.read(4)
            if not head:
                break
            (id_len,) = struct.unpack("<I", head)
            ident = f.read(id_len).decode("utf-8")
            rows, cols, tag = struct.unpack("<IIB", f.read(9))
            buf = f.read(rows * cols * 4)
            if len(buf) != rows * cols * 4:
                raise UnsupportedFormatError(f"{path}: truncated record {ident!r}")
            data = np.frombuffer(buf, dtype="<f4")
            out.append(
                FeatureMatrix(
                    data.reshape(rows, cols).astype(np.float64),
                    kind=tag_to_kind(tag),
                    utt_id=ident,
                )
            )
    return out
