"""Model checkpoint container (magic ``NNCK1``).

Layout: 5-byte magic, u32 little-endian header length, JSON header
(network config as structured key-values), then one float32 little-endian
blob per parameter array in layer order.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from ..errors import UnsupportedFormatError
from .network import Network, network_from_config

MAGIC = b"NNCK1"


def save_checkpoint(path: str, net: Network) -> None:
    header = json.dumps(net.config(), sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        for p in net.params():
            f.write(np.ascontiguousarray(p, dtype="<f4").tobytes())


def load_checkpoint(path: str) -> Network:
    with open(path, "rb") as f:
        if f.read(5) != MAGIC:
            raise UnsupportedFormatError(f"{path}: not an NNCK1 checkpoint")
        (hlen,) = struct.unpack("<I", f.read(4))
        cfg = json.loads(f.read(hlen).decode())
        net = network_from_config(cfg)
        for p in net.params():
            raw = f.read(p.size * 4)
            if len(raw) != p.size * 4:
                raise UnsupportedFormatError(f"{path}: truncated parameter blob")
            p[...] = np.frombuffer(raw, dtype="<f4").reshape(p.shape)
        if f.read(1):
            raise UnsupportedFormatError(f"{path}: trailing bytes")
    return net
