"""Middlebury .flo flow-field I/O.

Layout: little-endian float32 magic 202021.25 (reads as "PIEH"), int32
width, int32 height, then row-major interleaved (horizontal, vertical)
float32 pairs.  Component values with magnitude >= 1e9 mark unknown
pixels.  In-memory flow fields are (M, N, 2) with channel 0 the vertical
(row) and channel 1 the horizontal (column) displacement, so the channel
order swaps on the way in and out.
"""

import struct

import numpy as np

FLO_MAGIC = 202021.25
UNKNOWN_FLOW = 1e9


class BadMagicError(ValueError):
    """The file does not start with the .flo magic number."""


class SizeMismatchError(ValueError):
    """The payload size disagrees with the header dimensions."""


def read_flo(path):
    """Read a .flo file into an (M, N, 2) float64 field."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 12:
        raise BadMagicError(f"{path}: file too short for a .flo header")
    magic, width, height = struct.unpack("<fii", data[:12])
    if magic != FLO_MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}, expected {FLO_MAGIC}")
    if width < 1 or height < 1:
        raise SizeMismatchError(f"{path}: bad dimensions {width}x{height}")
    expected = 12 + 8 * width * height
    if len(data) != expected:
        raise SizeMismatchError(f"{path}: {len(data)} bytes, expected {expected}")
    uv = np.frombuffer(data, dtype="<f4", offset=12).reshape(height, width, 2)
    field = np.empty((height, width, 2))
    field[:, :, 0] = uv[:, :, 1]
    field[:, :, 1] = uv[:, :, 0]
    return field


def write_flo(path, field):
    """Write an (M, N, 2) field (row, col channels) as a .flo file."""
    a = np.asarray(field, dtype=np.float64)
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError(f"expected an (M, N, 2) field, got shape {a.shape}")
    height, width = a.shape[:2]
    uv = np.empty((height, width, 2), dtype="<f4")
    uv[:, :, 0] = a[:, :, 1]
    uv[:, :, 1] = a[:, :, 0]
    with open(path, "wb") as f:
        f.write(struct.pack("<fii", FLO_MAGIC, width, height))
        f.write(uv.tobytes())


def known_mask(field):
    """Pixels whose flow is usable (finite and below the unknown marker)."""
    a = np.asarray(field)
    return np.all(np.isfinite(a) & (np.abs(a) < UNKNOWN_FLOW), axis=2)
