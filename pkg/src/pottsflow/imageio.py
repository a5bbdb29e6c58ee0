"""Minimal image I/O: PGM/PPM (P2, P3, P5, P6) plus PNG via Pillow.

read_image returns a float64 grayscale image with values in [0, 255]
regardless of bit depth (16-bit samples are scaled by 255/maxval); color
inputs are converted by the usual luminance weights.  read_gray_raw keeps
the stored sample values untouched, which is what ground-truth disparity
maps encoded as value = disparity * scale need.
"""

import numpy as np


class UnsupportedFormatError(ValueError):
    """The file is not a format this reader understands."""


class CorruptHeaderError(ValueError):
    """The file header or payload is truncated or malformed."""


LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def _tokenize_pnm_header(data, count):
    """First `count` whitespace-separated header tokens (comments stripped)
    and the offset just past the single whitespace after the last one."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise CorruptHeaderError("truncated header")
        c = data[pos:pos + 1]
        if c == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise CorruptHeaderError("unterminated comment")
            pos = nl + 1
        elif c.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end:end + 1].isspace() and data[end:end + 1] != b"#":
                end += 1
            tokens.append(data[pos:end])
            pos = end
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise CorruptHeaderError("missing whitespace after header")
    return tokens, pos + 1


def read_pnm(path):
    """Read a PGM/PPM file; returns (samples, maxval) with samples float64
    of shape (M, N) or (M, N, 3), raw stored values."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 2:
        raise CorruptHeaderError(f"{path}: file too short")
    magic = data[:2]
    if magic not in (b"P2", b"P3", b"P5", b"P6"):
        raise UnsupportedFormatError(f"{path}: unknown magic {magic!r}")
    channels = 3 if magic in (b"P3", b"P6") else 1
    try:
        tokens, offset = _tokenize_pnm_header(data, 4)
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except (CorruptHeaderError, ValueError) as exc:
        raise CorruptHeaderError(f"{path}: {exc}") from exc
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise CorruptHeaderError(f"{path}: bad dimensions {width}x{height}, maxval {maxval}")
    n = width * height * channels
    if magic in (b"P2", b"P3"):
        try:
            values = np.array(data[offset:].split()[:n], dtype=np.float64)
        except ValueError as exc:
            raise CorruptHeaderError(f"{path}: non-numeric sample") from exc
        if values.size < n:
            raise CorruptHeaderError(f"{path}: expected {n} samples, found {values.size}")
    else:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[offset:offset + n * dtype.itemsize]
        if len(raw) < n * dtype.itemsize:
            raise CorruptHeaderError(f"{path}: truncated pixel data")
        values = np.frombuffer(raw, dtype=dtype).astype(np.float64)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return values.reshape(shape), maxval


def write_pgm(path, image, maxval=65535):
    """Write a P5 PGM (8- or 16-bit per maxval); values are clipped and
    rounded to [0, maxval]."""
    a = np.asarray(image, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {a.shape}")
    q = np.clip(np.rint(a), 0, maxval)
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    with open(path, "wb") as f:
        f.write(f"P5\n{a.shape[1]} {a.shape[0]}\n{maxval}\n".encode())
        f.write(q.astype(dtype).tobytes())


def _read_png_raw(path):
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("L", "I", "I;16", "I;16B", "F"):
                arr = np.asarray(im, dtype=np.float64)
                maxval = 65535 if im.mode.startswith("I") else 255
                return arr, maxval
            arr = np.asarray(im.convert("RGB"), dtype=np.float64)
            return arr, 255
    except UnidentifiedImageError as exc:
        raise UnsupportedFormatError(f"{path}: not a readable image") from exc
    except (OSError, SyntaxError) as exc:
        raise CorruptHeaderError(f"{path}: {exc}") from exc


def _to_gray(samples):
    if samples.ndim == 2:
        return samples
    r, g, b = LUMA_WEIGHTS
    return r * samples[:, :, 0] + g * samples[:, :, 1] + b * samples[:, :, 2]


def _load_raw(path):
    with open(path, "rb") as f:
        head = f.read(2)
    if head in (b"P2", b"P3", b"P5", b"P6"):
        return read_pnm(path)
    if head == b"\x89P":
        return _read_png_raw(path)
    raise UnsupportedFormatError(f"{path}: unknown format (magic {head!r})")


def read_image(path):
    """Grayscale float64 image in [0, 255] from PGM/PPM/PNG."""
    samples, maxval = _load_raw(path)
    gray = _to_gray(samples)
    if maxval != 255:
        gray = gray * (255.0 / maxval)
    return gray


def read_gray_raw(path):
    """Grayscale image keeping stored sample values (no [0, 255] mapping)."""
    samples, _ = _load_raw(path)
    return _to_gray(samples)


def write_png(path, rgb):
    """Write an 8-bit image; rgb is (M, N) grayscale or (M, N, 3) color."""
    from PIL import Image

    a = np.asarray(rgb)
    if a.dtype != np.uint8:
        a = np.clip(np.rint(a), 0, 255).astype(np.uint8)
    Image.fromarray(a).save(path)
