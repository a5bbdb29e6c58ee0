"""Flow visualization: direction as hue, magnitude as brightness."""

import numpy as np


def hsv_to_rgb(h, s, v):
    """Vectorized HSV -> RGB; h in degrees [0, 360), s and v in [0, 1].
    Returns float arrays in [0, 1] stacked on the last axis."""
    h = np.asarray(h, dtype=np.float64) / 60.0
    s = np.asarray(s, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    i = np.floor(h).astype(int) % 6
    f = h - np.floor(h)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def colorize_flow(field, max_magnitude=None):
    """8-bit RGB rendering of an (M, N, 2) flow field.

    Hue encodes atan2(vertical, horizontal), brightness the magnitude
    relative to max_magnitude (the field's own maximum norm when None,
    which leaves a zero field black).
    """
    a = np.asarray(field, dtype=np.float64)
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError(f"expected an (M, N, 2) field, got shape {a.shape}")
    horiz = a[:, :, 1]
    vert = a[:, :, 0]
    mag = np.hypot(horiz, vert)
    m = float(np.max(mag)) if max_magnitude is None else float(max_magnitude)
    hue = np.degrees(np.arctan2(vert, horiz)) % 360.0
    value = np.clip(mag / m, 0.0, 1.0) if m > 0 else np.zeros_like(mag)
    rgb = hsv_to_rgb(hue, np.ones_like(hue), value)
    return np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)
