"""Evaluation against ground truth: bad-pixel rate and mean absolute error
for disparity, endpoint and angular error for flow.  Unknown ground-truth
pixels (NaN, or flow components at or above the .flo unknown marker) are
excluded."""

import numpy as np

from .flowio import known_mask


def disparity_metrics(u, gt, tau=1.0):
    """(bad_pixel_rate, mean_abs_error) over pixels with known gt.

    A pixel is bad when |u - gt| > tau.
    """
    uu = np.asarray(u, dtype=np.float64)
    gg = np.asarray(gt, dtype=np.float64)
    if uu.shape != gg.shape:
        raise ValueError(f"shape mismatch: {uu.shape} vs {gg.shape}")
    valid = np.isfinite(gg)
    if not valid.any():
        raise ValueError("no known ground-truth pixels")
    err = np.abs(uu[valid] - gg[valid])
    return float(np.mean(err > tau)), float(np.mean(err))


def flow_metrics(u, gt):
    """(average_endpoint_error, average_angular_error_degrees).

    The angular error is measured between the time-augmented vectors
    (u, 1) and (gt, 1).
    """
    uu = np.asarray(u, dtype=np.float64)
    gg = np.asarray(gt, dtype=np.float64)
    if uu.shape != gg.shape:
        raise ValueError(f"shape mismatch: {uu.shape} vs {gg.shape}")
    if uu.ndim != 3 or uu.shape[2] != 2:
        raise ValueError(f"expected (M, N, 2) fields, got {uu.shape}")
    valid = known_mask(gg)
    if not valid.any():
        raise ValueError("no known ground-truth pixels")
    du = uu[valid]
    dg = gg[valid]
    aee = float(np.mean(np.linalg.norm(du - dg, axis=1)))
    dot = np.sum(du * dg, axis=1) + 1.0
    norms = np.sqrt(np.sum(du * du, axis=1) + 1.0) * np.sqrt(np.sum(dg * dg, axis=1) + 1.0)
    ang = np.degrees(np.arccos(np.clip(dot / norms, -1.0, 1.0)))
    ang[np.all(du == dg, axis=1)] = 0.0  # sqrt roundoff otherwise
    return aee, float(np.mean(ang))
