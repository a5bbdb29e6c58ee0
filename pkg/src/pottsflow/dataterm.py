"""Linearized brightness-invariance data terms.

Around an integer initial displacement, the brightness invariance
f1(x) = f2(x - u(x)) is linearized to a per-pixel affine residual

    sum_c g_c(i,j) * u_c(i,j) - rhs(i,j)

where g holds the forward-difference gradient of f2 sampled at the shifted
coordinates and rhs folds the initializer and the image difference.  The
data energy is half the squared norm of the residual.  Both the gradient
coefficients and the right-hand side are stored per pixel; no matrices are
ever materialized.
"""

from dataclasses import dataclass

import numpy as np

from .grids import check_image, forward_diff_h, forward_diff_v, sample_shifted


@dataclass
class LinearizedData:
    """Per-pixel data-term coefficients and right-hand side.

    coeffs is (M, N) for disparity (one gradient channel) and (M, N, 2)
    for flow; rhs is (M, N); mode is "disparity" or "flow".
    """

    coeffs: np.ndarray
    rhs: np.ndarray
    mode: str

    @property
    def shape(self):
        return self.rhs.shape

    @property
    def num_pixels(self):
        return self.rhs.size


def build_disparity_data(f1, f2, ubar):
    """Disparity (column shift) linearization around integer ubar (M, N)."""
    a = check_image(f1, "f1")
    b = check_image(f2, "f2")
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    ub = np.asarray(ubar, dtype=np.float64)
    if ub.shape != a.shape:
        raise ValueError(f"ubar shape {ub.shape} does not match images {a.shape}")
    g = sample_shifted(forward_diff_h(b), ub)
    rhs = g * ub + sample_shifted(b, ub) - a
    return LinearizedData(coeffs=g, rhs=rhs, mode="disparity")


def build_flow_data(f1, f2, ubar):
    """Flow linearization around integer ubar (M, N, 2), channel 0 = row
    displacement, channel 1 = column displacement."""
    a = check_image(f1, "f1")
    b = check_image(f2, "f2")
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    ub = np.asarray(ubar, dtype=np.float64)
    if ub.shape != a.shape + (2,):
        raise ValueError(f"ubar shape {ub.shape} does not match images {a.shape}")
    g = np.empty(a.shape + (2,))
    g[:, :, 0] = sample_shifted(forward_diff_v(b), ub)
    g[:, :, 1] = sample_shifted(forward_diff_h(b), ub)
    rhs = g[:, :, 0] * ub[:, :, 0] + g[:, :, 1] * ub[:, :, 1] + sample_shifted(b, ub) - a
    return LinearizedData(coeffs=g, rhs=rhs, mode="flow")


def residual(data, u):
    """Per-pixel residual sum_c g_c * u_c - rhs."""
    uu = np.asarray(u, dtype=np.float64)
    if data.mode == "disparity":
        if uu.shape != data.rhs.shape:
            raise ValueError(f"u shape {uu.shape} does not match data {data.rhs.shape}")
        return data.coeffs * uu - data.rhs
    if uu.shape != data.rhs.shape + (2,):
        raise ValueError(f"u shape {uu.shape} does not match data {data.rhs.shape}")
    return data.coeffs[:, :, 0] * uu[:, :, 0] + data.coeffs[:, :, 1] * uu[:, :, 1] - data.rhs


def data_energy(data, u):
    """Half the squared residual norm, 0.5 * sum (g . u - rhs)^2."""
    r = residual(data, u)
    return 0.5 * float(np.sum(r * r))
