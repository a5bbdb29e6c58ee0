"""Grid containers and discrete operators.

Images are float64 arrays of shape (M, N); vector fields are (M, N) for
single-channel data (disparity) or (M, N, 2) for two-channel data (flow,
channel 0 = row/vertical component, channel 1 = column/horizontal
component).  Difference operators use forward differences with mirror
boundary conditions, i.e. the last difference along the axis is zero.
"""

import numpy as np


class OutOfGridError(ValueError):
    """A shifted coordinate leaves the image grid."""


def check_image(img, name="image"):
    """Validate an (M, N) grid of finite values, M, N >= 2. Returns float64."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name}: expected 2-D array, got shape {a.shape}")
    if a.shape[0] < 2 or a.shape[1] < 2:
        raise ValueError(f"{name}: grid must be at least 2x2, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name}: contains non-finite values")
    return a


def check_field(field, name="field"):
    """Validate a vector field, (M, N) or (M, N, d) with d in {1, 2}."""
    a = np.asarray(field, dtype=np.float64)
    if a.ndim == 3 and a.shape[2] == 1:
        a = a[:, :, 0]
    if a.ndim not in (2, 3):
        raise ValueError(f"{name}: expected 2-D or 3-D array, got shape {a.shape}")
    if a.ndim == 3 and a.shape[2] != 2:
        raise ValueError(f"{name}: expected 1 or 2 channels, got {a.shape[2]}")
    if a.shape[0] < 2 or a.shape[1] < 2:
        raise ValueError(f"{name}: grid must be at least 2x2, got {a.shape[:2]}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name}: contains non-finite values")
    return a


def num_channels(field):
    return 1 if field.ndim == 2 else field.shape[2]


def forward_diff_v(field):
    """Vertical forward difference: out[i,j] = field[i+1,j] - field[i,j].

    Mirror boundary: the last row of the output is zero.
    """
    out = np.zeros_like(np.asarray(field, dtype=np.float64))
    out[:-1] = field[1:] - field[:-1]
    return out


def forward_diff_h(field):
    """Horizontal forward difference: out[i,j] = field[i,j+1] - field[i,j].

    Mirror boundary: the last column of the output is zero.
    """
    out = np.zeros_like(np.asarray(field, dtype=np.float64))
    out[:, :-1] = field[:, 1:] - field[:, :-1]
    return out


def grouped_l0(field):
    """Number of pixels whose channel vector is not the zero vector."""
    a = np.asarray(field)
    if a.ndim == 2:
        return int(np.count_nonzero(a))
    return int(np.count_nonzero(np.any(a != 0, axis=2)))


def _integer_displacement(displacement):
    d = np.asarray(displacement)
    if not np.issubdtype(d.dtype, np.integer):
        r = np.rint(d)
        if not np.array_equal(r, d):
            raise ValueError("displacement field must be integer-valued")
        d = r.astype(np.int64)
    return d.astype(np.int64)


def shifted_coords(shape, displacement):
    """Row/column index grids of (i,j) - displacement.

    A single-channel displacement shifts along columns (the horizontal
    disparity axis); a two-channel displacement shifts (row, column).
    Raises OutOfGridError if any shifted coordinate leaves the grid.
    """
    M, N = shape
    disp = _integer_displacement(displacement)
    ii, jj = np.meshgrid(np.arange(M), np.arange(N), indexing="ij")
    if disp.ndim == 2:
        rows, cols = ii, jj - disp
    else:
        rows, cols = ii - disp[:, :, 0], jj - disp[:, :, 1]
    if rows.min() < 0 or rows.max() >= M or cols.min() < 0 or cols.max() >= N:
        bad = np.argwhere((rows < 0) | (rows >= M) | (cols < 0) | (cols >= N))
        i, j = bad[0]
        raise OutOfGridError(
            f"displacement at pixel ({i}, {j}) shifts to ({rows[i, j]}, {cols[i, j]}), "
            f"outside the {M}x{N} grid"
        )
    return rows, cols


def sample_shifted(image, displacement):
    """Sample image at (i,j) - displacement(i,j) for every pixel.

    The displacement must keep every shifted coordinate inside the grid
    (OutOfGridError otherwise, signalling an invalid initializer).
    """
    img = np.asarray(image, dtype=np.float64)
    rows, cols = shifted_coords(img.shape, displacement)
    return img[rows, cols]
