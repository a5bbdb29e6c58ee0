"""Integer-displacement initializers by block matching.

For every pixel of the first image, the surrounding block (7x7 by default,
clipped at the image border) is compared against blocks of the second image
shifted by each admissible displacement; the displacement with the highest
normalized cross correlation wins.  Only displacements that keep the
shifted pixel itself inside the grid are admissible, so the returned field
is always a valid sampling displacement.  A median filter removes isolated
outliers afterwards.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .grids import check_image

NCC_EPS = 1e-12


class EmptySearchError(ValueError):
    """No admissible displacement exists for some pixel."""


@dataclass
class MatchConfig:
    """Block-matching parameters.

    search_min/search_max bound the displacement per axis: plain ints for
    disparity (column shifts), and for flow either ints (same bound on both
    axes) or (row, col) pairs.
    """

    search_min: int | tuple
    search_max: int | tuple
    block_radius: int = 3
    median_radius: int = 1

    def __post_init__(self):
        if self.block_radius < 1:
            raise ValueError("block_radius must be >= 1")
        if self.median_radius < 0:
            raise ValueError("median_radius must be >= 0")

    def axis_range(self, axis):
        lo = self.search_min[axis] if isinstance(self.search_min, tuple) else self.search_min
        hi = self.search_max[axis] if isinstance(self.search_max, tuple) else self.search_max
        if lo > hi:
            raise ValueError(f"empty search range [{lo}, {hi}] on axis {axis}")
        return int(lo), int(hi)


def ncc(block_a, block_b):
    """Normalized cross correlation of two equal-size sample sets.

    The denominator carries a small epsilon so zero-variance blocks score
    0 instead of dividing by zero.
    """
    a = np.asarray(block_a, dtype=np.float64).ravel()
    b = np.asarray(block_b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"blocks differ in size: {a.shape} vs {b.shape}")
    da = a - a.mean()
    db = b - b.mean()
    return float(np.sum(da * db) / np.sqrt(np.sum(da * da) * np.sum(db * db) + NCC_EPS))


# The matching kernels keep every window loop at the fixed range (-br..br)
# with in-bounds guards instead of precomputed data-dependent bounds: numba
# 0.66's parallel transform miscompiles the latter pattern inside prange
# (guarded by tests/test_blockmatch.py::test_match_kernels_against_python).


@njit(cache=True, parallel=True)
def _match_disparity(f1, f2, br, disps, out, valid):
    M, N = f1.shape
    for i in prange(M):
        for j in range(N):
            found = False
            best = 0.0
            best_s = 0
            for t in range(disps.shape[0]):
                s = disps[t]
                jj = j - s
                if 0 <= jj <= N - 1:
                    cnt = 0
                    sa = 0.0
                    sb = 0.0
                    for di in range(-br, br + 1):
                        ia = i + di
                        if 0 <= ia <= M - 1:
                            for dj in range(-br, br + 1):
                                ja = j + dj
                                jb = jj + dj
                                if 0 <= ja <= N - 1 and 0 <= jb <= N - 1:
                                    sa += f1[ia, ja]
                                    sb += f2[ia, jb]
                                    cnt += 1
                    ma = sa / cnt
                    mb = sb / cnt
                    cov = 0.0
                    va = 0.0
                    vb = 0.0
                    for di in range(-br, br + 1):
                        ia = i + di
                        if 0 <= ia <= M - 1:
                            for dj in range(-br, br + 1):
                                ja = j + dj
                                jb = jj + dj
                                if 0 <= ja <= N - 1 and 0 <= jb <= N - 1:
                                    da = f1[ia, ja] - ma
                                    db = f2[ia, jb] - mb
                                    cov += da * db
                                    va += da * da
                                    vb += db * db
                    score = cov / np.sqrt(va * vb + NCC_EPS)
                    if not found or score > best:
                        best = score
                        best_s = s
                        found = True
            out[i, j] = best_s
            valid[i, j] = found


@njit(cache=True, parallel=True)
def _match_flow(f1, f2, br, disps, out, valid):
    M, N = f1.shape
    for i in prange(M):
        for j in range(N):
            found = False
            best = 0.0
            best_s0 = 0
            best_s1 = 0
            for t in range(disps.shape[0]):
                s0 = disps[t, 0]
                s1 = disps[t, 1]
                ii = i - s0
                jj = j - s1
                if 0 <= ii <= M - 1 and 0 <= jj <= N - 1:
                    cnt = 0
                    sa = 0.0
                    sb = 0.0
                    for di in range(-br, br + 1):
                        ia = i + di
                        ib = ii + di
                        if 0 <= ia <= M - 1 and 0 <= ib <= M - 1:
                            for dj in range(-br, br + 1):
                                ja = j + dj
                                jb = jj + dj
                                if 0 <= ja <= N - 1 and 0 <= jb <= N - 1:
                                    sa += f1[ia, ja]
                                    sb += f2[ib, jb]
                                    cnt += 1
                    ma = sa / cnt
                    mb = sb / cnt
                    cov = 0.0
                    va = 0.0
                    vb = 0.0
                    for di in range(-br, br + 1):
                        ia = i + di
                        ib = ii + di
                        if 0 <= ia <= M - 1 and 0 <= ib <= M - 1:
                            for dj in range(-br, br + 1):
                                ja = j + dj
                                jb = jj + dj
                                if 0 <= ja <= N - 1 and 0 <= jb <= N - 1:
                                    da = f1[ia, ja] - ma
                                    db = f2[ib, jb] - mb
                                    cov += da * db
                                    va += da * da
                                    vb += db * db
                    score = cov / np.sqrt(va * vb + NCC_EPS)
                    if not found or score > best:
                        best = score
                        best_s0 = s0
                        best_s1 = s1
                        found = True
            out[i, j, 0] = best_s0
            out[i, j, 1] = best_s1
            valid[i, j] = found


@njit(cache=True, parallel=True)
def _median_2d(a, radius, out):
    M, N = a.shape
    for i in prange(M):
        buf = np.empty((2 * radius + 1) * (2 * radius + 1))
        for j in range(N):
            i0 = max(i - radius, 0)
            i1 = min(i + radius, M - 1)
            j0 = max(j - radius, 0)
            j1 = min(j + radius, N - 1)
            cnt = 0
            for ii in range(i0, i1 + 1):
                for jj in range(j0, j1 + 1):
                    buf[cnt] = a[ii, jj]
                    cnt += 1
            win = np.sort(buf[:cnt])
            out[i, j] = win[(cnt - 1) // 2]


def median_filter(field, radius):
    """Per-channel median over (2*radius+1)^2 windows, clipped at borders.

    The lower median is taken for even window sizes (corners), so every
    output value is one of the input values.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    a = np.asarray(field, dtype=np.float64)
    if radius == 0:
        return a.copy()
    out = np.empty_like(a)
    if a.ndim == 2:
        _median_2d(a, int(radius), out)
    else:
        for c in range(a.shape[2]):
            chan = np.ascontiguousarray(a[:, :, c])
            res = np.empty_like(chan)
            _median_2d(chan, int(radius), res)
            out[:, :, c] = res
    return out


def _disparity_order(lo, hi):
    # smallest |s| first, then smallest s
    return np.array(sorted(range(lo, hi + 1), key=lambda s: (abs(s), s)), dtype=np.int64)


def _flow_order(lo0, hi0, lo1, hi1):
    # smallest squared norm first, then lexicographic (row, col)
    disps = [(s0, s1) for s0 in range(lo0, hi0 + 1) for s1 in range(lo1, hi1 + 1)]
    disps.sort(key=lambda s: (s[0] * s[0] + s[1] * s[1], s[0], s[1]))
    return np.array(disps, dtype=np.int64)


def _clamp_admissible_1d(field, n_cols, lo, hi):
    js = np.arange(n_cols)[None, :]
    return np.clip(field, np.maximum(lo, js - (n_cols - 1)), np.minimum(hi, js))


def init_disparity(f1, f2, cfg):
    """Integer column-displacement initializer for a stereo pair.

    Returns an (M, N) field of exact integers d with f2 sampled at
    (i, j - d) matching f1 around (i, j) best in NCC, median filtered and
    clamped back into the admissible range.
    """
    a = check_image(f1, "f1")
    b = check_image(f2, "f2")
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    lo, hi = cfg.axis_range(1)
    M, N = a.shape
    out = np.empty((M, N))
    valid = np.empty((M, N), dtype=np.bool_)
    _match_disparity(a, b, int(cfg.block_radius), _disparity_order(lo, hi), out, valid)
    if not valid.all():
        i, j = np.argwhere(~valid)[0]
        raise EmptySearchError(
            f"no admissible displacement in [{lo}, {hi}] for pixel ({i}, {j})"
        )
    out = median_filter(out, cfg.median_radius)
    return _clamp_admissible_1d(out, N, lo, hi)


def init_flow(f1, f2, cfg):
    """Integer (row, col) displacement initializer for a frame pair.

    2-D analogue of init_disparity: exhaustive NCC search over the
    rectangular displacement range, ties toward the smallest squared norm.
    Returns an (M, N, 2) field of exact integers.
    """
    a = check_image(f1, "f1")
    b = check_image(f2, "f2")
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    lo0, hi0 = cfg.axis_range(0)
    lo1, hi1 = cfg.axis_range(1)
    M, N = a.shape
    out = np.empty((M, N, 2))
    valid = np.empty((M, N), dtype=np.bool_)
    _match_flow(a, b, int(cfg.block_radius), _flow_order(lo0, hi0, lo1, hi1), out, valid)
    if not valid.all():
        i, j = np.argwhere(~valid)[0]
        raise EmptySearchError(f"no admissible displacement for pixel ({i}, {j})")
    out = median_filter(out, cfg.median_radius)
    is_ = np.arange(M)[:, None]
    js = np.arange(N)[None, :]
    out[:, :, 0] = np.clip(out[:, :, 0], np.maximum(lo0, is_ - (M - 1)), np.minimum(hi0, is_))
    out[:, :, 1] = np.clip(out[:, :, 1], np.maximum(lo1, js - (N - 1)), np.minimum(hi1, js))
    return out
