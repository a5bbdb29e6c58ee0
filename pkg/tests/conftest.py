import os

# Raise numba's launch-time thread cap before anything imports it, so the
# parallel-consistency tests can request more workers than this machine has
# cores.  Must happen before the first `import numba`.
os.environ.setdefault("NUMBA_NUM_THREADS", "8")

import numpy as np
import pytest


def smooth_texture(shape, rng, passes=3, k=7):
    """Low-pass filtered uniform noise, stretched to the full [0, 255] range
    (so the contrast requirement of the synthetic experiments holds)."""
    img = rng.uniform(0.0, 255.0, size=shape)
    for _ in range(passes):
        c = np.cumsum(np.pad(img, ((k // 2 + 1, k // 2), (0, 0)), mode="edge"), axis=0)
        img = (c[k:] - c[:-k]) / k
        c = np.cumsum(np.pad(img, ((0, 0), (k // 2 + 1, k // 2)), mode="edge"), axis=1)
        img = (c[:, k:] - c[:, :-k]) / k
    lo, hi = img.min(), img.max()
    return (img - lo) * (255.0 / (hi - lo))


def shifted_disparity_pair(rng, shape=(128, 128), regions=((2, (10, 60, 15, 70)),
                                                           (5, (70, 110, 20, 60)),
                                                           (8, (30, 90, 80, 120)))):
    """Textured f2 plus f1 sampled as f1(i,j) = f2(i, j - d(i,j)) for a
    piecewise-constant integer disparity d (zero background, rectangular
    regions).  Returns (f1, f2, d_true)."""
    M, N = shape
    f2 = smooth_texture(shape, rng)
    d_true = np.zeros(shape)
    for value, (i0, i1, j0, j1) in regions:
        d_true[i0:i1, j0:j1] = value
    ii, jj = np.meshgrid(np.arange(M), np.arange(N), indexing="ij")
    f1 = f2[ii, np.clip(jj - d_true.astype(int), 0, N - 1)]
    return f1, f2, d_true


def shifted_flow_pair(rng, shape=(128, 128)):
    """Two-region translation field: (2, 1) everywhere except a lower-right
    block moving by (-1, 3).  Returns (f1, f2, u_true)."""
    M, N = shape
    f2 = smooth_texture(shape, rng)
    u_true = np.zeros((M, N, 2))
    u_true[:, :, 0] = 2.0
    u_true[:, :, 1] = 1.0
    u_true[M // 2:, 5 * N // 16:] = (-1.0, 3.0)
    ii, jj = np.meshgrid(np.arange(M), np.arange(N), indexing="ij")
    r = np.clip(ii - u_true[:, :, 0].astype(int), 0, M - 1)
    c = np.clip(jj - u_true[:, :, 1].astype(int), 0, N - 1)
    f1 = f2[r, c]
    return f1, f2, u_true


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    """Compile the numba kernels once up front so timed tests stay honest."""
    import pottsflow as pf

    rng = np.random.default_rng(0)
    img = smooth_texture((16, 16), rng)
    pf.solve_potts_1d(rng.normal(size=(5, 2)), 0.5)
    pf.fit_potts_lines(rng.normal(size=(6, 5)), 0.5, axis=0)
    pf.fit_potts_lines(rng.normal(size=(6, 5, 2)), 0.5, axis=1)
    pf.init_disparity(img, img, pf.MatchConfig(search_min=0, search_max=1))
    pf.init_flow(img, img, pf.MatchConfig(search_min=-1, search_max=1))
    pf.median_filter(img, 1)
