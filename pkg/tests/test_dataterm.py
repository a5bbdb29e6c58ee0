import numpy as np
import pytest

from conftest import smooth_texture
from pottsflow import (
    LinearizedData,
    OutOfGridError,
    build_disparity_data,
    build_flow_data,
    data_energy,
    forward_diff_h,
)


def test_disparity_zero_residual_at_identity():
    rng = np.random.default_rng(0)
    f = smooth_texture((10, 12), rng)
    data = build_disparity_data(f, f, np.zeros((10, 12)))
    assert np.array_equal(data.rhs, np.zeros((10, 12)))
    assert np.array_equal(data.coeffs, forward_diff_h(f))


def test_disparity_constant_second_image_has_zero_coeffs():
    rng = np.random.default_rng(1)
    f1 = smooth_texture((8, 9), rng)
    f2 = np.full((8, 9), 40.0)
    data = build_disparity_data(f1, f2, np.zeros((8, 9)))
    assert np.array_equal(data.coeffs, np.zeros((8, 9)))
    assert np.array_equal(data.rhs, f2 - f1)


def test_disparity_ramp_linearization_is_exact():
    # column ramp: the pixelwise minimizer of the linearized term recovers
    # the true integer shift on interior pixels
    M, N, s = 6, 10, 2
    f2 = np.tile(np.arange(N, dtype=float), (M, 1))
    ii, jj = np.meshgrid(np.arange(M), np.arange(N), indexing="ij")
    f1 = f2[ii, np.clip(jj - s, 0, N - 1)]
    data = build_disparity_data(f1, f2, np.zeros((M, N)))
    interior = data.coeffs != 0
    u_star = np.zeros((M, N))
    u_star[interior] = data.rhs[interior] / data.coeffs[interior]
    assert np.allclose(u_star[:, s:N - 1], s)


def test_flow_zero_residual_at_identity():
    rng = np.random.default_rng(2)
    f = smooth_texture((9, 9), rng)
    data = build_flow_data(f, f, np.zeros((9, 9, 2)))
    assert np.array_equal(data.rhs, np.zeros((9, 9)))


def test_flow_planar_ramp_aperture():
    # f2 = i + 2j, f1 the (1,1) translate: each interior pixel constrains
    # u1 + 2*u2 = 3 and nothing more
    M = N = 8
    ii, jj = np.meshgrid(np.arange(M, dtype=float), np.arange(N, dtype=float), indexing="ij")
    f2 = ii + 2 * jj
    f1 = np.clip(ii - 1, 0, None) + 2 * np.clip(jj - 1, 0, None)
    data = build_flow_data(f1, f2, np.zeros((M, N, 2)))
    core = (slice(1, M - 1), slice(1, N - 1))
    assert np.allclose(data.coeffs[core + (0,)], 1.0)
    assert np.allclose(data.coeffs[core + (1,)], 2.0)
    assert np.allclose(data.rhs[core], 3.0)


def test_flow_constant_second_image_full_kernel():
    rng = np.random.default_rng(3)
    f1 = smooth_texture((7, 7), rng)
    data = build_flow_data(f1, np.full((7, 7), 9.0), np.zeros((7, 7, 2)))
    assert np.array_equal(data.coeffs, np.zeros((7, 7, 2)))


def test_data_energy_exact_fit_and_zero_guess():
    rng = np.random.default_rng(4)
    f2 = smooth_texture((8, 8), rng)
    ubar = np.ones((8, 8))
    ubar[:, 0] = 0
    ii, jj = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
    f1 = f2[ii, jj - ubar.astype(int)]
    data = build_disparity_data(f1, f2, ubar)
    u = np.where(data.coeffs != 0, data.rhs / np.where(data.coeffs != 0, data.coeffs, 1.0), 0.0)
    assert data_energy(data, u) < 1e-18
    assert data_energy(data, np.zeros((8, 8))) == pytest.approx(0.5 * np.sum(data.rhs ** 2))


def test_data_energy_single_pixel_flow():
    coeffs = np.zeros((2, 2, 2))
    rhs = np.zeros((2, 2))
    coeffs[0, 0] = (1.0, 2.0)
    rhs[0, 0] = 3.0
    data = LinearizedData(coeffs=coeffs, rhs=rhs, mode="flow")
    u = np.zeros((2, 2, 2))
    u[0, 0] = (1.0, 1.0)
    assert data_energy(data, u) == 0.0
    assert data_energy(data, np.zeros((2, 2, 2))) == pytest.approx(4.5)


def test_affine_image_linearization_exact():
    rng = np.random.default_rng(5)
    M = N = 10
    ii, jj = np.meshgrid(np.arange(M, dtype=float), np.arange(N, dtype=float), indexing="ij")
    f2 = 3.0 * ii - 2.0 * jj + 5.0
    shift = (1, 2)
    f1 = 3.0 * np.clip(ii - shift[0], 0, None) - 2.0 * np.clip(jj - shift[1], 0, None) + 5.0
    data = build_flow_data(f1, f2, np.zeros((M, N, 2)))
    u_true = np.zeros((M, N, 2))
    u_true[:, :, 0] = shift[0]
    u_true[:, :, 1] = shift[1]
    from pottsflow.dataterm import residual

    core = (slice(shift[0], M - 1), slice(shift[1], N - 1))
    assert np.max(np.abs(residual(data, u_true)[core])) < 1e-12


def test_data_energy_is_convex_quadratic():
    rng = np.random.default_rng(6)
    f1 = smooth_texture((9, 9), rng)
    f2 = smooth_texture((9, 9), rng)
    data = build_flow_data(f1, f2, np.zeros((9, 9, 2)))
    for _ in range(20):
        u = rng.normal(size=(9, 9, 2))
        v = rng.normal(size=(9, 9, 2))
        mid = data_energy(data, 0.5 * (u + v))
        assert mid <= 0.5 * (data_energy(data, u) + data_energy(data, v)) + 1e-9


def test_kernel_directions_leave_energy_unchanged():
    rng = np.random.default_rng(7)
    f1 = smooth_texture((9, 9), rng)
    f2 = smooth_texture((9, 9), rng)
    data = build_flow_data(f1, f2, np.zeros((9, 9, 2)))
    u = rng.normal(size=(9, 9, 2))
    null = np.stack([-data.coeffs[:, :, 1], data.coeffs[:, :, 0]], axis=2)
    e0 = data_energy(data, u)
    e1 = data_energy(data, u + rng.normal() * null)
    assert abs(e1 - e0) <= 1e-9 * max(1.0, e0)


def test_out_of_grid_initializer_rejected():
    rng = np.random.default_rng(8)
    f = smooth_texture((6, 6), rng)
    with pytest.raises(OutOfGridError):
        build_disparity_data(f, f, np.full((6, 6), 2.0))
    with pytest.raises(OutOfGridError):
        build_flow_data(f, f, np.full((6, 6, 2), -7.0))


def test_shape_mismatches_rejected():
    rng = np.random.default_rng(9)
    f = smooth_texture((6, 6), rng)
    with pytest.raises(ValueError):
        build_disparity_data(f, smooth_texture((6, 7), rng), np.zeros((6, 6)))
    with pytest.raises(ValueError):
        build_flow_data(f, f, np.zeros((6, 6)))
    data = build_disparity_data(f, f, np.zeros((6, 6)))
    with pytest.raises(ValueError):
        data_energy(data, np.zeros((5, 6)))
