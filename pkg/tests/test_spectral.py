"""Grid construction, transforms and the exact spectral operators."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vvvflow.errors import ConfigError, GridMismatchError, SymmetryError
from vvvflow.spectral import (
    LAMBDA_1,
    SpectralScalarField,
    SpectralVectorField,
    collocation_points,
    curl,
    derivative,
    divergence,
    forward_transform,
    forward_transform_vector,
    gradient,
    inverse_transform,
    laplacian,
    leray_project,
    make_grid,
    random_vector_field,
    stokes_apply,
    zero_scalar,
)
from vvvflow.diagnostics import sobolev_norm
from vvvflow.models import init_taylor_green

from oracles import finite_difference_derivative, taylor_green_curl_symbolic

seeds = st.integers(min_value=0, max_value=2**31 - 1)


class TestGrid:
    def test_cutoffs(self):
        assert make_grid(16).cutoff == 5
        assert make_grid(32).cutoff == 10

    @pytest.mark.parametrize("n", [7, 15, 33])
    def test_odd_rejected(self, n):
        with pytest.raises(ConfigError, match="even"):
            make_grid(n)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_too_small_rejected(self, n):
        with pytest.raises(ConfigError, match=">= 8"):
            make_grid(n)

    def test_mask_rules(self, grid16):
        mask = grid16.dealias_mask
        assert not mask[0, 0, 0]
        assert mask[5, 0, 0] and mask[-5, 0, 0]
        assert not mask[6, 0, 0]
        assert grid16.retained_mode_count == 11**3 - 1
        # symmetric under k -> -k so real fields stay representable
        flipped = mask[::-1, ::-1, ::-1]
        assert np.array_equal(np.roll(flipped, (1, 1, 1), axis=(0, 1, 2)), mask)

    def test_smallest_stokes_eigenvalue(self, grid16):
        assert grid16.lap[1, 0, 0] == pytest.approx(LAMBDA_1, rel=1e-15)
        assert grid16.volume == 1.0


class TestTransforms:
    def test_constant_maps_to_zero(self, grid16):
        f = forward_transform(np.full((16,) * 3, 3.7), grid16)
        assert np.all(f.coeffs == 0.0)

    def test_single_sine_pair(self, grid16):
        x, _, _ = collocation_points(grid16)
        f = forward_transform(np.sin(2 * np.pi * x), grid16)
        assert f.coeffs[1, 0, 0] == pytest.approx(-0.5j, abs=1e-15)
        assert f.coeffs[-1, 0, 0] == pytest.approx(0.5j, abs=1e-15)
        others = f.coeffs.copy()
        others[1, 0, 0] = others[-1, 0, 0] = 0.0
        assert np.max(np.abs(others)) <= 1e-15

    def test_dimension_mismatch(self, grid16):
        with pytest.raises(GridMismatchError):
            forward_transform(np.zeros((8, 8, 8)), grid16)

    @pytest.mark.parametrize("n", [16, 32])
    def test_round_trip_equals_filtered_samples(self, n):
        # oracle: plain numpy filter of the same samples
        grid = make_grid(n)
        rng = np.random.default_rng(42 + n)
        s = rng.standard_normal((n,) * 3)
        spectrum = np.fft.fftn(s) / n**3
        spectrum *= grid.dealias_mask
        filtered = np.real(np.fft.ifftn(spectrum * n**3))
        ours = inverse_transform(forward_transform(s, grid))
        assert np.max(np.abs(ours - filtered)) <= 1e-12 * np.max(np.abs(filtered))

    def test_zero_coeffs_to_zero_samples(self, grid16):
        assert np.all(inverse_transform(zero_scalar(grid16)) == 0.0)

    def test_sine_samples_back(self, grid16):
        _, y, _ = collocation_points(grid16)
        f = forward_transform(np.sin(2 * np.pi * y), grid16)
        out = inverse_transform(f)
        assert np.max(np.abs(out - np.sin(2 * np.pi * y))) <= 1e-12

    def test_broken_symmetry_rejected(self, grid16):
        f = zero_scalar(grid16)
        f.coeffs[1, 2, 3] = 1.0  # no conjugate partner
        with pytest.raises(SymmetryError):
            inverse_transform(f)

    @given(seed=seeds)
    @settings(deadline=None, max_examples=15)
    def test_round_trip_property(self, seed):
        grid = make_grid(16)
        v = random_vector_field(grid, seed)
        back = forward_transform_vector(
            np.stack([inverse_transform(v.component(i)) for i in range(3)]), grid)
        err = np.max(np.abs(back.coeffs - v.coeffs))
        assert err <= 1e-12 * max(np.max(np.abs(v.coeffs)), 1e-300)


class TestDerivative:
    def test_axis_validation(self, grid16):
        f = zero_scalar(grid16)
        with pytest.raises(ConfigError):
            derivative(f, 0)
        with pytest.raises(ConfigError):
            derivative(f, 4)

    def test_sine_derivative(self, grid16):
        x, _, _ = collocation_points(grid16)
        f = forward_transform(np.sin(2 * np.pi * x), grid16)
        out = inverse_transform(derivative(f, 1))
        expected = 2 * np.pi * np.cos(2 * np.pi * x)
        assert np.max(np.abs(out - expected)) <= 1e-12 * (2 * np.pi)

    def test_zero_field(self, grid16):
        assert np.all(derivative(zero_scalar(grid16), 2).coeffs == 0.0)

    def test_matches_finite_differences(self):
        # 8th-order centered differences on n=64 samples as the oracle
        grid = make_grid(64)
        rng = np.random.default_rng(3)
        f = forward_transform(rng.standard_normal((64,) * 3), grid)
        # band-limit hard so the FD truncation error stays below 1e-6
        keep = (np.abs(grid.k_along(0)) <= 4) & (np.abs(grid.k_along(1)) <= 4) \
            & (np.abs(grid.k_along(2)) <= 4)
        f.coeffs *= keep
        samples = inverse_transform(f)
        for axis in (1, 2, 3):
            ours = inverse_transform(derivative(f, axis))
            fd = finite_difference_derivative(samples, axis=axis - 1)
            scale = np.max(np.abs(ours))
            assert np.max(np.abs(ours - fd)) <= 1e-6 * scale

    @given(seed=seeds)
    @settings(deadline=None, max_examples=10)
    def test_mixed_partials_commute(self, seed):
        # multiplier commutativity, up to one rounding of each product
        grid = make_grid(16)
        f = random_vector_field(grid, seed).component(0)
        d12 = derivative(derivative(f, 1), 2)
        d21 = derivative(derivative(f, 2), 1)
        scale = max(np.max(np.abs(d12.coeffs)), 1e-300)
        assert np.max(np.abs(d12.coeffs - d21.coeffs)) <= 1e-15 * scale


class TestVectorCalculus:
    def test_curl_of_gradient_vanishes(self, grid16):
        rng = np.random.default_rng(11)
        phi = forward_transform(rng.standard_normal((16,) * 3), grid16)
        phi.coeffs /= max(np.max(np.abs(phi.coeffs)), 1e-300)
        residue = curl(gradient(phi))
        assert sobolev_norm(residue) <= 1e-13 * sobolev_norm(phi, 2)

    def test_divergence_of_curl_vanishes(self, grid16):
        v = random_vector_field(grid16, 5, amplitude=1.0)
        residue = divergence(curl(v))
        assert sobolev_norm(residue) <= 1e-13 * sobolev_norm(v, 2)

    def test_taylor_green_curl_matches_symbolic(self, grid16):
        u = init_taylor_green(grid16)
        ours = np.stack([inverse_transform(curl(u).component(i)) for i in range(3)])
        expected = taylor_green_curl_symbolic(collocation_points(grid16))
        assert np.max(np.abs(ours - expected)) <= 1e-12 * np.max(np.abs(expected))

    def test_curl_curl_identity(self, grid16):
        # curl curl v = grad div v - Lap v, mode-wise
        v = random_vector_field(grid16, 17)
        lhs = curl(curl(v)).coeffs
        rhs = gradient(divergence(v)).coeffs - laplacian(v).coeffs
        assert np.max(np.abs(lhs - rhs)) <= 1e-13 * np.max(np.abs(rhs))

    def test_divergence_of_taylor_green(self, grid16):
        u = init_taylor_green(grid16)
        assert sobolev_norm(divergence(u)) <= 1e-13

    def test_divergence_single_component(self, grid16):
        x, _, _ = collocation_points(grid16)
        vx = forward_transform(np.sin(2 * np.pi * x), grid16)
        v = SpectralVectorField(grid16, np.stack(
            [vx.coeffs, np.zeros_like(vx.coeffs), np.zeros_like(vx.coeffs)]))
        out = inverse_transform(divergence(v))
        expected = 2 * np.pi * np.cos(2 * np.pi * x)
        assert np.max(np.abs(out - expected)) <= 1e-12 * (2 * np.pi)


class TestLaplacianAndStokes:
    def test_laplacian_of_sine(self, grid16):
        x, _, _ = collocation_points(grid16)
        f = forward_transform(np.sin(2 * np.pi * x), grid16)
        out = inverse_transform(laplacian(f))
        expected = -LAMBDA_1 * np.sin(2 * np.pi * x)
        assert np.max(np.abs(out - expected)) <= 1e-11

    def test_stokes_on_solenoidal_equals_negative_laplacian(self, grid16):
        v = random_vector_field(grid16, 23, solenoidal=True)
        a = stokes_apply(v).coeffs
        b = -laplacian(v).coeffs
        assert np.max(np.abs(a - b)) <= 1e-13 * np.max(np.abs(b))

    def test_stokes_eigenvalue_on_ksq_two(self, grid16):
        # solenoidal single mode on |k|^2 = 2: eigenvalue 8 pi^2
        coeffs = np.zeros((3, 16, 16, 16), dtype=complex)
        coeffs[2, 1, 1, 0] = 1.0  # e_z is orthogonal to k = (1,1,0)
        coeffs[2, -1, -1, 0] = 1.0
        v = SpectralVectorField(grid16, coeffs)
        out = stokes_apply(v)
        assert out.coeffs[2, 1, 1, 0] == pytest.approx(8 * np.pi**2, rel=1e-14)

    def test_projection_idempotent_path(self, grid16):
        v = random_vector_field(grid16, 29)
        once = leray_project(v)
        twice = leray_project(once)
        assert np.max(np.abs(twice.coeffs - once.coeffs)) <= 1e-14 * max(
            np.max(np.abs(once.coeffs)), 1e-300)


class TestParseval:
    @pytest.mark.parametrize("n", [16, 32])
    def test_norm_matches_collocation_quadrature(self, n):
        grid = make_grid(n)
        v = random_vector_field(grid, 31)
        samples = np.stack([inverse_transform(v.component(i)) for i in range(3)])
        quad = np.sqrt(np.sum(samples**2) / n**3)
        spectral = sobolev_norm(v)
        assert spectral == pytest.approx(quad, rel=1e-12)

    def test_sine_norms(self, grid16):
        x, _, _ = collocation_points(grid16)
        f = forward_transform(np.sin(2 * np.pi * x), grid16)
        assert sobolev_norm(f) == pytest.approx(1 / np.sqrt(2), rel=1e-13)
        assert sobolev_norm(f, 1) == pytest.approx(2 * np.pi / np.sqrt(2), rel=1e-13)
