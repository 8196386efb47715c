import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdenoise import InvalidArgumentError
from fracdenoise.field import (
    VectorField,
    central_gradient_magnitude,
    frac_divergence,
    frac_gradient,
    gradient_magnitude,
    pad_reflect,
)
from fracdenoise.fracops import build_two_sided_kernel

from oracles import apply_stencil_2d, mirror_index


@pytest.fixture(scope="module")
def k15():
    return build_two_sided_kernel(1.67, 15)


@pytest.fixture(scope="module")
def k_beta():
    return build_two_sided_kernel(1.55, 15)


class TestPadReflect:
    def test_constant(self):
        np.testing.assert_array_equal(pad_reflect(np.full((4, 5), 7.0), 3), np.full((10, 11), 7.0))

    def test_row(self):
        np.testing.assert_array_equal(pad_reflect([1, 2, 3], 2), [2, 1, 1, 2, 3, 3, 2])

    def test_matches_mirror_oracle_beyond_size(self):
        row = np.array([4.0, 9.0, 1.0])
        padded = pad_reflect(row, 7)
        expected = [row[mirror_index(i, 3)] for i in range(-7, 10)]
        np.testing.assert_array_equal(padded, expected)

    def test_idempotent_on_symmetric_extension(self):
        rng = np.random.default_rng(0)
        u = rng.normal(size=(6, 7))
        once = pad_reflect(u, 2)
        np.testing.assert_array_equal(pad_reflect(once[2:-2, 2:-2], 2), once)

    def test_margin_validated(self):
        with pytest.raises(InvalidArgumentError):
            pad_reflect(np.zeros((3, 3)), 0)


class TestGradient:
    def test_zero(self, k15):
        fx, fy = frac_gradient(np.zeros((9, 12)), k15)
        assert fx.shape == fy.shape == (9, 12)
        assert not fx.any() and not fy.any()

    def test_transpose_equivariance(self, k15):
        u = np.random.default_rng(1).uniform(0, 255, size=(20, 31))
        fx, fy = frac_gradient(u, k15)
        tx, ty = frac_gradient(u.T, k15)
        np.testing.assert_allclose(tx, fy.T, atol=1e-12)
        np.testing.assert_allclose(ty, fx.T, atol=1e-12)

    def test_impulse_against_loop_oracle(self, k15):
        u = np.zeros((40, 40))
        u[20, 17] = 1.0
        fx, fy = frac_gradient(u, k15)
        coeffs = list(k15.coeffs)
        np.testing.assert_allclose(fx, apply_stencil_2d(u.tolist(), coeffs, 1.0, 1.67, 1), atol=1e-14)
        np.testing.assert_allclose(fy, apply_stencil_2d(u.tolist(), coeffs, 1.0, 1.67, 0), atol=1e-14)
        np.testing.assert_allclose(fx[20, 17 - 13 : 17 + 14], k15.stencil(), atol=1e-15)

    def test_random_against_loop_oracle_with_boundary(self):
        k = build_two_sided_kernel(1.4, 8, h=0.5)
        u = np.random.default_rng(2).normal(size=(9, 11))
        fx, fy = frac_gradient(u, k)
        coeffs = list(k.coeffs)
        np.testing.assert_allclose(fx, apply_stencil_2d(u.tolist(), coeffs, 0.5, 1.4, 1), atol=1e-12)
        np.testing.assert_allclose(fy, apply_stencil_2d(u.tolist(), coeffs, 0.5, 1.4, 0), atol=1e-12)

    def test_constant_gives_stencil_sum(self, k15):
        fx, fy = frac_gradient(np.full((10, 10), 3.0), k15)
        np.testing.assert_allclose(fx, 3.0 * k15.stencil().sum(), rtol=1e-12)
        np.testing.assert_allclose(fy, fx, rtol=1e-12)

    def test_rejects_non_finite(self, k15):
        u = np.zeros((5, 5))
        u[2, 2] = np.nan
        with pytest.raises(InvalidArgumentError):
            frac_gradient(u, k15)


class TestDivergence:
    def test_zero(self, k15):
        z = np.zeros((8, 8))
        assert not frac_divergence(VectorField(z, z), k15).any()

    def test_shape_mismatch(self, k15):
        with pytest.raises(InvalidArgumentError):
            frac_divergence(VectorField(np.zeros((4, 4)), np.zeros((4, 5))), k15)

    def test_is_sum_of_axis_derivatives(self, k15):
        rng = np.random.default_rng(4)
        fx, fy = rng.normal(size=(2, 15, 18))
        expected = frac_gradient(fx, k15).fx + frac_gradient(fy, k15).fy
        np.testing.assert_allclose(frac_divergence(VectorField(fx, fy), k15), expected, atol=1e-12)

    def test_transpose_equivariance(self, k15):
        rng = np.random.default_rng(5)
        fx, fy = rng.normal(size=(2, 12, 17))
        d = frac_divergence(VectorField(fx, fy), k15)
        dt = frac_divergence(VectorField(fy.T, fx.T), k15)
        np.testing.assert_allclose(dt, d.T, atol=1e-12)

    def test_constant_round_trip_small(self, k15):
        c = 200.0
        u = np.full((16, 16), c)
        out = frac_divergence(frac_gradient(u, k15), k15)
        s = k15.stencil().sum()
        # each axis contributes s * (s * c); bounded by the truncation residual
        np.testing.assert_allclose(out, 2 * s * s * c, rtol=1e-10)
        assert np.abs(out).max() < 1e-2

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_linearity(self, k15, seed, a, b):
        rng = np.random.default_rng(seed)
        v1, v2, w1, w2 = rng.normal(size=(4, 10, 13))
        lhs = frac_divergence(VectorField(a * v1 + b * w1, a * v2 + b * w2), k15)
        rhs = a * frac_divergence(VectorField(v1, v2), k15) + b * frac_divergence(VectorField(w1, w2), k15)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-10)

    def test_round_trip_bounded(self, k15):
        u = np.random.default_rng(6).uniform(-50, 50, size=(30, 30))
        out = frac_divergence(frac_gradient(u, k15), k15)
        norm1 = k15.abs_sum()
        assert np.abs(out).max() <= 2 * norm1**2 * np.abs(u).max()


class TestMagnitude:
    def test_zero(self, k_beta):
        assert not gradient_magnitude(np.zeros((6, 6)), k_beta).any()

    def test_nonnegative_and_pythagorean(self, k_beta):
        u = np.random.default_rng(7).uniform(0, 255, size=(14, 14))
        fx, fy = frac_gradient(u, k_beta)
        mag = gradient_magnitude(u, k_beta)
        assert (mag >= 0).all()
        np.testing.assert_allclose(mag, np.sqrt(fx**2 + fy**2), rtol=1e-14)

    def test_rotation_invariance_of_symmetric_pattern(self, k_beta):
        y, x = np.mgrid[-10:11, -10:11]
        u = 100 * np.exp(-(x**2 + y**2) / 20.0)
        mag = gradient_magnitude(u, k_beta)
        np.testing.assert_allclose(np.rot90(mag), gradient_magnitude(np.rot90(u), k_beta), atol=1e-12)
        np.testing.assert_allclose(mag, mag.T, atol=1e-12)

    def test_step_edge_response_is_wider_than_integer_gradient(self, k_beta):
        u = np.zeros((32, 32))
        u[:, 16:] = 255.0
        frac = gradient_magnitude(u, k_beta)[16]
        integer = central_gradient_magnitude(u)[16]
        assert np.count_nonzero(integer > 1e-9) == 2
        # fractional response reaches beyond the two pixels next to the edge
        assert np.count_nonzero(frac > 0.01 * frac.max()) > 2
        assert frac[14] > integer[14] and frac[17] > integer[17]
