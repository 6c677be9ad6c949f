import unittest
import sys
from math import pi, sqrt
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.biscatter.grid.spec import GridSpec
from src.biscatter.grid.field import (
    SpectralField,
    transform_forward,
    transform_inverse,
    apply_multiplier,
    evaluate_multiplier,
    pointwise_product,
    conjugate,
    zeros,
    plane_wave,
    random_field,
    set_fft_workers,
    fft_workers,
)
from src.biscatter.base.exceptions import GridException


class TestSpectralField(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec((2 * pi,), (32,))
        self.unit = GridSpec((1.0,), (16,))
        self.rng = np.random.default_rng(7)

    def test_constant_on_unit_box(self):
        f = transform_forward(np.full(16, 3.0), self.unit)
        self.assertAlmostEqual(f.coefficients[0], 3.0)
        self.assertAlmostEqual(float(np.max(np.abs(f.coefficients[1:]))), 0.0)

    def test_plane_wave_values(self):
        wave = plane_wave(self.grid, (3,), 0.5)
        x = self.grid.coordinates(0)
        np.testing.assert_allclose(wave.values, 0.5 * np.exp(3j * x), atol=1e-14)
        self.assertAlmostEqual(wave.coefficients[3], 0.5 * sqrt(2 * pi))

    def test_parseval(self):
        f = random_field(self.grid, self.rng)
        physical = float(np.sum(np.abs(f.values) ** 2) * self.grid.cell_volume)
        self.assertAlmostEqual(physical, f.l2_norm() ** 2, places=10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_transform_roundtrip(self, seed):
        rng = np.random.default_rng(seed)
        values = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        np.testing.assert_allclose(transform_inverse(transform_forward(values, self.grid)), values, atol=1e-12)

    def test_coefficients_are_read_only(self):
        f = zeros(self.grid)
        with self.assertRaises(ValueError):
            f.coefficients[0] = 1.0

    def test_shape_mismatch(self):
        with self.assertRaises(GridException):
            SpectralField(self.grid, np.zeros(16))
        with self.assertRaises(GridException):
            transform_forward(np.zeros(16), self.grid)

    def test_inner(self):
        a = plane_wave(self.grid, (1,), 1.0)
        b = plane_wave(self.grid, (1,), 2j)
        self.assertAlmostEqual(a.inner(b), 2j * 2 * pi)
        self.assertAlmostEqual(a.inner(plane_wave(self.grid, (2,))), 0.0)

    def test_arithmetic(self):
        a, b = random_field(self.grid, self.rng), random_field(self.grid, self.rng)
        self.assertTrue(((a + b) - b).equals(a, 1e-14))
        self.assertTrue((2 * a).equals(a * 2))
        self.assertTrue((-a).equals(a * -1))

    def test_different_grids(self):
        with self.assertRaises(GridException):
            zeros(self.grid) + zeros(self.unit)

    def test_derivative_multiplier(self):
        wave = plane_wave(self.grid, (2,))
        derivative = apply_multiplier(wave, lambda xi: 1j * xi[0])
        np.testing.assert_allclose(derivative.coefficients, 2j * wave.coefficients)

    def test_scalar_multiplier(self):
        wave = plane_wave(self.grid, (2,))
        self.assertTrue(apply_multiplier(wave, 3.0).equals(wave * 3.0))

    def test_non_finite_multiplier(self):
        with self.assertRaises(GridException):
            evaluate_multiplier(self.grid, lambda xi: 1.0 / xi[0])

    def test_pointwise_product_of_plane_waves(self):
        product = pointwise_product(plane_wave(self.grid, (2,)), plane_wave(self.grid, (3,)))
        np.testing.assert_allclose(product.values, np.exp(5j * self.grid.coordinates(0)), atol=1e-12)

    def test_pointwise_product_dealiased(self):
        grid = self.grid.with_dealias(True)
        product = pointwise_product(plane_wave(grid, (6,)), plane_wave(grid, (6,)))
        self.assertAlmostEqual(product.l2_norm(), 0.0)

    def test_conjugate(self):
        wave = plane_wave(self.grid, (2,), 1j)
        np.testing.assert_allclose(conjugate(wave).values, np.conj(wave.values), atol=1e-14)

    def test_on_grid(self):
        f = random_field(self.grid, self.rng)
        moved = f.on_grid(self.grid.with_dealias(True))
        np.testing.assert_array_equal(moved.coefficients, f.coefficients)
        with self.assertRaises(GridException):
            f.on_grid(self.grid.refined(2))

    def test_random_field_decay(self):
        f = random_field(self.grid, np.random.default_rng(1), decay=50.0)
        self.assertLess(abs(f.coefficients[16]), 1e-50)

    def test_fft_workers(self):
        set_fft_workers(2)
        self.assertEqual(fft_workers(), 2)
        set_fft_workers(1)
        with self.assertRaises(ValueError):
            set_fft_workers(0)


if __name__ == '__main__':
    unittest.main()
