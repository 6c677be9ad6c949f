import unittest
import sys
from math import pi
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.biscatter.grid.spec import GridSpec
from src.biscatter.base.exceptions import GridException


class TestGridSpec(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec((16 * pi,), (256,))
        self.box = GridSpec((2 * pi, 4 * pi), (8, 16))

    def test_spacing(self):
        self.assertAlmostEqual(self.grid.spacing(0), 0.125)

    def test_nyquist(self):
        self.assertAlmostEqual(self.grid.nyquist(0), 16.0)
        self.assertAlmostEqual(self.box.min_nyquist, 4.0)

    def test_wavenumbers_in_transform_order(self):
        grid = GridSpec((2 * pi,), (8,))
        np.testing.assert_allclose(grid.wavenumbers(0), [0, 1, 2, 3, -4, -3, -2, -1])

    def test_mode_indices_are_read_only(self):
        with self.assertRaises(ValueError):
            self.grid.mode_indices(0)[0] = 5

    def test_anisotropic_shapes(self):
        self.assertEqual(self.box.dim, 2)
        self.assertEqual(self.box.shape, (8, 16))
        self.assertEqual(self.box.mode_count, 128)
        self.assertAlmostEqual(self.box.volume, 8 * pi ** 2)

    def test_k_squared(self):
        k_squared = self.box.k_squared()
        self.assertEqual(k_squared.shape, (8, 16))
        self.assertAlmostEqual(k_squared[1, 2], 1.0 + 1.0)
        self.assertAlmostEqual(k_squared[0, 0], 0.0)

    def test_dealias_mask(self):
        grid = GridSpec((2 * pi,), (12,))
        mask = grid.dealias_mask()
        self.assertEqual(int(mask.sum()), 9)
        self.assertTrue(mask[4])
        self.assertFalse(mask[5])

    def test_coordinates(self):
        grid = GridSpec((2.0,), (4,))
        np.testing.assert_allclose(grid.coordinates(0), [0.0, 0.5, 1.0, 1.5])

    def test_index_of(self):
        grid = GridSpec((2 * pi,), (8,))
        self.assertEqual(grid.index_of((-4,)), (4,))
        self.assertEqual(grid.index_of((3,)), (3,))
        self.assertEqual(grid.index_of((-1,)), (7,))

    def test_index_of_out_of_range(self):
        grid = GridSpec((2 * pi,), (8,))
        with self.assertRaises(GridException):
            grid.index_of((4,))
        with self.assertRaises(GridException):
            grid.index_of((0, 0))

    def test_cube(self):
        cube = GridSpec.cube(3, 4 * pi, 16)
        self.assertEqual(cube.modes, (16, 16, 16))
        self.assertEqual(cube.extents, (4 * pi,) * 3)

    def test_refined(self):
        refined = self.grid.refined(2)
        self.assertEqual(refined.modes, (512,))
        self.assertAlmostEqual(refined.nyquist(0), self.grid.nyquist(0))
        self.assertAlmostEqual(refined.spacing(0), self.grid.spacing(0) / 2)

    def test_with_dealias(self):
        self.assertTrue(self.grid.with_dealias(True).dealias)
        self.assertNotEqual(self.grid.with_dealias(True), self.grid)

    def test_odd_modes(self):
        with self.assertRaises(ValueError):
            GridSpec((1.0,), (7,))

    def test_mismatched_axes(self):
        with self.assertRaises(GridException):
            GridSpec((1.0, 1.0), (8,))

    def test_dimension_four(self):
        with self.assertRaises(GridException):
            GridSpec.cube(4, 1.0, 4)

    def test_negative_extent(self):
        with self.assertRaises(ValueError):
            GridSpec((-1.0,), (8,))

    def test_hashable(self):
        self.assertEqual(hash(GridSpec((16 * pi,), (256,))), hash(self.grid))


if __name__ == '__main__':
    unittest.main()
