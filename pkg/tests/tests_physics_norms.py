import unittest
import sys
from math import pi, sqrt
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.biscatter.grid.spec import GridSpec
from src.biscatter.grid.field import plane_wave, random_field, zeros
from src.biscatter.physics.norms import (
    NormReport,
    sobolev_norm,
    homogeneous_norm,
    sobolev_inner,
    lp_norm,
    h1_difference,
    trajectory_sup_h1_diff,
    strichartz_diagnostic,
    norm_report,
)
from src.biscatter.base.types import NormKind
from src.biscatter.base.exceptions import EvolutionException, GridException


class _Trajectory:
    def __init__(self, snapshots, dt=0.1):
        self.snapshots = snapshots
        self._dt = dt

    @property
    def dt(self):
        return self._dt


class TestNorms(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec((2 * pi,), (32,))
        self.unit = GridSpec((1.0,), (16,))

    def test_zero_mode_on_unit_box(self):
        self.assertAlmostEqual(sobolev_norm(plane_wave(self.unit, (0,)), 3.0), 1.0)

    def test_plane_wave_sobolev(self):
        wave = plane_wave(self.grid, (3,), 0.5)
        self.assertAlmostEqual(sobolev_norm(wave, 1.0), sqrt(10.0) * 0.5 * sqrt(2 * pi))
        self.assertAlmostEqual(sobolev_norm(wave, 0.0), wave.l2_norm())

    def test_homogeneous_ignores_zero_mode(self):
        self.assertEqual(homogeneous_norm(plane_wave(self.grid, (0,)), 1.0), 0.0)
        self.assertAlmostEqual(homogeneous_norm(plane_wave(self.grid, (2,)), 0.5), sqrt(2.0) * sqrt(2 * pi))

    def test_homogeneous_order_zero_skips_zero_mode(self):
        wave = plane_wave(self.grid, (0,)) + plane_wave(self.grid, (1,))
        self.assertAlmostEqual(homogeneous_norm(wave, 0.0), sqrt(2 * pi))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.floats(min_value=0.0, max_value=2.0))
    def test_sobolev_monotone_in_s(self, seed, s):
        f = random_field(self.grid, np.random.default_rng(seed))
        self.assertLessEqual(sobolev_norm(f, s), sobolev_norm(f, s + 0.5) * (1 + 1e-12))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_sobolev_inner_matches_norm(self, seed):
        f = random_field(self.grid, np.random.default_rng(seed))
        self.assertAlmostEqual(sobolev_inner(f, f, 1.0).real, sobolev_norm(f, 1.0) ** 2, delta=1e-9 * sobolev_norm(f, 1.0) ** 2)

    def test_sobolev_inner_grid_mismatch(self):
        with self.assertRaises(GridException):
            sobolev_inner(zeros(self.grid), zeros(self.unit), 1.0)

    def test_lp_norm_of_plane_wave(self):
        wave = plane_wave(self.grid, (2,), 2.0)
        self.assertAlmostEqual(lp_norm(wave, 6.0), 2.0 * (2 * pi) ** (1 / 6))
        self.assertAlmostEqual(lp_norm(wave, 2.0), wave.l2_norm())

    def test_h1_difference(self):
        wave = plane_wave(self.grid, (1,))
        self.assertEqual(h1_difference(wave, wave), 0.0)
        self.assertAlmostEqual(h1_difference(wave * 2.0, wave), sobolev_norm(wave, 1.0))

    def test_trajectory_sup(self):
        wave = plane_wave(self.grid, (1,))
        a = _Trajectory([(0.0, wave), (0.1, wave)])
        b = _Trajectory([(0.0, wave), (0.1, wave * 3.0)])
        self.assertAlmostEqual(trajectory_sup_h1_diff(a, b), 2.0 * sobolev_norm(wave, 1.0))

    def test_trajectory_mismatched_times(self):
        wave = plane_wave(self.grid, (1,))
        with self.assertRaises(EvolutionException):
            trajectory_sup_h1_diff(_Trajectory([(0.0, wave)]), _Trajectory([(0.5, wave)]))

    def test_strichartz_single_snapshot(self):
        wave = plane_wave(self.grid, (0,), 1.0)
        value = strichartz_diagnostic(_Trajectory([(0.0, wave)], dt=0.25))
        self.assertAlmostEqual(value, sqrt(0.25) * (2 * pi) ** (1 / 6))

    def test_strichartz_constant_in_time(self):
        wave = plane_wave(self.grid, (0,), 1.0)
        value = strichartz_diagnostic(_Trajectory([(0.0, wave), (0.5, wave), (1.0, wave)]))
        self.assertAlmostEqual(value, (2 * pi) ** (1 / 6))

    def test_strichartz_empty(self):
        self.assertEqual(strichartz_diagnostic(_Trajectory([])), 0.0)

    def test_norm_report(self):
        report = norm_report(NormKind.HS, 2.0, s=1.0)
        self.assertEqual(report._to_dict(), {"kind": "Hs", "value": 2.0, "parameters": {"s": 1.0}})
        with self.assertRaises(ValueError):
            NormReport(NormKind.DS, -1.0)


if __name__ == '__main__':
    unittest.main()
