import unittest
import sys
from math import pi
from pathlib import Path
from unittest.mock import patch

import numpy as np

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.biscatter.base.report import BoundReport
from src.biscatter.grid.spec import GridSpec
from src.biscatter.physics.norms import sobolev_norm
from src.biscatter.physics.potential import PotentialProfile
from src.biscatter.studies.harness import (
    DataRecipe,
    make_initial_data,
    run_pair,
    run_sweep,
    check_resolution,
    check_dt_robustness,
    confirm_3d,
    predicted_exponents,
    suggested_horizons,
)
from src.biscatter.base.types import RecipeKind, ProfileKind
from src.biscatter.base.exceptions import ResolutionException, FitException, DegenerateSamplesException


class TestInitialData(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec((2 * pi,), (64,))

    def test_recipe_alias(self):
        self.assertIs(DataRecipe("hq_limited").kind, RecipeKind.HQ_LIMITED)
        with self.assertRaises(ValueError):
            DataRecipe("noise")
        with self.assertRaises(ValueError):
            DataRecipe(RecipeKind.SMOOTH_RANDOM, q=0.5)

    def test_smooth_random_is_normalised(self):
        recipe = DataRecipe(RecipeKind.SMOOTH_RANDOM, q=2.0, amplitude=0.5, cutoff=8.0, width=2.0)
        self.assertAlmostEqual(sobolev_norm(make_initial_data(recipe, self.grid), 2.0), 0.5)

    def test_hq_limited_respects_cutoff(self):
        recipe = DataRecipe(RecipeKind.HQ_LIMITED, q=1.0, cutoff=10.0)
        f = make_initial_data(recipe, self.grid)
        outside = self.grid.k_squared() > 100.0
        self.assertTrue(np.all(f.coefficients[outside] == 0.0))
        self.assertAlmostEqual(sobolev_norm(f, 1.0), 1.0)

    def test_seed_determines_datum(self):
        a = make_initial_data(DataRecipe(RecipeKind.HQ_LIMITED, seed=3, cutoff=10.0), self.grid)
        b = make_initial_data(DataRecipe(RecipeKind.HQ_LIMITED, seed=3, cutoff=10.0), self.grid)
        c = make_initial_data(DataRecipe(RecipeKind.HQ_LIMITED, seed=4, cutoff=10.0), self.grid)
        self.assertTrue(a.equals(b))
        self.assertFalse(a.equals(c))

    def test_single_mode(self):
        f = make_initial_data(DataRecipe(RecipeKind.SINGLE_MODE, amplitude=2.0, mode=(3,)), self.grid)
        self.assertEqual(int(np.count_nonzero(f.coefficients)), 1)
        self.assertNotEqual(f.coefficients[3], 0.0)
        self.assertAlmostEqual(sobolev_norm(f, 1.0), 2.0)

    def test_cutoff_beyond_nyquist(self):
        with self.assertRaises(ResolutionException):
            make_initial_data(DataRecipe(RecipeKind.SMOOTH_RANDOM, cutoff=40.0), self.grid)

    def test_resonant_needs_N_and_beta(self):
        with self.assertRaises(ResolutionException):
            make_initial_data(DataRecipe(RecipeKind.RESONANT), self.grid)


class TestPredictions(unittest.TestCase):
    def test_resolution(self):
        grid = GridSpec((2 * pi,), (64,))
        check_resolution(grid, 4096, 0.25)
        with self.assertRaises(ResolutionException):
            check_resolution(grid, 8192, 0.25)

    def test_predicted_exponents(self):
        low = predicted_exponents(0.25, 1.0)
        self.assertAlmostEqual(low.one_particle, -0.25)
        self.assertAlmostEqual(low.hierarchy, -0.25)
        self.assertTrue(low.in_convergence_window)
        self.assertTrue(low.in_optimal_window)

        high = predicted_exponents(0.3, 3.0)
        self.assertAlmostEqual(high.one_particle, -0.6)
        self.assertAlmostEqual(high.hierarchy, -0.25)
        self.assertTrue(high.in_convergence_window)
        self.assertFalse(high.in_optimal_window)

        self.assertFalse(predicted_exponents(0.5, 1.0).in_convergence_window)

    def test_horizons(self):
        horizons = suggested_horizons(2.0)
        self.assertAlmostEqual(horizons.T, 0.25)
        self.assertAlmostEqual(horizons.Z, 8.0)
        with self.assertRaises(ValueError):
            suggested_horizons(0.0)


class TestSweep(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec((2 * pi,), (64,))
        self.recipe = DataRecipe(RecipeKind.SMOOTH_RANDOM, q=1.0, cutoff=8.0, width=2.0)
        self.profile = PotentialProfile(ProfileKind.GAUSSIAN, dim=1)
        self.N_list = [16, 32, 64, 128]

    def test_run_pair(self):
        data = make_initial_data(self.recipe, self.grid)
        pair = run_pair(data, 0.1, 0.01, self.profile, 64, 0.25)
        self.assertGreater(pair.sup_diff, 0.0)
        self.assertLess(pair.mass_drift_max, 1e-10)

    def test_run_pair_within_drift_tolerance(self):
        data = make_initial_data(DataRecipe(RecipeKind.SMOOTH_RANDOM, cutoff=8.0), GridSpec((16 * pi,), (256,)))
        with self.assertNoLogs("src.biscatter.studies.harness", level="WARNING"):
            pair = run_pair(data, 0.5, 0.001, self.profile, 64, 0.25)
        self.assertTrue(pair.drift_within_tolerance)

    def test_run_pair_warns_on_drift(self):
        data = make_initial_data(self.recipe, self.grid)
        with patch("src.biscatter.studies.harness.__ENERGY_DRIFT_TOLERANCE__", -1.0):
            with self.assertLogs("src.biscatter.studies.harness", level="WARNING") as logs:
                pair = run_pair(data, 0.1, 0.01, self.profile, 64, 0.25)
            self.assertFalse(pair.drift_within_tolerance)
        self.assertIn("energy drift", logs.output[0])

    def test_run_pair_delta_profile(self):
        data = make_initial_data(self.recipe, self.grid)
        self.assertEqual(run_pair(data, 0.1, 0.01, PotentialProfile(ProfileKind.DELTA), 64, 0.25).sup_diff, 0.0)

    def test_sweep_decays(self):
        report = run_sweep(self.recipe, 0.25, self.N_list, 0.1, 0.01, self.profile, self.grid)
        self.assertEqual(report.fit.N_values, tuple(self.N_list))
        self.assertLess(report.fit.slope, 0.0)
        self.assertEqual([row["N"] for row in report.rows()], self.N_list)
        self.assertEqual(set(report.rows()[0]), {"N", "beta", "q", "T", "dt", "supDiff", "mass_drift_max", "energy_drift_max"})
        self.assertLess(report.max_mass_drift, 1e-10)
        self.assertIsNotNone(report.horizons)
        self.assertIsInstance(report.dt_robustness, BoundReport)
        self.assertEqual(report.dt_robustness.details["N"], 128)
        self.assertEqual(report.dt_robustness.details["dt"], 0.01)
        self.assertEqual(report.dt_robustness.details["coarse"], report.entries[-1].sup_diff)

    def test_sweep_in_parallel_matches_serial(self):
        serial = run_sweep(self.recipe, 0.25, self.N_list, 0.05, 0.01, self.profile, self.grid)
        parallel = run_sweep(self.recipe, 0.25, self.N_list, 0.05, 0.01, self.profile, self.grid, jobs=2)
        self.assertEqual(serial.entries, parallel.entries)

    def test_sweep_requires_dyadic_N(self):
        with self.assertRaises(FitException) as context:
            run_sweep(self.recipe, 0.25, [16, 32, 48, 64], 0.1, 0.01, self.profile, self.grid)
        self.assertIn("sweep requires dyadic N_list", str(context.exception))

    def test_sweep_requires_four_N(self):
        with self.assertRaises(FitException):
            run_sweep(self.recipe, 0.25, [16, 32, 64], 0.1, 0.01, self.profile, self.grid)

    def test_sweep_resolution(self):
        with self.assertRaises(ResolutionException):
            run_sweep(self.recipe, 0.25, [1024, 2048, 4096, 8192], 0.1, 0.01, self.profile, self.grid)

    def test_sweep_delta_profile_is_degenerate(self):
        with self.assertRaises(DegenerateSamplesException):
            run_sweep(self.recipe, 0.25, self.N_list, 0.05, 0.01, PotentialProfile(ProfileKind.DELTA), self.grid)

    def test_dt_robustness_report(self):
        data = make_initial_data(self.recipe, self.grid)
        report = check_dt_robustness(data, 0.05, 0.005, self.profile, 64, 0.25, tolerance=1.0)
        self.assertTrue(report.passed)
        self.assertEqual(report.details["N"], 64)

    def test_dt_robustness_reuses_coarse_value(self):
        data = make_initial_data(self.recipe, self.grid)
        fine = run_pair(data, 0.05, 0.005, self.profile, 64, 0.25, stride=2).sup_diff
        report = check_dt_robustness(data, 0.05, 0.01, self.profile, 64, 0.25, coarse=2.0 * fine)
        self.assertEqual(report.details["fine"], fine)
        self.assertAlmostEqual(report.lhs, 0.5)
        self.assertFalse(report.passed)

    def test_confirm_3d_needs_3d_grid(self):
        with self.assertRaises(ResolutionException):
            confirm_3d(self.recipe, 0.25, (16, 64), 0.1, 0.01, self.profile, self.grid, -0.5)


class TestConfirm3D(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec.cube(3, 2 * pi, 16)
        self.recipe = DataRecipe(RecipeKind.SMOOTH_RANDOM, q=1.0, cutoff=4.0)

    def test_vanishing_difference_fails_with_message(self):
        report = confirm_3d(self.recipe, 0.2, (2, 4), 0.02, 0.01, PotentialProfile(ProfileKind.DELTA, dim=3), self.grid, -0.2)
        self.assertFalse(report.passed)
        self.assertEqual(report.lhs, float("inf"))
        self.assertEqual(report.details["supDiff"], [0.0, 0.0])
        self.assertIn("supDiff vanished", report.details["message"])

    def test_zero_reference_slope_fails_with_message(self):
        report = confirm_3d(self.recipe, 0.2, (2, 4), 0.02, 0.01, PotentialProfile(ProfileKind.GAUSSIAN, dim=3), self.grid, 0.0)
        self.assertFalse(report.passed)
        self.assertIn("exponent", report.details)
        self.assertIn("reference slope is zero", report.details["message"])


if __name__ == '__main__':
    unittest.main()
