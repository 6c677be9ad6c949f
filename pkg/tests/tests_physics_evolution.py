import unittest
import sys
import tempfile
from math import pi
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.biscatter.grid.spec import GridSpec
from src.biscatter.grid.field import plane_wave, random_field, zeros
from src.biscatter.grid.codec import read_fields
from src.biscatter.physics.potential import PotentialProfile
from src.biscatter.physics.evolution import (
    EvolutionSpec,
    solve,
    step_cubic,
    step_hartree,
    energy,
    free_pullback,
    scattering_defect,
    write_snapshots,
)
from src.biscatter.config import TimeConfig
from src.biscatter.studies.harness import DataRecipe, make_initial_data
from src.biscatter.base.types import EquationKind, ProfileKind, RecipeKind
from src.biscatter.base.exceptions import EvolutionException, BlowupException, GridException


def _smooth(grid, seed=0):
    f = random_field(grid, np.random.default_rng(seed), decay=6.0)
    return f * (1.0 / f.l2_norm())


class TestEvolutionSpec(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec((2 * pi,), (32,))

    def test_dt_exceeds_T(self):
        with self.assertRaises(EvolutionException):
            EvolutionSpec(EquationKind.CUBIC, self.grid, 0.5, 0.1)

    def test_hartree_needs_parameters(self):
        with self.assertRaises(EvolutionException):
            EvolutionSpec(EquationKind.HARTREE, self.grid, 0.01, 1.0)

    def test_hartree_beta_range(self):
        with self.assertRaises(EvolutionException):
            EvolutionSpec(EquationKind.HARTREE, self.grid, 0.01, 1.0, profile=PotentialProfile(ProfileKind.GAUSSIAN), N=16, beta=1.5)

    def test_equation_alias(self):
        self.assertIs(EvolutionSpec("cubic-NLS", self.grid, 0.01, 1.0).equation, EquationKind.CUBIC)

    def test_coupling(self):
        spec = EvolutionSpec(EquationKind.HARTREE, self.grid, 0.01, 1.0, b0=5.0,
                             profile=PotentialProfile(ProfileKind.GAUSSIAN, b0=2.0), N=16, beta=0.25)
        self.assertEqual(spec.coupling, 2.0)


class TestSolve(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec((2 * pi,), (32,))
        self.profile = PotentialProfile(ProfileKind.GAUSSIAN, dim=1)

    def test_plane_wave_cubic_is_exact(self):
        wave = plane_wave(self.grid, (3,), 0.5)
        run = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.01, 1.0), wave)
        exact = wave * complex(np.exp(-1j * (9.0 + 0.25)))
        self.assertLess((run.final - exact).l2_norm() / wave.l2_norm(), 1e-12)

    def test_plane_wave_hartree_is_exact(self):
        wave = plane_wave(self.grid, (3,), 0.5)
        spec = EvolutionSpec(EquationKind.HARTREE, self.grid, 0.01, 1.0, profile=self.profile, N=64, beta=0.25)
        exact = wave * complex(np.exp(-1j * (9.0 + 0.25)))
        self.assertLess((solve(spec, wave).final - exact).l2_norm() / wave.l2_norm(), 1e-12)

    def test_linear_flow_without_interaction(self):
        wave = plane_wave(self.grid, (2,), 1e-8)
        run = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.1, 1.0), wave)
        self.assertTrue(run.final.equals(wave * complex(np.exp(-4j)), 1e-20))

    def test_conservation(self):
        data = _smooth(self.grid)
        run = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.001, 0.5), data)
        self.assertLess(run.mass_drift, 1e-10)
        self.assertLess(run.energy_drift, 1e-5)

    def test_hartree_conservation(self):
        data = _smooth(self.grid, seed=1)
        spec = EvolutionSpec(EquationKind.HARTREE, self.grid, 0.001, 0.5, profile=self.profile, N=16, beta=0.25)
        run = solve(spec, data)
        self.assertLess(run.mass_drift, 1e-10)
        self.assertLess(run.energy_drift, 1e-5)

    def test_snapshots_with_stride(self):
        run = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.1, 1.0, stride=3), _smooth(self.grid))
        np.testing.assert_allclose(run.times, [0.0, 0.3, 0.6, 0.9, 1.0])
        self.assertEqual(len(run.masses), 5)
        self.assertEqual(len(run.diagnostic_rows()), 5)

    def test_partial_final_step(self):
        run = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.3, 1.0), _smooth(self.grid))
        self.assertEqual(run.times[-1], 1.0)
        self.assertEqual(len(run.times), 5)

    def test_zero_time(self):
        data = _smooth(self.grid)
        run = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.1, 0.0), data)
        self.assertEqual(run.times, (0.0,))
        self.assertTrue(run.final.equals(data))

    def test_zero_field(self):
        run = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.1, 1.0), zeros(self.grid))
        self.assertEqual(run.mass_drift, 0.0)
        self.assertEqual(run.final.l2_norm(), 0.0)

    def test_delta_profile_matches_cubic_bitwise(self):
        data = _smooth(self.grid)
        cubic = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.01, 0.2, b0=2.0), data)
        spec = EvolutionSpec(EquationKind.HARTREE, self.grid, 0.01, 0.2, profile=PotentialProfile(ProfileKind.DELTA, b0=2.0), N=64, beta=0.25)
        hartree = solve(spec, data)
        np.testing.assert_array_equal(cubic.final.coefficients, hartree.final.coefficients)

    def test_hartree_approaches_cubic_as_N_grows(self):
        data = _smooth(self.grid)
        cubic = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.01, 0.2), data).final
        distances = []
        for N in (16, 256, 4096):
            spec = EvolutionSpec(EquationKind.HARTREE, self.grid, 0.01, 0.2, profile=self.profile, N=N, beta=0.25)
            distances.append((solve(spec, data).final - cubic).l2_norm())
        self.assertEqual(distances, sorted(distances, reverse=True))

    def test_step_functions_agree_with_solve(self):
        data = _smooth(self.grid)
        run = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.05, 0.05), data)
        self.assertTrue(step_cubic(data, 0.05, 1.0).equals(run.final, 1e-14))
        spec = EvolutionSpec(EquationKind.HARTREE, self.grid, 0.05, 0.05, profile=self.profile, N=64, beta=0.25)
        self.assertTrue(step_hartree(data, 0.05, self.profile, 64, 0.25).equals(solve(spec, data).final, 1e-14))

    def test_wrong_grid(self):
        with self.assertRaises(GridException):
            solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.1, 1.0), zeros(GridSpec((2 * pi,), (16,))))

    def test_dealiased_run_accepts_plain_datum(self):
        grid = self.grid.with_dealias(True)
        run = solve(EvolutionSpec(EquationKind.CUBIC, grid, 0.01, 0.1), _smooth(self.grid))
        self.assertTrue(run.final.grid.dealias)
        self.assertLess(run.mass_drift, 1e-10)

    def test_blowup_guard_on_non_finite_state(self):
        coefficients = np.array(_smooth(self.grid).coefficients)
        coefficients[1] = np.nan
        with self.assertRaises(BlowupException) as context:
            solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.1, 1.0), _smooth(self.grid).with_coefficients(coefficients))
        self.assertEqual(context.exception.step, 1)
        self.assertAlmostEqual(context.exception.t, 0.1)

    def test_energy_of_plane_wave(self):
        wave = plane_wave(self.grid, (2,), 1.0)
        spec = EvolutionSpec(EquationKind.CUBIC, self.grid, 0.1, 1.0)
        self.assertAlmostEqual(energy(wave, spec), 4.0 * 2 * pi + 0.5 * 2 * pi)


class TestSolverIntegrity(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec((16 * pi,), (256,), dealias=True)
        self.data = make_initial_data(DataRecipe(RecipeKind.SMOOTH_RANDOM, cutoff=8.0), self.grid)
        self.profile = PotentialProfile(ProfileKind.GAUSSIAN, dim=1)

    def _specs(self, dt, T):
        return (EvolutionSpec(EquationKind.CUBIC, self.grid, dt, T),
                EvolutionSpec(EquationKind.HARTREE, self.grid, dt, T, profile=self.profile, N=64, beta=0.25))

    def test_gauge_covariance(self):
        phase = complex(np.exp(0.7j))
        for spec in self._specs(0.01, 0.5):
            rotated = solve(spec, self.data * phase).final
            expected = solve(spec, self.data).final * phase
            self.assertLess((rotated - expected).l2_norm() / self.data.l2_norm(), 1e-12)

    def test_strang_order(self):
        T, dt = 0.5, 0.02
        reference = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, dt / 16, T), self.data).final
        coarse = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, dt, T), self.data).final
        fine = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, dt / 2, T), self.data).final
        ratio = (coarse - reference).l2_norm() / (fine - reference).l2_norm()
        self.assertGreaterEqual(ratio, 3.5)
        self.assertLessEqual(ratio, 4.5)

    def test_drift_at_default_step(self):
        dt = TimeConfig().dt
        for spec in self._specs(dt, 0.5):
            run = solve(spec, self.data)
            self.assertLessEqual(run.mass_drift, 1e-10)
            self.assertLessEqual(run.energy_drift, 1e-6)


class TestScattering(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec((2 * pi,), (32,))

    def test_free_pullback_inverts_linear_flow(self):
        wave = plane_wave(self.grid, (3,))
        evolved = wave * complex(np.exp(-9j * 0.7))
        self.assertTrue(free_pullback(evolved, 0.7).equals(wave, 1e-12))

    def test_scattering_defect_of_linear_run(self):
        wave = plane_wave(self.grid, (3,), 1e-9)
        run = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.1, 1.0), wave)
        self.assertLess(scattering_defect(run), 1e-20)

    def test_write_snapshots(self):
        run = solve(EvolutionSpec(EquationKind.CUBIC, self.grid, 0.1, 0.3), _smooth(self.grid))
        with tempfile.TemporaryDirectory() as directory:
            path = write_snapshots(run, Path(directory) / "snapshots.bin")
            fields = read_fields(path)
        self.assertEqual(len(fields), len(run.snapshots))
        self.assertTrue(fields[-1].equals(run.final))


if __name__ == '__main__':
    unittest.main()
