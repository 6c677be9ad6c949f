"""Run all tests."""
import unittest

from tests_utils_converters import TestConverters
from tests_utils_digest import TestDigest
from tests_utils_validators import TestValidators
from tests_utils_writers import TestWriters
from tests_base_interface import TestBaseInterface
from tests_base_types import TestBaseTypes, TestBoundReport, TestExceptions
from tests_grid_spec import TestGridSpec
from tests_grid_field import TestSpectralField
from tests_grid_codec import TestCodec
from tests_physics_potential import TestPotentialProfile, TestScaledConvolution, TestRatesAndBounds
from tests_physics_evolution import TestEvolutionSpec, TestSolve, TestSolverIntegrity, TestScattering
from tests_physics_norms import TestNorms
from tests_fit import TestFitRate, TestRateFit
from tests_pool import TestSweepPool
from tests_studies_harness import TestInitialData, TestPredictions, TestSweep, TestConfirm3D
from tests_studies_resonance import TestResonantDatum, TestDuhamelForcing, TestLowerBound
from tests_studies_boardgame import TestAdmissibleMap, TestCounts, TestSequences, TestTable
from tests_studies_hierarchy import (
    TestKernelOracle,
    TestBinomialBound,
    TestMasterNorm,
    TestMixedHierarchy,
    TestHierarchyDifference,
    TestHierarchySeries,
)
from tests_config import TestParseConfig, TestRunConfig
from tests_controller import TestCheckOutcome, TestController, TestManifest
from tests_workbench import TestOutputDirectory, TestWorkbench, TestCommandLine
from tests_acceptance import TestAcceptance


def main():
    """Run the tests."""
    test_suite = unittest.TestSuite()
    loader = unittest.TestLoader()

    # Utils tests
    for case in (TestConverters, TestDigest, TestValidators, TestWriters):
        test_suite.addTest(loader.loadTestsFromTestCase(case))

    # Base tests
    for case in (TestBaseInterface, TestBaseTypes, TestBoundReport, TestExceptions):
        test_suite.addTest(loader.loadTestsFromTestCase(case))

    # Grid tests
    for case in (TestGridSpec, TestSpectralField, TestCodec):
        test_suite.addTest(loader.loadTestsFromTestCase(case))

    # Physics tests
    for case in (TestPotentialProfile, TestScaledConvolution, TestRatesAndBounds,
                 TestEvolutionSpec, TestSolve, TestSolverIntegrity, TestScattering, TestNorms):
        test_suite.addTest(loader.loadTestsFromTestCase(case))

    # Fit and pool tests
    for case in (TestFitRate, TestRateFit, TestSweepPool):
        test_suite.addTest(loader.loadTestsFromTestCase(case))

    # Studies tests
    for case in (TestInitialData, TestPredictions, TestSweep, TestConfirm3D,
                 TestResonantDatum, TestDuhamelForcing, TestLowerBound,
                 TestAdmissibleMap, TestCounts, TestSequences, TestTable,
                 TestKernelOracle, TestBinomialBound, TestMasterNorm,
                 TestMixedHierarchy, TestHierarchyDifference, TestHierarchySeries):
        test_suite.addTest(loader.loadTestsFromTestCase(case))

    # Config, controller and entry point tests
    for case in (TestParseConfig, TestRunConfig, TestCheckOutcome, TestController, TestManifest,
                 TestOutputDirectory, TestWorkbench, TestCommandLine, TestAcceptance):
        test_suite.addTest(loader.loadTestsFromTestCase(case))

    # Run the test suite
    runner = unittest.TextTestRunner()
    runner.verbosity = 2
    runner.run(test_suite)


if __name__ == '__main__':
    main()
