"""The full acceptance suite behind `biscatter --check`.

Each criterion returns named CheckOutcome verdicts; the suite writes acceptance.csv and a manifest
and exits 1 if any gated verdict fails.
"""
import logging
import math
import time
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .base.types import RecipeKind, ProfileKind, EquationKind, AblationVariant
from .base.exceptions import HierarchyConvergenceException, WorkbenchException
from .controller import CheckOutcome, build_manifest, write_manifest, EXIT_SUCCESS, EXIT_CHECK_FAILED, EXIT_ERROR
from .grid.spec import GridSpec
from .grid.field import plane_wave, random_field
from .physics.potential import PotentialProfile, measure_convolution_rate, bilinear_pairing_bound_check
from .physics.norms import sobolev_norm
from .physics.evolution import EvolutionSpec, solve
from .studies.harness import DataRecipe, make_initial_data, run_sweep, box_doubling_check, confirm_3d
from .studies.resonance import verify_lower_bound, ablation_check, quadrature_robustness_check, witness_box_doubling_check
from .studies.boardgame import verify_counts
from .studies.hierarchy import (
    MixedHierarchy,
    tensor_level_norm,
    tensor_difference_norm,
    kernel_level_norm,
    kernel_difference_norm,
    binomial_bound_check,
    master_norm_factorized,
)
from .utils.writers import write_csv


logger = logging.getLogger(__name__)

__SEED__ = 20240601
__RANDOM_PAIRS__ = 1000
__ORACLE_TOLERANCE__ = 1e-10
__GEOMETRIC_TOLERANCE__ = 1e-12
__PLANE_WAVE_TOLERANCE__ = 1e-12
__STRANG_WINDOW__ = (3.5, 4.5)
__MASS_TOLERANCE__ = 1e-10
__ENERGY_TOLERANCE__ = 1e-6


def _dyadic(low: int, high: int) -> list[int]:
    return [2 ** e for e in range(low, high + 1)]


def _within(name: str, value: float, low: float, high: float, **details) -> CheckOutcome:
    return CheckOutcome(name, bool(low <= value <= high), True, {"value": value, "low": low, "high": high, **details})


def _relative_window(target: float, fraction: float) -> tuple[float, float]:
    return tuple(sorted((target * (1.0 - fraction), target * (1.0 + fraction))))


def convolution_rate_checks() -> list[CheckOutcome]:
    beta, N_list = 0.25, _dyadic(4, 12)
    grid = GridSpec((64.0 * math.pi,), (16384,))
    smooth = make_initial_data(DataRecipe(RecipeKind.SMOOTH_RANDOM, seed=__SEED__, cutoff=8.0), grid)
    rough = make_initial_data(DataRecipe(RecipeKind.HQ_LIMITED, seed=__SEED__, cutoff=200.0), grid)
    shifted = PotentialProfile(ProfileKind.SHIFTED_GAUSSIAN, dim=1)
    even = PotentialProfile(ProfileKind.GAUSSIAN, dim=1)
    cases = [
        ("convolution.non_even_smooth", shifted, smooth, -beta, 0.10),
        ("convolution.even_smooth", even, smooth, -2.0 * beta, 0.10),
        ("convolution.even_h1_limited", even, rough, -beta, 0.20),
    ]
    outcomes = []
    for name, profile, f, target, fraction in cases:
        fit = measure_convolution_rate(profile, f, 1.0, N_list, beta)
        outcomes.append(_within(name, fit.slope, *_relative_window(target, fraction), target=target))
    return outcomes


def bilinear_checks() -> list[CheckOutcome]:
    beta, N_list = 0.25, _dyadic(4, 10)
    grid = GridSpec((16.0 * math.pi,), (256,))
    profile = PotentialProfile(ProfileKind.GAUSSIAN, dim=1)
    rng = np.random.default_rng(__SEED__)
    failures, total = 0, 0
    for _ in range(__RANDOM_PAIRS__):
        f1, f2 = random_field(grid, rng, decay=1.0), random_field(grid, rng, decay=1.0)
        for N in N_list:
            total += 1
            failures += not bilinear_pairing_bound_check(f1, f2, profile, N, beta).passed
    return [CheckOutcome("bilinear.pairing_bound", failures == 0, True, {"checked": total, "failures": failures})]


def _conservation(label: str, mass: float, energy: float) -> list[CheckOutcome]:
    return [
        CheckOutcome.at_most(f"{label}.mass_conservation", mass, __MASS_TOLERANCE__),
        CheckOutcome.at_most(f"{label}.energy_conservation", energy, __ENERGY_TOLERANCE__),
    ]


def biscattering_checks(jobs: int = 1) -> list[CheckOutcome]:
    beta, T, dt, N_list = 0.2, 1.0, 0.001, _dyadic(5, 10)
    grid = GridSpec((16.0 * math.pi,), (512,), dealias=True)
    profile = PotentialProfile(ProfileKind.GAUSSIAN, dim=1)
    rough = DataRecipe(RecipeKind.HQ_LIMITED, q=1.0, seed=__SEED__, cutoff=30.0)
    smooth = DataRecipe(RecipeKind.SMOOTH_RANDOM, q=1.0, seed=__SEED__, cutoff=8.0)

    outcomes = []
    rough_report = run_sweep(rough, beta, N_list, T, dt, profile, grid, jobs=jobs)
    outcomes.append(_within("biscattering.hq_limited_slope", rough_report.fit.slope, -0.26, -0.14))
    outcomes += _conservation("biscattering.hq_limited", rough_report.max_mass_drift, rough_report.max_energy_drift)
    outcomes.append(CheckOutcome.from_report("integrity.dt_robustness_hq_limited", rough_report.dt_robustness))
    smooth_report = run_sweep(smooth, beta, N_list, T, dt, profile, grid, jobs=jobs)
    outcomes.append(_within("biscattering.smooth_slope", smooth_report.fit.slope, -0.50, -0.30))
    outcomes += _conservation("biscattering.smooth", smooth_report.max_mass_drift, smooth_report.max_energy_drift)
    outcomes.append(CheckOutcome.from_report("integrity.dt_robustness_smooth", smooth_report.dt_robustness))

    cube = GridSpec.cube(3, 4.0 * math.pi, 64, dealias=True)
    rough_3d = DataRecipe(RecipeKind.HQ_LIMITED, q=1.0, seed=__SEED__, cutoff=14.0)
    report = confirm_3d(rough_3d, beta, (2 ** 5, 2 ** 7), T, 0.01, PotentialProfile(ProfileKind.GAUSSIAN, dim=3), cube,
                        rough_report.fit.slope)
    outcomes.append(CheckOutcome.from_report("biscattering.confirm_3d", report))
    outcomes.append(CheckOutcome.from_report("integrity.box_doubling", box_doubling_check(
        rough, beta, N_list, T, dt, profile, grid, jobs=jobs)))
    return outcomes


def optimality_checks(jobs: int = 1) -> list[CheckOutcome]:
    beta, N_list = 0.25, _dyadic(4, 9)
    outcomes = []
    for q in (1.0, 2.0):
        report = verify_lower_bound(beta, q, N_list, jobs=jobs)
        outcomes.append(CheckOutcome(f"optimality.lower_bound_q{q:g}", report.passed, True,
                                     {"slope": report.fit.slope, "target": -q * beta, "band_factor": report.band_factor}))
    mirror = ablation_check(beta, 1.0, N_list[-1], AblationVariant.MIRROR)
    outcomes.append(CheckOutcome.from_report("optimality.ablation_mirror", mirror))
    unpaired = ablation_check(beta, 1.0, N_list[-1], AblationVariant.UNPAIRED)
    outcomes.append(CheckOutcome.from_report("optimality.ablation_unpaired", unpaired, gated=False))
    outcomes.append(CheckOutcome.from_report(
        "integrity.witness_quadrature", quadrature_robustness_check(beta, 1.0, N_list[-1])))
    outcomes.append(CheckOutcome.from_report(
        "integrity.witness_box_doubling", witness_box_doubling_check(beta, 1.0, N_list, jobs=jobs)))
    return outcomes


def boardgame_checks() -> list[CheckOutcome]:
    results = [verify_counts(k, j) for k in range(1, 7) for j in range(1, 7)]
    failed = [(item.k, item.j) for item in results if not item.passed]
    return [CheckOutcome("boardgame.exhaustive", not failed, True, {"verified": len(results), "failed": failed})]


def _state_with_norm(grid: GridSpec, rng: np.random.Generator, radius: float):
    f = random_field(grid, rng, decay=1.0)
    return f * (radius / sobolev_norm(f, 1.0))


def hierarchy_checks() -> list[CheckOutcome]:
    grid = GridSpec((2.0 * math.pi,), (8,))
    rng = np.random.default_rng(__SEED__)
    outcomes = []

    worst = 0.0
    for _ in range(20):
        f, g = _state_with_norm(grid, rng, rng.uniform(0.2, 1.5)), _state_with_norm(grid, rng, rng.uniform(0.2, 1.5))
        for k in (1, 2):
            for closed, oracle in ((tensor_level_norm(f, 1.0, k), kernel_level_norm(f, 1.0, k)),
                                   (tensor_difference_norm(f, g, k), kernel_difference_norm(f, g, k))):
                worst = max(worst, abs(closed - oracle) / max(1.0, abs(oracle)))
    outcomes.append(CheckOutcome.at_most("hierarchy.kernel_oracle", worst, __ORACLE_TOLERANCE__))

    failures = 0
    for _ in range(__RANDOM_PAIRS__):
        f, g = _state_with_norm(grid, rng, rng.uniform(0.0, 1.0)), _state_with_norm(grid, rng, rng.uniform(0.0, 1.0))
        failures += sum(not binomial_bound_check(f, g, k, 1.0).passed for k in range(1, 6))
    outcomes.append(CheckOutcome("hierarchy.binomial_bound", failures == 0, True, {"checked": 5 * __RANDOM_PAIRS__, "failures": failures}))

    unit = _state_with_norm(grid, rng, 1.0)
    deviation = 0.0
    for Z in (2.0, 4.0, 10.0):
        r = sobolev_norm(unit, 1.0) ** 2 / Z
        partial = sum(r ** k for k in range(1, 2000))
        deviation = max(deviation, abs(master_norm_factorized(unit, 1.0, Z) - partial),
                        abs(MixedHierarchy((unit,), (1.0,)).master_norm(Z) - partial))
    outcomes.append(CheckOutcome.at_most("hierarchy.master_norm_geometric", deviation, __GEOMETRIC_TOLERANCE__))
    try:
        master_norm_factorized(unit, 1.0, sobolev_norm(unit, 1.0) ** 2)
        diverged = False
    except HierarchyConvergenceException:
        diverged = True
    outcomes.append(CheckOutcome("hierarchy.master_norm_divergence", diverged))
    return outcomes


def _final_state(spec: EvolutionSpec, initial):
    return solve(spec, initial).final


def solver_integrity_checks() -> list[CheckOutcome]:
    outcomes = []
    grid = GridSpec((2.0 * math.pi,), (32,), dealias=True)
    amplitude, mode, T = 0.5, (3,), 1.0
    wave = plane_wave(grid, mode, amplitude)
    k_squared = float(grid.k_squared()[grid.index_of(mode)])
    exact = wave * complex(np.exp(-1j * (k_squared + amplitude ** 2) * T))
    specs = {
        "cubic": EvolutionSpec(EquationKind.CUBIC, grid, 0.01, T),
        "hartree": EvolutionSpec(EquationKind.HARTREE, grid, 0.01, T, profile=PotentialProfile(ProfileKind.GAUSSIAN, dim=1), N=64, beta=0.25),
    }
    for label, spec in specs.items():
        error = (_final_state(spec, wave) - exact).l2_norm() / wave.l2_norm()
        outcomes.append(CheckOutcome.at_most(f"integrity.plane_wave_{label}", error, __PLANE_WAVE_TOLERANCE__))

    grid = GridSpec((16.0 * math.pi,), (256,), dealias=True)
    data = make_initial_data(DataRecipe(RecipeKind.SMOOTH_RANDOM, seed=__SEED__, cutoff=8.0), grid)
    T, dt = 0.5, 0.02
    reference = _final_state(EvolutionSpec(EquationKind.CUBIC, grid, dt / 16, T), data)
    coarse_run = solve(EvolutionSpec(EquationKind.CUBIC, grid, dt, T), data)
    fine = _final_state(EvolutionSpec(EquationKind.CUBIC, grid, dt / 2, T), data)
    ratio = (coarse_run.final - reference).l2_norm() / (fine - reference).l2_norm()
    outcomes.append(_within("integrity.strang_order", ratio, *__STRANG_WINDOW__))
    outcomes += _conservation("integrity.strang", coarse_run.mass_drift, coarse_run.energy_drift)
    return outcomes


__CRITERIA__: dict[str, Callable[..., list[CheckOutcome]]] = {
    "convolution_rate": lambda jobs: convolution_rate_checks(),
    "bilinear_bound": lambda jobs: bilinear_checks(),
    "biscattering_rate": biscattering_checks,
    "optimality": optimality_checks,
    "boardgame": lambda jobs: boardgame_checks(),
    "hierarchy": lambda jobs: hierarchy_checks(),
    "solver_integrity": lambda jobs: solver_integrity_checks(),
}


def run_acceptance(directory: str | Path, jobs: int = 1, criteria: Optional[Sequence[str]] = None) -> int:
    """Runs the acceptance criteria, writes acceptance.csv and the manifest

    Args:
        directory (str | Path): The output directory
        jobs (int): Worker processes for sweeps
        criteria (Sequence[str], optional): A subset of criterion names, all by default

    Returns:
        int: 0 if every gated check passed, 1 if one failed, 2 if a criterion could not run
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    names = list(__CRITERIA__) if criteria is None else list(criteria)
    unknown = [name for name in names if name not in __CRITERIA__]
    if unknown:
        raise ValueError(f"Unknown criteria {unknown}, expected some of {list(__CRITERIA__)}")

    started = time.perf_counter()
    rows, checks, error = [], [], None
    for name in names:
        logger.info("Acceptance criterion %s", name)
        try:
            outcomes = __CRITERIA__[name](jobs)
        except WorkbenchException as exc:
            logger.error("Criterion %s could not run: %s", name, exc)
            error = exc
            outcomes = [CheckOutcome(f"{name}.error", False, True, {"class": type(exc).__name__, "message": str(exc)})]
        for outcome in outcomes:
            if not outcome.passed:
                logger.warning("Acceptance check %s failed: %s", outcome.name, outcome.details)
            rows.append({"criterion": name, "check": outcome.name, "passed": outcome.passed, "gated": outcome.gated})
            checks.append(outcome)

    digest = write_csv(rows, directory / "acceptance.csv", ["criterion", "check", "passed", "gated"])
    if error is not None:
        exit_code = EXIT_ERROR
    elif any(check.gated and not check.passed for check in checks):
        exit_code = EXIT_CHECK_FAILED
    else:
        exit_code = EXIT_SUCCESS
    write_manifest(directory, build_manifest(
        config={"check": names, "jobs": jobs}, fingerprint=None, seed=__SEED__,
        wall_time=time.perf_counter() - started,
        checks=[check._to_dict() for check in checks],
        outputs={"acceptance.csv": digest.hex}, summary={"passed": sum(check.passed for check in checks), "total": len(checks)},
        exit_code=exit_code, error=error))
    logger.info("Acceptance suite finished with exit code %d", exit_code)
    return exit_code
