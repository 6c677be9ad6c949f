"""Paired cubic/Hartree solves across dyadic N and the fitted comparison rate."""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import NamedTuple, Optional, Sequence

import numpy as np
from attrs import define, field, validators

from ..base.interface import BaseInterface
from ..base.report import BoundReport
from ..base.types import RecipeKind, FitModel, EquationKind, enum_from_alias
from ..base.exceptions import ResolutionException, FitException
from ..fit import RateFit, fit_rate
from ..grid.spec import GridSpec
from ..grid.field import SpectralField
from ..physics.norms import sobolev_norm, trajectory_sup_h1_diff
from ..physics.potential import PotentialProfile
from ..physics.evolution import EvolutionSpec, EvolutionRun, solve
from ..pool import SweepPool, SweepEntry
from ..utils.validators import validate_nonnegative, is_dyadic_sequence
from .resonance import build_resonant_datum


logger = logging.getLogger(__name__)

__RESOLUTION_FACTOR__ = 4.0
__HQ_EXCESS__ = 0.01
__CONVERGENCE_WINDOW__ = 2.0 / 5.0
__OPTIMAL_WINDOW__ = 2.0 / 7.0
__MASS_DRIFT_TOLERANCE__ = 1e-10
__ENERGY_DRIFT_TOLERANCE__ = 1e-6


@define(frozen=True, slots=True, weakref_slot=False)
class DataRecipe(BaseInterface):
    """How to build an initial one-particle state

    Args:
        kind (RecipeKind): smooth-random, hq-limited, single-mode or resonant
        q (float): The regularity index, at least 1
        amplitude (float): The target ||f||_{H^q}
        seed (int): The phase seed
        cutoff (float): The spectral cutoff |xi| <= cutoff
        width (float): The Gaussian envelope width of smooth-random data
        mode (tuple[int, ...] | None): The mode of single-mode data, the zero mode by default
        N (int | None): N of the resonant datum
        beta (float | None): beta of the resonant datum
    """
    kind: RecipeKind = field(
        converter=lambda value: enum_from_alias(RecipeKind, value),
        validator=validators.instance_of(RecipeKind))

    q: float = field(
        default=1.0,
        converter=float,
        validator=validators.ge(1.0))

    amplitude: float = field(
        default=1.0,
        converter=float,
        validator=validate_nonnegative)

    seed: int = field(
        default=0,
        validator=validators.instance_of(int))

    cutoff: float = field(
        default=32.0,
        converter=float,
        validator=validators.gt(0.0))

    width: float = field(
        default=1.0,
        converter=float,
        validator=validators.gt(0.0))

    mode: Optional[tuple[int, ...]] = field(
        default=None,
        converter=lambda value: None if value is None else tuple(int(m) for m in value))

    N: Optional[int] = field(
        default=None,
        validator=validators.optional(validators.instance_of(int)))

    beta: Optional[float] = field(
        default=None,
        validator=validators.optional(validators.instance_of(float)))


def _normalise(f: SpectralField, q: float, amplitude: float) -> SpectralField:
    norm = sobolev_norm(f, q)
    return f if norm == 0.0 else f * (amplitude / norm)


def make_initial_data(recipe: DataRecipe, grid: GridSpec) -> SpectralField:
    """Builds the datum a recipe describes

    hq-limited: f_hat = A <xi>^(-q - d/2 - 0.01) e^(i theta) up to the cutoff, theta seeded uniform.
    smooth-random: f_hat = A exp(-|xi|^2 / (2 width^2)) e^(i theta) up to the cutoff.
    Both are scaled so that ||f||_{H^q} equals the amplitude.

    Raises:
        ResolutionException: If the cutoff exceeds the grid Nyquist wavenumber
    """
    if recipe.kind is RecipeKind.RESONANT:
        if recipe.N is None or recipe.beta is None:
            raise ResolutionException("The resonant recipe needs N and beta")
        return build_resonant_datum(recipe.N, recipe.beta, recipe.q, grid).data

    if recipe.kind is RecipeKind.SINGLE_MODE:
        mode = recipe.mode if recipe.mode is not None else (0,) * grid.dim
        coefficients = np.zeros(grid.shape, dtype=np.complex128)
        index = grid.index_of(mode)
        coefficients[index] = 1.0
        return _normalise(SpectralField(grid, coefficients), recipe.q, recipe.amplitude)

    if recipe.cutoff > grid.min_nyquist:
        raise ResolutionException(f"cutoff {recipe.cutoff} exceeds the grid Nyquist wavenumber {grid.min_nyquist:.4g}")
    rng = np.random.default_rng(recipe.seed)
    phases = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, grid.shape))
    k_squared = grid.k_squared()
    inside = k_squared <= recipe.cutoff ** 2
    if recipe.kind is RecipeKind.HQ_LIMITED:
        envelope = (1.0 + k_squared) ** (-(recipe.q + grid.dim / 2 + __HQ_EXCESS__) / 2)
    else:
        envelope = np.exp(-0.5 * k_squared / recipe.width ** 2)
    coefficients = np.where(inside, envelope * phases, 0.0)
    return _normalise(SpectralField(grid, coefficients), recipe.q, recipe.amplitude)


class PairResult(NamedTuple):
    """A cubic run, a Hartree run from the same datum, and their sup_t H^1 distance
    """
    cubic: EvolutionRun
    hartree: EvolutionRun
    sup_diff: float

    @property
    def mass_drift_max(self) -> float:
        return max(self.cubic.mass_drift, self.hartree.mass_drift)

    @property
    def energy_drift_max(self) -> float:
        return max(self.cubic.energy_drift, self.hartree.energy_drift)

    @property
    def drift_within_tolerance(self) -> bool:
        return self.mass_drift_max <= __MASS_DRIFT_TOLERANCE__ and self.energy_drift_max <= __ENERGY_DRIFT_TOLERANCE__


def run_pair(data: SpectralField, T: float, dt: float, profile: PotentialProfile, N: int, beta: float, stride: int = 1) -> PairResult:
    """Solves the cubic NLS (coupling b0) and the Hartree NLS from the same datum

    Raises:
        BlowupException: If either run trips the guard
    """
    grid = data.grid
    cubic = solve(EvolutionSpec(EquationKind.CUBIC, grid, dt, T, stride, b0=profile.b0), data)
    hartree = solve(EvolutionSpec(EquationKind.HARTREE, grid, dt, T, stride, profile=profile, N=N, beta=float(beta)), data)
    sup_diff = trajectory_sup_h1_diff(cubic, hartree)
    logger.info("Pair N=%d: sup_t ||phi - phi_N||_H1 = %.6e", N, sup_diff)
    pair = PairResult(cubic, hartree, sup_diff)
    if not pair.drift_within_tolerance:
        logger.warning("Pair N=%d at dt=%g: mass drift %.3e (tolerance %.0e), energy drift %.3e (tolerance %.0e)",
                       N, dt, pair.mass_drift_max, __MASS_DRIFT_TOLERANCE__, pair.energy_drift_max, __ENERGY_DRIFT_TOLERANCE__)
    return pair


def check_resolution(grid: GridSpec, N_max: int, beta: float) -> None:
    """Refuses grids whose Nyquist wavenumber is below 4 N_max^beta

    Raises:
        ResolutionException: If the grid cannot resolve the contracted scale
    """
    needed = __RESOLUTION_FACTOR__ * float(N_max) ** beta
    if needed > grid.min_nyquist:
        raise ResolutionException(
            f"Grid Nyquist wavenumber {grid.min_nyquist:.4g} is below 4*N_max^beta = {needed:.4g}")


def _sweep_element(arguments: tuple) -> SweepEntry:
    data, T, dt, profile, N, beta, stride, seed, q = arguments
    pair = run_pair(data, T, dt, profile, N, beta, stride)
    return SweepEntry(N, seed, q, pair.sup_diff, pair.mass_drift_max, pair.energy_drift_max)


@define(frozen=True, slots=True, weakref_slot=False)
class PredictedExponents(BaseInterface):
    """Exponents the measured slopes are compared against

    Args:
        beta (float): The contraction exponent
        q (float): The regularity index
        one_particle (float): -min(q, 2) beta
        hierarchy (float): max(5 beta / 2 - 1, -min(q, 2) beta)
        in_convergence_window (bool): beta in (0, 2/5)
        in_optimal_window (bool): beta in (0, 2/7]
    """
    beta: float = field(converter=float)
    q: float = field(converter=float)
    one_particle: float = field(converter=float)
    hierarchy: float = field(converter=float)
    in_convergence_window: bool = field(validator=validators.instance_of(bool))
    in_optimal_window: bool = field(validator=validators.instance_of(bool))


def predicted_exponents(beta: float, q: float) -> PredictedExponents:
    one_particle = -min(q, 2.0) * beta
    return PredictedExponents(
        beta, q, one_particle,
        max(2.5 * beta - 1.0, one_particle),
        bool(0.0 < beta < __CONVERGENCE_WINDOW__),
        bool(0.0 < beta <= __OPTIMAL_WINDOW__))


@define(frozen=True, slots=True, weakref_slot=False)
class Horizons(BaseInterface):
    """T = c1 E0^(-2) and Z = c2 E0 for a datum of size E0 = ||phi_0||_{H^1}"""
    E0: float = field(converter=float)
    T: float = field(converter=float)
    Z: float = field(converter=float)


def suggested_horizons(E0: float, c1: float = 1.0, c2: float = 4.0) -> Horizons:
    """Raises ValueError for a nonpositive E0"""
    if not E0 > 0.0:
        raise ValueError(f"E0 must be positive, got {E0}")
    return Horizons(E0, c1 / E0 ** 2, c2 * E0)


@define(frozen=True, slots=True, weakref_slot=False)
class SweepReport(BaseInterface):
    """A finished rate sweep

    Args:
        fit (RateFit): The fit of log(supDiff) against log(N)
        entries (tuple[SweepEntry, ...]): The per-N results in key order
        beta (float): The contraction exponent
        q (float): The regularity index of the recipe
        T (float): The final time
        dt (float): The time step
        predicted (PredictedExponents): The exponents to compare with
        horizons (Horizons | None): Suggested T and Z for the datum
        dt_robustness (BoundReport | None): The dt -> dt/2 rerun of the largest N
    """
    fit: RateFit = field(validator=validators.instance_of(RateFit))
    entries: tuple = field(converter=tuple)
    beta: float = field(converter=float)
    q: float = field(converter=float)
    T: float = field(converter=float)
    dt: float = field(converter=float)
    predicted: PredictedExponents = field(validator=validators.instance_of(PredictedExponents))
    horizons: Optional[Horizons] = field(default=None)
    dt_robustness: Optional[BoundReport] = field(default=None)

    @property
    def max_mass_drift(self) -> float:
        return max(entry.mass_drift_max for entry in self.entries)

    @property
    def max_energy_drift(self) -> float:
        return max(entry.energy_drift_max for entry in self.entries)

    def rows(self) -> list[dict]:
        """CSV rows (N, beta, q, T, dt, supDiff, mass_drift_max, energy_drift_max)"""
        return [
            {"N": entry.N, "beta": self.beta, "q": self.q, "T": self.T, "dt": self.dt, "supDiff": entry.sup_diff,
             "mass_drift_max": entry.mass_drift_max, "energy_drift_max": entry.energy_drift_max}
            for entry in self.entries]


def run_sweep(recipe: DataRecipe,
              beta: float,
              N_list: Sequence[int],
              T: float,
              dt: float,
              profile: PotentialProfile,
              grid: GridSpec,
              stride: int = 1,
              model: FitModel = FitModel.PURE_POWER,
              jobs: int = 1,
              dt_tolerance: float = 0.02) -> SweepReport:
    """Runs one pair per N, fits the comparison rate and reruns the largest N at dt/2

    Raises:
        FitException: If N_list is not at least four increasing powers of two
        ResolutionException: If the grid cannot resolve N_max^(-beta)
        DegenerateSamplesException: If every supDiff is at noise level
    """
    N_list = list(N_list)
    if not is_dyadic_sequence(N_list):
        raise FitException(f"sweep requires dyadic N_list, got {N_list}")
    if len(N_list) < 4:
        raise FitException(f"A sweep needs at least 4 values of N, got {len(N_list)}")
    check_resolution(grid, N_list[-1], beta)

    data = make_initial_data(recipe, grid)
    arguments = [(data, T, dt, profile, N, beta, stride, recipe.seed, recipe.q) for N in N_list]
    pool = SweepPool()
    logger.info("Sweep over N=%s with beta=%g, %s data, %d job(s)", N_list, beta, recipe.kind.value, jobs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            for entry in executor.map(_sweep_element, arguments):
                pool.add_entry(entry)
    else:
        for item in arguments:
            pool.add_entry(_sweep_element(item))

    fit = fit_rate(pool.samples(), model=model)
    E0 = sobolev_norm(data, 1.0)
    horizons = suggested_horizons(E0) if E0 > 0.0 else None
    entries = pool.ordered()
    robustness = check_dt_robustness(data, T, dt, profile, N_list[-1], beta, dt_tolerance, stride, coarse=entries[-1].sup_diff)
    return SweepReport(fit, entries, beta, recipe.q, T, dt, predicted_exponents(beta, recipe.q), horizons, robustness)


def sweep_rate(recipe: DataRecipe,
               beta: float,
               N_list: Sequence[int],
               T: float,
               dt: float,
               profile: PotentialProfile,
               grid: GridSpec,
               model: FitModel = FitModel.PURE_POWER,
               jobs: int = 1) -> RateFit:
    """The fitted rate of a sweep; see run_sweep"""
    return run_sweep(recipe, beta, N_list, T, dt, profile, grid, model=model, jobs=jobs).fit


def check_dt_robustness(data: SpectralField, T: float, dt: float, profile: PotentialProfile, N: int, beta: float,
                        tolerance: float = 0.02, stride: int = 1, coarse: Optional[float] = None) -> BoundReport:
    """Reruns a pair at dt/2 and bounds the relative change of supDiff

    The fine run keeps every other step so both runs sample the same times.

    Args:
        coarse (float | None): supDiff already measured at dt, computed here when None
    """
    if coarse is None:
        coarse = run_pair(data, T, dt, profile, N, beta, stride).sup_diff
    fine = run_pair(data, T, dt / 2, profile, N, beta, 2 * stride).sup_diff
    change = abs(fine - coarse) / coarse if coarse > 0.0 else abs(fine)
    if change > tolerance:
        logger.warning("supDiff changed by %.2f%% under dt -> dt/2 at N=%d", 100 * change, N)
    return BoundReport.compare(change, tolerance, N=N, dt=dt, coarse=coarse, fine=fine)


def box_doubling_check(recipe: DataRecipe, beta: float, N_list: Sequence[int], T: float, dt: float,
                       profile: PotentialProfile, grid: GridSpec, tolerance: float = 0.02, jobs: int = 1) -> BoundReport:
    """Reruns a sweep with L -> 2L and n -> 2n and bounds the relative change of the slope"""
    base = run_sweep(recipe, beta, N_list, T, dt, profile, grid, jobs=jobs).fit.slope
    doubled = run_sweep(recipe, beta, N_list, T, dt, profile, grid.refined(2), jobs=jobs).fit.slope
    change = abs(doubled - base) / abs(base) if base != 0.0 else abs(doubled)
    if change > tolerance:
        logger.warning("Box doubling moved the slope from %.4f to %.4f", base, doubled)
    return BoundReport.compare(change, tolerance, slope=base, doubled_slope=doubled)


def confirm_3d(recipe: DataRecipe, beta: float, N_pair: tuple[int, int], T: float, dt: float,
               profile: PotentialProfile, grid: GridSpec, reference_slope: float, factor: float = 1.5) -> BoundReport:
    """Two-point exponent on a 3D grid compared with a 1D slope within a factor

    Raises:
        ResolutionException: If the grid is not 3D or cannot resolve the larger N
    """
    if grid.dim != 3:
        raise ResolutionException(f"The 3D confirmation needs a 3D grid, got dimension {grid.dim}")
    N_low, N_high = sorted(N_pair)
    check_resolution(grid, N_high, beta)
    data = make_initial_data(recipe, grid)
    low = run_pair(data, T, dt, profile, N_low, beta).sup_diff
    high = run_pair(data, T, dt, profile, N_high, beta).sup_diff
    details = {"reference_slope": reference_slope, "N": [N_low, N_high], "supDiff": [low, high]}
    if not (low > 0.0 and high > 0.0):
        message = f"supDiff vanished at N={N_low if not low > 0.0 else N_high}, no exponent to compare"
        logger.warning(message)
        return BoundReport(math.inf, math.log(factor), False, {**details, "message": message})
    exponent = math.log(high / low) / math.log(N_high / N_low)
    if reference_slope == 0.0:
        message = "The 1D reference slope is zero, no ratio to compare"
        logger.warning(message)
        return BoundReport(math.inf, math.log(factor), False, {**details, "exponent": exponent, "message": message})
    ratio = exponent / reference_slope
    passed = 1.0 / factor <= ratio <= factor
    return BoundReport(abs(math.log(ratio)) if ratio > 0 else math.inf, math.log(factor), passed,
                       {**details, "exponent": exponent})
