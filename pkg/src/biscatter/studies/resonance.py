"""The frequency-constrained datum whose Duhamel forcing saturates the N^(-q beta) rate.

The datum lives on two slabs in xi_1: a low bump [0, w) with amplitude N^(beta/2) and a high bump
[H, H + w) with amplitude N^(-beta (q - 1/2)), where H = N^beta and w = N^(-beta); transverse
wavenumbers fill [0, 1). The forcing is F(t) = int_0^t e^(i(t - t')Lap) (W_N * |phi|^2) phi (t') dt'
with phi(t') = e^(i t' Lap) f, evaluated by composite trapezoid quadrature in t'.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

import numpy as np
from attrs import define, field, validators, evolve
from scipy.fft import next_fast_len

from ..base.interface import BaseInterface
from ..base.report import BoundReport
from ..base.types import AblationVariant, ProfileKind, enum_from_alias
from ..base.exceptions import ResolutionException, QuadratureException, FitException
from ..fit import RateFit, fit_rate
from ..grid.spec import GridSpec
from ..grid.field import SpectralField, forward_coefficients, inverse_values
from ..physics.norms import sobolev_norm
from ..physics.potential import PotentialProfile, ScaledDeviationMultiplier
from ..utils.validators import is_dyadic_sequence


logger = logging.getLogger(__name__)

__MODES_PER_BUMP__ = 4
__TRANSVERSE_SPACING__ = 0.25
__TRANSVERSE_MODES__ = 32
__PHASE_RESOLUTION__ = 20
__SLOPE_WINDOW__ = (0.85, 1.15)
__BAND_FACTOR__ = 2.0
__ABLATION_FACTOR__ = 5.0


def resonant_grid(N: int, beta: float, modes_per_bump: int = __MODES_PER_BUMP__,
                  transverse_modes: int = __TRANSVERSE_MODES__, dim: int = 3) -> GridSpec:
    """The smallest anisotropic grid on which the datum and its forcing are exact

    Axis 0 has spacing N^(-beta)/modes_per_bump and reaches past 2 N^beta + 2 N^(-beta) + 1;
    transverse axes have spacing 1/4.
    """
    H, w = float(N) ** beta, float(N) ** (-beta)
    spacing = w / modes_per_bump
    half = next_fast_len(math.ceil((2.0 * H + 2.0 * w + 1.0) / spacing) + 1)
    extents = [2.0 * math.pi / spacing] + [2.0 * math.pi / __TRANSVERSE_SPACING__] * (dim - 1)
    modes = [2 * half] + [transverse_modes] * (dim - 1)
    logger.debug("Resonant grid for N=%d: modes %s", N, modes)
    return GridSpec(tuple(extents), tuple(modes))


def _axis_interval(grid: GridSpec, axis: int, low: float, high: float) -> np.ndarray:
    """Mask of wavenumbers in [low, high) on one axis"""
    k = grid.wavenumbers(axis)
    tolerance = 1e-9 * grid.spacing(axis)
    return (k >= low - tolerance) & (k < high - tolerance)


@define(frozen=True, slots=True, weakref_slot=False)
class ResonantDatum(BaseInterface):
    """The two-bump datum and its bookkeeping

    Args:
        N (int): The particle number
        beta (float): The contraction exponent
        q (float): The regularity index
        data (SpectralField): The datum
        variant (AblationVariant): none, mirror or unpaired
        bumps (tuple[tuple[float, float], ...]): The xi_1 intervals [a, b) carrying the datum
        amplitudes (tuple[float, ...]): The amplitude on each bump
        modes_per_bump (int): Grid modes per bump along xi_1
    """
    N: int = field(validator=validators.instance_of(int))
    beta: float = field(converter=float)
    q: float = field(converter=float)
    data: SpectralField = field(validator=validators.instance_of(SpectralField))
    variant: AblationVariant = field(validator=validators.instance_of(AblationVariant))
    bumps: tuple = field(converter=tuple)
    amplitudes: tuple = field(converter=tuple)
    modes_per_bump: int = field(validator=validators.instance_of(int))

    @property
    def H(self) -> float:
        return float(self.N) ** self.beta

    @property
    def width(self) -> float:
        return float(self.N) ** (-self.beta)

    @property
    def grid(self) -> GridSpec:
        return self.data.grid

    def support_bounds(self) -> tuple[tuple[float, float], ...]:
        """Open per-axis bounds containing the support of (W * |phi|^2) phi

        With S the xi_1 support, axis 0 uses (2 inf S - sup S - w, 2 sup S - inf S); transverse axes use (-1, 2).
        """
        low = min(a for a, _ in self.bumps)
        high = max(b for _, b in self.bumps)
        bounds = [(2 * low - high - self.width, 2 * high - low)]
        bounds += [(-1.0, 2.0)] * (self.grid.dim - 1)
        return tuple(bounds)

    def nonzero_columns(self) -> int:
        """Number of xi_1 values carrying a nonzero coefficient"""
        other_axes = tuple(range(1, self.grid.dim))
        occupied = np.any(self.data.coefficients != 0, axis=other_axes) if other_axes else self.data.coefficients != 0
        return int(np.count_nonzero(occupied))


def build_resonant_datum(N: int, beta: float, q: float, grid: GridSpec,
                         variant: AblationVariant = AblationVariant.NONE) -> ResonantDatum:
    """Sets the indicator-times-amplitude profile at grid modes, exact zeros elsewhere

    Coefficients carry the factor sqrt(prod(spacing) / (2 pi)^d) so that sums over modes
    approximate integrals over wavenumber space.

    Raises:
        ResolutionException: If a bump holds fewer than 4 modes or the grid stops short of 2 N^beta + 1
    """
    variant = enum_from_alias(AblationVariant, variant)
    H, w = float(N) ** beta, float(N) ** (-beta)
    per_bump = int(np.count_nonzero(_axis_interval(grid, 0, 0.0, w)))
    if per_bump < __MODES_PER_BUMP__:
        raise ResolutionException(f"Bump width N^-beta={w:.4g} holds {per_bump} modes, at least {__MODES_PER_BUMP__} are needed")
    reach = (grid.modes[0] // 2 - 1) * grid.spacing(0)
    if reach < max(2.0 * H + 1.0, 2.0 * H + 2.0 * w):
        raise ResolutionException(f"Grid reaches xi_1={reach:.4g}, the forcing needs {max(2 * H + 1, 2 * H + 2 * w):.4g}")
    for axis in range(1, grid.dim):
        if np.count_nonzero(_axis_interval(grid, axis, 0.0, 1.0)) == 0 or (grid.modes[axis] // 2 - 1) * grid.spacing(axis) < 2.0:
            raise ResolutionException(f"Transverse axis {axis} cannot hold [0, 1) and reach 2")

    low_amplitude, high_amplitude = float(N) ** (beta / 2), float(N) ** (-beta * (q - 0.5))
    bumps, amplitudes = [], []
    if variant is not AblationVariant.UNPAIRED:
        bumps.append((0.0, w))
        amplitudes.append(low_amplitude)
    bumps.append((-H - w, -H) if variant is AblationVariant.MIRROR else (H, H + w))
    amplitudes.append(high_amplitude)

    transverse = np.ones((1,) * grid.dim, dtype=bool)
    for axis in range(1, grid.dim):
        shape = [1] * grid.dim
        shape[axis] = grid.modes[axis]
        transverse = transverse & _axis_interval(grid, axis, 0.0, 1.0).reshape(shape)
    shape = [1] * grid.dim
    shape[0] = grid.modes[0]
    normalisation = math.sqrt(math.prod(grid.spacing(axis) for axis in range(grid.dim)) / (2.0 * math.pi) ** grid.dim)
    coefficients = np.zeros(grid.shape, dtype=np.complex128)
    for (a, b), amplitude in zip(bumps, amplitudes):
        column = _axis_interval(grid, 0, a, b).reshape(shape)
        coefficients = np.where(column & transverse, amplitude * normalisation, coefficients)
    return ResonantDatum(N, beta, q, SpectralField(grid, coefficients), variant, tuple(bumps), tuple(amplitudes), per_bump)


def quadrature_bound(grid: GridSpec) -> float:
    """2 pi / (20 xi_1max^2), the largest admissible step in t'"""
    xi_max = grid.nyquist(0)
    return 2.0 * math.pi / (__PHASE_RESOLUTION__ * xi_max ** 2)


class DuhamelAccumulator:
    """Accumulates sum_j w_j e^(i t'_j |xi|^2) g_hat(t'_j) over trapezoid nodes with a fixed step

    Successive calls to advance() continue the same composite rule, so [0, t] followed by
    [t, 2t] reproduces a single pass over [0, 2t].
    """

    def __init__(self, datum: ResonantDatum, profile: PotentialProfile, step: float):
        if step > quadrature_bound(datum.grid) * (1.0 + 1e-12):
            raise QuadratureException(f"Quadrature step {step:.4g} exceeds the bound {quadrature_bound(datum.grid):.4g}")
        self.grid = datum.grid
        self.step = step
        self.time = 0.0
        self._f_hat = datum.data.coefficients
        self._k_squared = self.grid.k_squared()
        self._zero = profile.kind is ProfileKind.DELTA
        self._multiplier = ScaledDeviationMultiplier(profile, datum.N, datum.beta).deviation(self.grid)
        self._sum = np.zeros(self.grid.shape, dtype=np.complex128)

    def integrand(self, t: float) -> np.ndarray:
        """e^(i t |xi|^2) g_hat(t) with g = (W_N * |phi|^2) phi and phi(t) = e^(i t Lap) f"""
        if self._zero:
            return np.zeros(self.grid.shape, dtype=np.complex128)
        phi = inverse_values(np.exp(-1j * t * self._k_squared) * self._f_hat, self.grid)
        rho_hat = forward_coefficients(np.abs(phi) ** 2, self.grid)
        potential = inverse_values(self._multiplier * rho_hat, self.grid).real
        return np.exp(1j * t * self._k_squared) * forward_coefficients(potential * phi, self.grid)

    def advance(self, t_end: float) -> None:
        """Extends the integral from the current time to t_end; a short final interval is allowed"""
        if t_end < self.time:
            raise QuadratureException(f"Cannot integrate backwards from {self.time} to {t_end}")
        span = t_end - self.time
        if span == 0.0:
            return
        count = math.floor(span / self.step + 1e-9)
        nodes = [self.time + i * self.step for i in range(count + 1)]
        if t_end - nodes[-1] > 1e-9 * self.step:
            nodes.append(t_end)
        else:
            nodes[-1] = t_end
        logger.debug("Quadrature over [%g, %g] with %d nodes", self.time, t_end, len(nodes))
        previous = self.integrand(nodes[0])
        for left, right in zip(nodes, nodes[1:]):
            current = self.integrand(right)
            self._sum += 0.5 * (right - left) * (previous + current)
            previous = current
        self.time = t_end

    def forcing(self) -> SpectralField:
        """F(t) at the current time"""
        return SpectralField(self.grid, np.exp(-1j * self.time * self._k_squared) * self._sum)


def default_step(grid: GridSpec, t: float, refine: int = 1) -> float:
    """The largest step dividing t evenly within the quadrature bound, divided by refine"""
    bound = quadrature_bound(grid)
    if t <= 0.0:
        return bound / refine
    return t / (math.ceil(t / bound) * refine)


def duhamel_forcing(datum: ResonantDatum, t: float, profile: Optional[PotentialProfile] = None,
                    step: Optional[float] = None) -> SpectralField:
    """F(t) for the datum

    Args:
        datum (ResonantDatum): The datum
        t (float): The final time, t >= 0
        profile (PotentialProfile | None): The interaction, an even Gaussian by default
        step (float | None): The quadrature step, at most 2 pi / (20 xi_1max^2)

    Raises:
        QuadratureException: If t < 0 or the step is too coarse
    """
    if t < 0.0:
        raise QuadratureException(f"t must be nonnegative, got {t}")
    profile = profile if profile is not None else PotentialProfile(ProfileKind.GAUSSIAN, dim=datum.grid.dim)
    accumulator = DuhamelAccumulator(datum, profile, step if step is not None else default_step(datum.grid, t))
    accumulator.advance(t)
    return accumulator.forcing()


def support_violation(forcing: SpectralField, datum: ResonantDatum) -> float:
    """Largest |coefficient| outside the support bounds of the datum"""
    grid = forcing.grid
    inside = np.ones((1,) * grid.dim, dtype=bool)
    for axis, (low, high) in enumerate(datum.support_bounds()):
        k = grid.wavenumbers(axis)
        shape = [1] * grid.dim
        shape[axis] = grid.modes[axis]
        inside = inside & ((k > low) & (k < high)).reshape(shape)
    outside = np.abs(np.where(inside, 0.0, forcing.coefficients))
    return float(np.max(outside, initial=0.0))


@define(frozen=True, slots=True, weakref_slot=False)
class SlabReport(BaseInterface):
    """H^1 mass of the forcing per xi_1 slab centred at -H, 0, H and 2H

    Args:
        masses (dict): Slab centre label to H^1 mass
        dominance_ratio (float): Mass of the H slab over the largest other slab
    """
    masses: dict = field(validator=validators.instance_of(dict))
    dominance_ratio: float = field(converter=float)


def slab_report(forcing: SpectralField, datum: ResonantDatum) -> SlabReport:
    """Splits xi_1 into the slabs |xi_1 - c| < H/2 for c in (-H, 0, H, 2H)"""
    grid = forcing.grid
    H = datum.H
    weighted = (1.0 + grid.k_squared()) * np.abs(forcing.coefficients) ** 2
    per_column = weighted.sum(axis=tuple(range(1, grid.dim))) if grid.dim > 1 else weighted
    k = grid.wavenumbers(0)
    masses = {}
    for label, centre in (("-H", -H), ("0", 0.0), ("H", H), ("2H", 2 * H)):
        masses[label] = float(np.sum(per_column[(k >= centre - H / 2) & (k < centre + H / 2)]))
    others = max(value for label, value in masses.items() if label != "H")
    ratio = masses["H"] / others if others > 0.0 else math.inf
    return SlabReport(masses, ratio)


def _forcing_norm(arguments: tuple) -> tuple[int, float, float]:
    N, beta, q, t, profile, variant, modes_per_bump, transverse_modes, dim = arguments
    grid = resonant_grid(N, beta, modes_per_bump, transverse_modes, dim)
    datum = build_resonant_datum(N, beta, q, grid, variant)
    forcing = duhamel_forcing(datum, t, evolve(profile, dim=dim))
    value = sobolev_norm(forcing, 1.0)
    dominance = slab_report(forcing, datum).dominance_ratio
    logger.info("Resonant forcing N=%d (%s): ||F(%g)||_H1 = %.6e, dominance %.3g", N, variant.value, t, value, dominance)
    return N, value, dominance


@define(frozen=True, slots=True, weakref_slot=False)
class LowerBoundReport(BaseInterface):
    """The N sweep of ||F(t)||_{H^1} against the N^(-q beta) lower bound

    Args:
        fit (RateFit): The log-log fit
        beta (float): The contraction exponent
        q (float): The regularity index
        rescaled (tuple[float, ...]): N^(q beta) ||F(t)||_{H^1} per N
        band_factor (float): max/min of the rescaled values
        dominance (tuple[float, ...]): Dominance ratio of the H slab per N
        passed (bool): Slope within 15% of -q beta and band factor at most 2
        variant (AblationVariant): The datum variant
    """
    fit: RateFit = field(validator=validators.instance_of(RateFit))
    beta: float = field(converter=float)
    q: float = field(converter=float)
    rescaled: tuple = field(converter=tuple)
    band_factor: float = field(converter=float)
    dominance: tuple = field(converter=tuple)
    passed: bool = field(validator=validators.instance_of(bool))
    variant: AblationVariant = field(default=AblationVariant.NONE)

    def rows(self) -> list[dict]:
        """CSV rows (N, beta, q, F_h1, rescaled, slope)"""
        return [
            {"N": N, "beta": self.beta, "q": self.q, "F_h1": value, "rescaled": rescaled, "slope": self.fit.slope}
            for (N, value), rescaled in zip(self.fit.samples, self.rescaled)]


def forcing_norms(beta: float, q: float, N_list: Sequence[int], t: float = 1.0, profile: Optional[PotentialProfile] = None,
                  variant: AblationVariant = AblationVariant.NONE, modes_per_bump: int = __MODES_PER_BUMP__,
                  transverse_modes: int = __TRANSVERSE_MODES__, dim: int = 3, jobs: int = 1) -> list[tuple[int, float, float]]:
    """(N, ||F(t)||_{H^1}, dominance ratio) per N on freshly built grids, in N order"""
    profile = profile if profile is not None else PotentialProfile(ProfileKind.GAUSSIAN, dim=dim)
    arguments = [(N, beta, q, t, profile, variant, modes_per_bump, transverse_modes, dim) for N in N_list]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(_forcing_norm, arguments))
    else:
        results = [_forcing_norm(item) for item in arguments]
    return sorted(results)


def verify_lower_bound(beta: float, q: float, N_list: Sequence[int], t: float = 1.0, profile: Optional[PotentialProfile] = None,
                       variant: AblationVariant = AblationVariant.NONE, modes_per_bump: int = __MODES_PER_BUMP__,
                       transverse_modes: int = __TRANSVERSE_MODES__, dim: int = 3, jobs: int = 1) -> LowerBoundReport:
    """Measures ||F(t)||_{H^1} across N and checks the N^(-q beta) scaling

    Raises:
        FitException: If N_list is not at least four increasing powers of two
        ResolutionException: If a per-N grid cannot be built
    """
    N_list = list(N_list)
    if len(N_list) < 4 or not is_dyadic_sequence(N_list):
        raise FitException(f"The lower-bound sweep needs at least 4 increasing powers of two, got {N_list}")
    variant = enum_from_alias(AblationVariant, variant)
    results = forcing_norms(beta, q, N_list, t, profile, variant, modes_per_bump, transverse_modes, dim, jobs)
    fit = fit_rate([(N, value) for N, value, _ in results], allow_discard=False)
    rescaled = tuple(float(N) ** (q * beta) * value for N, value, _ in results)
    band = max(rescaled) / min(rescaled) if min(rescaled) > 0.0 else math.inf
    target = -q * beta
    low, high = __SLOPE_WINDOW__[1] * target, __SLOPE_WINDOW__[0] * target
    passed = bool(low <= fit.slope <= high and band <= __BAND_FACTOR__)
    if not passed:
        logger.warning("Lower bound check failed: slope %.4f (window [%.4f, %.4f]), band factor %.3g", fit.slope, low, high, band)
    return LowerBoundReport(fit, beta, q, rescaled, band, tuple(d for _, _, d in results), passed, variant)


def ablation_check(beta: float, q: float, N: int, variant: AblationVariant, t: float = 1.0,
                   profile: Optional[PotentialProfile] = None, modes_per_bump: int = __MODES_PER_BUMP__,
                   transverse_modes: int = __TRANSVERSE_MODES__, dim: int = 3,
                   factor: float = __ABLATION_FACTOR__) -> BoundReport:
    """Compares ||F(t)||_{H^1} of the datum with an ablated variant at one N; passes when it drops by factor"""
    variant = enum_from_alias(AblationVariant, variant)
    (_, reference, _), = forcing_norms(beta, q, [N], t, profile, AblationVariant.NONE, modes_per_bump, transverse_modes, dim)
    (_, ablated, _), = forcing_norms(beta, q, [N], t, profile, variant, modes_per_bump, transverse_modes, dim)
    drop = reference / ablated if ablated > 0.0 else math.inf
    logger.info("Ablation %s at N=%d: ||F|| drops by %.3g", variant.value, N, drop)
    return BoundReport(factor, drop, bool(drop >= factor), {"N": N, "variant": variant.value, "reference": reference, "ablated": ablated})


def quadrature_robustness_check(beta: float, q: float, N: int, t: float = 1.0, profile: Optional[PotentialProfile] = None,
                                modes_per_bump: int = __MODES_PER_BUMP__, transverse_modes: int = __TRANSVERSE_MODES__,
                                dim: int = 3, tolerance: float = 0.01) -> BoundReport:
    """Halves the quadrature step at one N and bounds the relative change of ||F(t)||_{H^1}"""
    profile = evolve(profile if profile is not None else PotentialProfile(ProfileKind.GAUSSIAN, dim=dim), dim=dim)
    grid = resonant_grid(N, beta, modes_per_bump, transverse_modes, dim)
    datum = build_resonant_datum(N, beta, q, grid)
    coarse = sobolev_norm(duhamel_forcing(datum, t, profile, default_step(grid, t)), 1.0)
    fine = sobolev_norm(duhamel_forcing(datum, t, profile, default_step(grid, t, refine=2)), 1.0)
    change = abs(fine - coarse) / coarse if coarse > 0.0 else abs(fine)
    if change > tolerance:
        logger.warning("||F(%g)||_H1 changed by %.2f%% when the quadrature step was halved at N=%d", t, 100 * change, N)
    return BoundReport.compare(change, tolerance, N=N, step=default_step(grid, t), coarse=coarse, fine=fine)


def witness_box_doubling_check(beta: float, q: float, N_list: Sequence[int], t: float = 1.0,
                               profile: Optional[PotentialProfile] = None, modes_per_bump: int = __MODES_PER_BUMP__,
                               transverse_modes: int = __TRANSVERSE_MODES__, dim: int = 3,
                               tolerance: float = 0.02, jobs: int = 1) -> BoundReport:
    """Refits the forcing slope with the xi_1 spacing halved, which doubles the box along x_1

    Raises:
        FitException: If N_list is not at least four increasing powers of two
    """
    N_list = list(N_list)
    if len(N_list) < 4 or not is_dyadic_sequence(N_list):
        raise FitException(f"The lower-bound sweep needs at least 4 increasing powers of two, got {N_list}")
    slopes = []
    for per_bump in (modes_per_bump, 2 * modes_per_bump):
        results = forcing_norms(beta, q, N_list, t, profile, AblationVariant.NONE, per_bump, transverse_modes, dim, jobs)
        slopes.append(fit_rate([(N, value) for N, value, _ in results], allow_discard=False).slope)
    base, doubled = slopes
    change = abs(doubled - base) / abs(base) if base != 0.0 else abs(doubled)
    if change > tolerance:
        logger.warning("Doubling the x_1 box moved the forcing slope from %.4f to %.4f", base, doubled)
    return BoundReport.compare(change, tolerance, slope=base, doubled_slope=doubled,
                               modes_per_bump=[modes_per_bump, 2 * modes_per_bump])
