"""Interaction profiles, their contractions V_N and the mean-field deviation W_N = V_N - b0*delta.

Convolutions are Fourier multipliers evaluated from the analytic (or tabulated) transform at the
scaled argument xi * N^(-beta); V_N is never sampled in physical space.
"""
import logging
import math
from functools import lru_cache
from typing import Iterable

import numpy as np
from attrs import define, field, validators
from scipy import integrate, special

from ..base.interface import BaseInterface
from ..base.report import BoundReport
from ..base.types import ProfileKind, enum_from_alias
from ..base.exceptions import PotentialException, GridException
from ..fit import RateFit, fit_rate
from ..grid.spec import GridSpec
from ..grid.field import SpectralField, apply_multiplier
from ..utils.validators import validate_positive, validate_open_unit_interval, is_dyadic_sequence
from .norms import homogeneous_norm


logger = logging.getLogger(__name__)

__BUMP_NODES__ = 8193
__BUMP_CHUNK__ = 1024


def _bump(r: np.ndarray, radius: float) -> np.ndarray:
    """exp(-1/(1 - (r/R)^2)) inside the ball, 0 outside"""
    u = (np.asarray(r) / radius) ** 2
    inside = u < 1.0
    values = np.zeros_like(u, dtype=float)
    values[inside] = np.exp(-1.0 / (1.0 - u[inside]))
    return values


def _sphere_area(dim: int) -> float:
    return 2.0 * math.pi ** (dim / 2) / special.gamma(dim / 2)


@lru_cache(maxsize=8)
def _bump_nodes(radius: float, dim: int) -> tuple[np.ndarray, np.ndarray, float]:
    r = np.linspace(0.0, radius, __BUMP_NODES__)
    v = _bump(r, radius)
    mass = _sphere_area(dim) * integrate.trapezoid(v * r ** (dim - 1), r)
    return r, v, float(mass)


def _bump_transform(k: np.ndarray, radius: float, dim: int) -> np.ndarray:
    """Radial Fourier transform of the unit-mass bump at |xi| = k (k > 0)"""
    r, v, mass = _bump_nodes(radius, dim)
    out = np.empty_like(k)
    for start in range(0, k.size, __BUMP_CHUNK__):
        kc = k[start:start + __BUMP_CHUNK__, None]
        if dim == 1:
            integrand = 2.0 * v * np.cos(kc * r)
        else:
            order = dim / 2 - 1
            integrand = (2.0 * math.pi) ** (dim / 2) * kc ** (1 - dim / 2) * v * special.jv(order, kc * r) * r ** (dim / 2)
        out[start:start + __BUMP_CHUNK__] = integrate.trapezoid(integrand, r, axis=1)
    return out / mass


@define(frozen=True, slots=True, weakref_slot=False)
class PotentialProfile(BaseInterface):
    """An unscaled interaction profile V with Fourier transform V_hat and V_hat(0) = b0

    Args:
        kind (ProfileKind): gaussian, shifted-gaussian, bump or delta
        b0 (float): The coupling constant, the integral of V
        dim (int): The space dimension
        sigma (float): Width of the Gaussian profiles
        shift (float): Displacement of the shifted Gaussian along the first axis
        radius (float): Support radius of the bump

    Examples:
        >>> profile = PotentialProfile(ProfileKind.GAUSSIAN, b0=1.0, dim=1)
        >>> profile.fourier((np.zeros(1),))
        array([1.])
    """
    kind: ProfileKind = field(
        converter=lambda value: enum_from_alias(ProfileKind, value),
        validator=validators.instance_of(ProfileKind))

    b0: float = field(
        default=1.0,
        converter=float,
        validator=validate_positive)

    dim: int = field(
        default=1,
        validator=validators.in_((1, 2, 3)))

    sigma: float = field(
        default=1.0,
        converter=float,
        validator=validate_positive)

    shift: float = field(
        default=1.0,
        converter=float)

    radius: float = field(
        default=1.0,
        converter=float,
        validator=validate_positive)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def even(self) -> bool:
        return self.kind is not ProfileKind.SHIFTED_GAUSSIAN or self.shift == 0.0

    @property
    def nonnegative(self) -> bool:
        return True

    @property
    def first_moment(self) -> float:
        """||x V||_{L^1}"""
        match self.kind:
            case ProfileKind.DELTA:
                return 0.0
            case ProfileKind.GAUSSIAN:
                return self.b0 * self.sigma * math.sqrt(2.0) * special.gamma((self.dim + 1) / 2) / special.gamma(self.dim / 2)
            case ProfileKind.SHIFTED_GAUSSIAN:
                # Mean of a noncentral chi variable with noncentrality |shift|/sigma
                centred = self.sigma * math.sqrt(2.0) * special.gamma((self.dim + 1) / 2) / special.gamma(self.dim / 2)
                return self.b0 * centred * float(special.hyp1f1(-0.5, self.dim / 2, -0.5 * (self.shift / self.sigma) ** 2))
            case ProfileKind.BUMP:
                weight = lambda r: _bump(r, self.radius)
                top, _ = integrate.quad(lambda r: weight(r) * r ** self.dim, 0.0, self.radius, limit=200)
                bottom, _ = integrate.quad(lambda r: weight(r) * r ** (self.dim - 1), 0.0, self.radius, limit=200)
                return self.b0 * top / bottom

    def fourier(self, xi: tuple[np.ndarray, ...]) -> np.ndarray:
        """V_hat at the (broadcastable) wavenumber arrays xi"""
        return self.b0 + self.deviation(xi)

    def deviation(self, xi: tuple[np.ndarray, ...]) -> np.ndarray:
        """V_hat(xi) - b0, evaluated without cancellation near xi = 0

        Raises:
            PotentialException: If the number of axes does not match the profile dimension
        """
        if len(xi) != self.dim:
            raise PotentialException(f"Profile of dimension {self.dim} evaluated on {len(xi)} axes")
        k_squared = sum(np.asarray(axis, dtype=float) ** 2 for axis in xi)
        k_squared = np.broadcast_to(k_squared, np.broadcast_shapes(*(np.shape(axis) for axis in xi)))
        match self.kind:
            case ProfileKind.DELTA:
                return np.zeros(k_squared.shape)
            case ProfileKind.GAUSSIAN:
                return self.b0 * np.expm1(-0.5 * self.sigma ** 2 * k_squared)
            case ProfileKind.SHIFTED_GAUSSIAN:
                phase = np.asarray(xi[0], dtype=float) * self.shift
                return self.b0 * np.expm1(-0.5 * self.sigma ** 2 * k_squared - 1j * phase)
            case ProfileKind.BUMP:
                k = np.sqrt(k_squared)
                unique, inverse = np.unique(k, return_inverse=True)
                values = np.zeros_like(unique)
                positive = unique > 0.0
                values[positive] = self.b0 * (_bump_transform(unique[positive], self.radius, self.dim) - 1.0)
                return values[inverse].reshape(k.shape)

    def satisfies_main_hypotheses(self) -> bool:
        """Smooth, even and nonnegative; the delta and shifted profiles are diagnostic extensions"""
        return self.kind in (ProfileKind.GAUSSIAN, ProfileKind.BUMP) and self.even and self.nonnegative


def profile_from_name(name: str, b0: float = 1.0, dim: int = 1, **parameters) -> PotentialProfile:
    """Builds a profile from its config name and parameters

    Raises:
        PotentialException: If the name or a parameter is invalid
    """
    try:
        return PotentialProfile(name, b0=b0, dim=dim, **parameters)
    except (ValueError, TypeError) as exc:
        raise PotentialException(f"Invalid profile {name!r}: {exc}") from exc


@define(frozen=True, slots=True, weakref_slot=False)
class ScaledDeviationMultiplier(BaseInterface):
    """The multiplier W_N_hat(xi) = V_hat(xi N^(-beta)) - b0 of the contracted profile

    Args:
        profile (PotentialProfile): The unscaled profile
        N (int): The particle number
        beta (float): The contraction exponent in (0, 1)
    """
    profile: PotentialProfile = field(
        validator=validators.instance_of(PotentialProfile))

    N: int = field(
        validator=[validators.instance_of(int), validators.ge(1)])

    beta: float = field(
        converter=float,
        validator=validate_open_unit_interval)

    @property
    def scale(self) -> float:
        """N^(-beta)"""
        return float(self.N) ** (-self.beta)

    def _scaled_mesh(self, grid: GridSpec) -> tuple[np.ndarray, ...]:
        if grid.dim != self.profile.dim:
            raise GridException(f"Profile of dimension {self.profile.dim} applied on a {grid.dim}D grid")
        return tuple(axis * self.scale for axis in grid.wavenumber_mesh())

    def deviation(self, grid: GridSpec) -> np.ndarray:
        """W_N_hat at every mode, exactly 0 at the zero mode"""
        values = np.array(np.broadcast_to(self.profile.deviation(self._scaled_mesh(grid)), grid.shape))
        values[(0,) * grid.dim] = 0.0
        return values

    def scaled(self, grid: GridSpec) -> np.ndarray:
        """V_N_hat(xi) = V_hat(xi N^(-beta)) at every mode"""
        return self.profile.b0 + self.deviation(grid)

    def bound(self, grid: GridSpec) -> np.ndarray:
        """min(2 b0, N^(-beta) |xi| ||xV||_{L^1})"""
        return np.minimum(2.0 * self.profile.b0, self.scale * grid.k_magnitude() * self.profile.first_moment)


def convolve_scaled(f: SpectralField, profile: PotentialProfile, N: int, beta: float) -> SpectralField:
    """V_N * f

    Examples:
        >>> convolve_scaled(constant, gaussian, 64, 0.25)  # b0 * constant
    """
    multiplier = ScaledDeviationMultiplier(profile, N, beta)
    if profile.kind is ProfileKind.DELTA:
        return f * profile.b0
    return apply_multiplier(f, multiplier.scaled(f.grid))


def convolve_deviation(f: SpectralField, profile: PotentialProfile, N: int, beta: float) -> SpectralField:
    """W_N * f, with the zero mode of the output exactly 0"""
    return apply_multiplier(f, ScaledDeviationMultiplier(profile, N, beta).deviation(f.grid))


def measure_convolution_rate(profile: PotentialProfile,
                             f: SpectralField,
                             s: float,
                             N_list: Iterable[int],
                             beta: float,
                             p: int = 2) -> RateFit:
    """Fits the decay of ||W_N * f||_{L^2} / ||D^s f||_{L^2} in N

    Args:
        profile (PotentialProfile): The profile
        f (SpectralField): The test field
        s (float): Derivative order in [0, 1]
        N_list (Iterable[int]): At least four dyadic N
        beta (float): The contraction exponent
        p (int): The Lebesgue exponent; only 2 is supported

    Returns:
        RateFit: The per-N ratios and their log-log slope

    Raises:
        PotentialException: For p != 2, s outside [0, 1], non-dyadic N or a field with ||D^s f|| = 0
        FitException: With fewer than four N
    """
    if p != 2:
        raise PotentialException(f"Only L^2 rates are measured, got p={p}")
    if not 0.0 <= s <= 1.0:
        raise PotentialException(f"s must lie in [0, 1], got {s}")
    N_list = list(N_list)
    if not is_dyadic_sequence(N_list):
        raise PotentialException(f"N_list must be increasing powers of two, got {N_list}")
    denominator = homogeneous_norm(f, s)
    if denominator == 0.0:
        raise PotentialException("The test field has ||D^s f|| = 0")
    samples = [(N, convolve_deviation(f, profile, N, beta).l2_norm() / denominator) for N in N_list]
    logger.debug("Convolution rate samples for %s: %s", profile.name, samples)
    return fit_rate(samples)


def bilinear_pairing_bound_check(f1: SpectralField, f2: SpectralField, profile: PotentialProfile, N: int, beta: float) -> BoundReport:
    """Checks |int (W_N * f1) f2| <= ||xV||_{L^1} N^(-beta) ||D^(1/2) f1|| ||D^(1/2) f2||

    The left side is the Plancherel sum over xi of W_N_hat(xi) f1_hat(xi) f2_hat(-xi).

    Raises:
        GridException: If the fields live on different grids
    """
    if f1.grid != f2.grid:
        raise GridException(f"Fields live on different grids: {f1.grid} and {f2.grid}")
    grid = f1.grid
    multiplier = ScaledDeviationMultiplier(profile, N, beta)
    reflected = f2.coefficients[np.ix_(*((-np.arange(n)) % n for n in grid.modes))]
    lhs = abs(np.sum(multiplier.deviation(grid) * f1.coefficients * reflected))
    rhs = profile.first_moment * multiplier.scale * homogeneous_norm(f1, 0.5) * homogeneous_norm(f2, 0.5)
    return BoundReport.compare(lhs, rhs, N=N, beta=beta, profile=profile.name)


def multiplier_bound_check(profile: PotentialProfile, N: int, beta: float, grid: GridSpec) -> BoundReport:
    """Checks |W_N_hat(xi)| <= min(2 b0, N^(-beta) |xi| ||xV||_{L^1}) at every mode

    The report holds the worst ratio of the two sides as lhs against rhs = 1.
    """
    multiplier = ScaledDeviationMultiplier(profile, N, beta)
    magnitude = np.abs(multiplier.deviation(grid))
    bound = multiplier.bound(grid)
    ratios = np.divide(magnitude, bound, out=np.zeros_like(magnitude), where=bound > 0.0)
    if np.any((bound == 0.0) & (magnitude > 0.0)):
        ratios = np.where((bound == 0.0) & (magnitude > 0.0), np.inf, ratios)
    return BoundReport.compare(float(np.max(ratios)), 1.0, N=N, beta=beta, profile=profile.name)
