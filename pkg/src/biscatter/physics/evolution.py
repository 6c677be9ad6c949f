"""Strang split-step integration of the cubic NLS and the Hartree NLS

    i d/dt phi = -Lap phi + b0 |phi|^2 phi            (cubic)
    i d/dt phi = -Lap phi + (V_N * |phi|^2) phi       (Hartree)

The kinetic substep is exact in Fourier space. The nonlinear substep is the exact phase rotation
phi <- phi * exp(-i U dt): U depends on |phi|^2 only, which the substep leaves pointwise unchanged.
"""
import logging
import math
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from attrs import define, field, validators

from ..base.interface import BaseInterface
from ..base.types import EquationKind, ProfileKind, enum_from_alias
from ..base.exceptions import EvolutionException, BlowupException, GridException
from ..grid.spec import GridSpec
from ..grid.field import SpectralField, forward_coefficients, inverse_values, dealias
from ..grid.codec import write_fields
from ..utils.validators import validate_positive, validate_nonnegative
from .potential import PotentialProfile, ScaledDeviationMultiplier
from .norms import sobolev_norm


logger = logging.getLogger(__name__)

__BLOWUP_FACTOR__ = 1e6
__DIVISIBILITY_TOLERANCE__ = 1e-12

Potential = Callable[[np.ndarray], np.ndarray]


@define(frozen=True, slots=True, weakref_slot=False)
class EvolutionSpec(BaseInterface):
    """Everything a solve needs besides the initial datum

    Args:
        equation (EquationKind): cubic-NLS or hartree-NLS
        grid (GridSpec): The grid
        dt (float): The time step
        T (float): The final time
        stride (int): Steps between snapshots; the final time is always sampled
        b0 (float): The cubic coupling; Hartree runs take b0 from the profile
        profile (PotentialProfile | None): The Hartree profile
        N (int | None): The Hartree particle number
        beta (float | None): The Hartree contraction exponent

    Raises:
        EvolutionException: If dt exceeds a positive T or the Hartree parameters are missing
    """
    equation: EquationKind = field(
        converter=lambda value: enum_from_alias(EquationKind, value),
        validator=validators.instance_of(EquationKind))

    grid: GridSpec = field(
        validator=validators.instance_of(GridSpec))

    dt: float = field(
        converter=float,
        validator=validate_positive)

    T: float = field(
        converter=float,
        validator=validate_nonnegative)

    stride: int = field(
        default=1,
        validator=[validators.instance_of(int), validators.ge(1)])

    b0: float = field(
        default=1.0,
        converter=float,
        validator=validate_positive)

    profile: Optional[PotentialProfile] = field(
        default=None,
        validator=validators.optional(validators.instance_of(PotentialProfile)))

    N: Optional[int] = field(
        default=None,
        validator=validators.optional([validators.instance_of(int), validators.ge(1)]))

    beta: Optional[float] = field(
        default=None,
        validator=validators.optional(validators.instance_of(float)))

    def __attrs_post_init__(self):
        if self.T > 0.0 and self.dt > self.T:
            raise EvolutionException(f"dt={self.dt} exceeds T={self.T}")
        if self.equation is EquationKind.HARTREE:
            if self.profile is None or self.N is None or self.beta is None:
                raise EvolutionException("Hartree runs need a profile, N and beta")
            if not 0.0 < self.beta < 1.0:
                raise EvolutionException(f"beta must lie in (0, 1), got {self.beta}")

    @property
    def coupling(self) -> float:
        return self.profile.b0 if self.equation is EquationKind.HARTREE else self.b0

    def with_dt(self, dt: float) -> 'EvolutionSpec':
        return EvolutionSpec(self.equation, self.grid, dt, self.T, self.stride, self.b0, self.profile, self.N, self.beta)

    def with_grid(self, grid: GridSpec) -> 'EvolutionSpec':
        return EvolutionSpec(self.equation, grid, self.dt, self.T, self.stride, self.b0, self.profile, self.N, self.beta)


def _density(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    rho = np.abs(values) ** 2
    if grid.dealias:
        rho = inverse_values(dealias(forward_coefficients(rho, grid), grid), grid).real
    return rho


def cubic_potential(grid: GridSpec, b0: float) -> Potential:
    """U = b0 |phi|^2"""
    return lambda values: b0 * _density(values, grid)


def hartree_potential(grid: GridSpec, profile: PotentialProfile, N: int, beta: float) -> Potential:
    """U = V_N * |phi|^2; the delta profile skips the transforms"""
    if profile.kind is ProfileKind.DELTA:
        ScaledDeviationMultiplier(profile, N, beta)  # validates N and beta
        return cubic_potential(grid, profile.b0)
    multiplier = ScaledDeviationMultiplier(profile, N, beta).scaled(grid)

    def potential(values: np.ndarray) -> np.ndarray:
        rho_hat = forward_coefficients(_density(values, grid), grid)
        return inverse_values(rho_hat * multiplier, grid).real

    return potential


def potential_for(spec: EvolutionSpec) -> Potential:
    if spec.equation is EquationKind.HARTREE:
        return hartree_potential(spec.grid, spec.profile, spec.N, spec.beta)
    return cubic_potential(spec.grid, spec.b0)


class SplitStepIntegrator:
    """Strang composition half-kinetic, nonlinear, half-kinetic on raw coefficient arrays"""

    def __init__(self, grid: GridSpec, potential: Potential):
        self.grid = grid
        self.potential = potential
        self._half_kinetic: dict[float, np.ndarray] = {}
        self.peak = 0.0

    def half_kinetic(self, dt: float) -> np.ndarray:
        if dt not in self._half_kinetic:
            self._half_kinetic[dt] = np.exp(-0.5j * dt * self.grid.k_squared())
        return self._half_kinetic[dt]

    def step(self, coefficients: np.ndarray, dt: float) -> np.ndarray:
        half = self.half_kinetic(dt)
        values = inverse_values(coefficients * half, self.grid)
        values = values * np.exp(-1j * dt * self.potential(values))
        self.peak = float(np.max(np.abs(values), initial=0.0))
        return forward_coefficients(values, self.grid) * half


def step_cubic(state: SpectralField, dt: float, b0: float) -> SpectralField:
    """One Strang step of the cubic NLS"""
    integrator = SplitStepIntegrator(state.grid, cubic_potential(state.grid, b0))
    return state.with_coefficients(integrator.step(state.coefficients, dt))


def step_hartree(state: SpectralField, dt: float, profile: PotentialProfile, N: int, beta: float) -> SpectralField:
    """One Strang step of the Hartree NLS"""
    integrator = SplitStepIntegrator(state.grid, hartree_potential(state.grid, profile, N, beta))
    return state.with_coefficients(integrator.step(state.coefficients, dt))


def energy(state: SpectralField, spec: EvolutionSpec) -> float:
    """sum |xi|^2 |phi_hat|^2 + (1/2) int U |phi|^2, with U the nonlinear potential of the flow"""
    if state.grid.modes != spec.grid.modes or state.grid.extents != spec.grid.extents:
        raise GridException(f"State grid {state.grid} does not match run grid {spec.grid}")
    kinetic = float(np.sum(spec.grid.k_squared() * np.abs(state.coefficients) ** 2))
    values = inverse_values(state.coefficients, spec.grid)
    interaction = 0.5 * float(np.sum(potential_for(spec)(values) * np.abs(values) ** 2)) * spec.grid.cell_volume
    return kinetic + interaction


def _schedule(T: float, dt: float) -> list[float]:
    """Step sizes covering [0, T], with a final partial step when dt does not divide T"""
    if T == 0.0:
        return []
    ratio = T / dt
    whole = round(ratio)
    if abs(ratio - whole) <= __DIVISIBILITY_TOLERANCE__ * max(1.0, ratio):
        return [dt] * int(whole)
    whole = math.floor(ratio)
    remainder = T - whole * dt
    logger.debug("dt=%g does not divide T=%g, final partial step %.3g", dt, T, remainder)
    return [dt] * whole + [remainder]


@define(frozen=True, slots=True, weakref_slot=False)
class EvolutionRun(BaseInterface):
    """A time-stamped trajectory with conservation diagnostics

    Args:
        spec (EvolutionSpec): The run parameters
        snapshots (tuple[tuple[float, SpectralField], ...]): (t, phi(t)) pairs
        masses (tuple[float, ...]): int |phi|^2 per snapshot
        energies (tuple[float, ...]): The energy per snapshot
        h1_norms (tuple[float, ...]): ||phi||_{H^1} per snapshot
    """
    spec: EvolutionSpec = field(
        validator=validators.instance_of(EvolutionSpec))

    snapshots: tuple[tuple[float, SpectralField], ...] = field(
        converter=tuple,
        eq=False)

    masses: tuple[float, ...] = field(
        converter=tuple)

    energies: tuple[float, ...] = field(
        converter=tuple)

    h1_norms: tuple[float, ...] = field(
        converter=tuple)

    @property
    def dt(self) -> float:
        return self.spec.dt

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.snapshots)

    @property
    def initial(self) -> SpectralField:
        return self.snapshots[0][1]

    @property
    def final(self) -> SpectralField:
        return self.snapshots[-1][1]

    @property
    def mass_drift(self) -> float:
        """max_t |M(t) - M(0)| / M(0), zero for the zero field"""
        return _relative_drift(self.masses)

    @property
    def energy_drift(self) -> float:
        return _relative_drift(self.energies)

    @property
    def initial_energy_norm(self) -> float:
        """E0 = ||phi_0||_{H^1}"""
        return self.h1_norms[0]

    def diagnostic_rows(self) -> list[dict]:
        return [
            {"t": t, "mass": mass, "energy": value, "h1norm": h1}
            for t, mass, value, h1 in zip(self.times, self.masses, self.energies, self.h1_norms)]


def _relative_drift(series: tuple[float, ...]) -> float:
    if len(series) == 0 or series[0] == 0.0:
        return 0.0 if all(value == 0.0 for value in series) else math.inf
    return max(abs(value - series[0]) for value in series) / abs(series[0])


def solve(spec: EvolutionSpec, initial: SpectralField) -> EvolutionRun:
    """Integrates from t=0 to t=T

    Args:
        spec (EvolutionSpec): The run parameters
        initial (SpectralField): The datum on spec.grid

    Returns:
        EvolutionRun: Snapshots at every stride-th step and at T

    Raises:
        GridException: If the datum lives on another grid
        BlowupException: If the state becomes non-finite or max|phi| exceeds 1e6 times its initial value
    """
    if initial.grid.modes != spec.grid.modes or initial.grid.extents != spec.grid.extents:
        raise GridException(f"Initial datum grid {initial.grid} does not match run grid {spec.grid}")
    initial = initial.on_grid(spec.grid)
    integrator = SplitStepIntegrator(spec.grid, potential_for(spec))
    schedule = _schedule(spec.T, spec.dt)
    limit = __BLOWUP_FACTOR__ * float(np.max(np.abs(initial.values), initial=0.0))
    report_every = max(1, len(schedule) // 10)

    logger.info("Solving %s on %s to T=%g with dt=%g (%d steps)", spec.equation.value, spec.grid.modes, spec.T, spec.dt, len(schedule))
    snapshots = [(0.0, initial)]
    coefficients = initial.coefficients
    for step, dt in enumerate(schedule, start=1):
        coefficients = integrator.step(coefficients, dt)
        t = spec.T if step == len(schedule) else step * spec.dt
        if not math.isfinite(integrator.peak) or integrator.peak > limit:
            raise BlowupException(f"Blow-up guard tripped at t={t:.6g} (step {step}): max|phi|={integrator.peak:.3g}", t, step, integrator.peak)
        if step % spec.stride == 0 or step == len(schedule):
            snapshots.append((t, SpectralField(spec.grid, coefficients)))
        if step % report_every == 0:
            logger.debug("%s step %d/%d", spec.equation.value, step, len(schedule))

    masses = tuple(phi.l2_norm() ** 2 for _, phi in snapshots)
    energies = tuple(energy(phi, spec) for _, phi in snapshots)
    h1_norms = tuple(sobolev_norm(phi, 1.0) for _, phi in snapshots)
    run = EvolutionRun(spec, tuple(snapshots), masses, energies, h1_norms)
    logger.info("Finished %s: mass drift %.2e, energy drift %.2e", spec.equation.value, run.mass_drift, run.energy_drift)
    return run


def free_pullback(phi: SpectralField, t: float) -> SpectralField:
    """e^(-itLap) phi, the profile seen by the free flow"""
    return phi.with_coefficients(phi.coefficients * np.exp(1j * t * phi.grid.k_squared()))


def scattering_defect(run: EvolutionRun) -> float:
    """||e^(-i t_b Lap) phi(t_b) - e^(-i t_a Lap) phi(t_a)||_{H^1} over the last two snapshots"""
    if len(run.snapshots) < 2:
        return 0.0
    (t_a, phi_a), (t_b, phi_b) = run.snapshots[-2], run.snapshots[-1]
    return sobolev_norm(free_pullback(phi_b, t_b) - free_pullback(phi_a, t_a), 1.0)


def write_snapshots(run: EvolutionRun, path: str | Path) -> Path:
    """Writes every snapshot in the flat binary layout, in time order"""
    path = Path(path)
    write_fields((phi for _, phi in run.snapshots), path)
    logger.debug("Wrote %d snapshots to %s", len(run.snapshots), path)
    return path
