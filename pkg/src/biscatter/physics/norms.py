import logging
from typing import Any, Protocol, Sequence

import numpy as np
from attrs import define, field, validators, Factory
from scipy.integrate import trapezoid

from ..base.interface import BaseInterface
from ..base.types import NormKind
from ..base.exceptions import GridException, EvolutionException
from ..grid.field import SpectralField, inverse_values


logger = logging.getLogger(__name__)


class Trajectory(Protocol):
    """Anything holding time-stamped snapshots and a time step"""
    snapshots: Sequence[tuple[float, SpectralField]]

    @property
    def dt(self) -> float: ...


@define(frozen=True, slots=True, weakref_slot=False)
class NormReport(BaseInterface):
    """A reported norm value

    Args:
        kind (NormKind): Which norm
        value (float): The nonnegative value
        parameters (dict): s, time window and similar parameters
    """
    kind: NormKind = field(
        validator=validators.instance_of(NormKind))

    value: float = field(
        converter=float)

    parameters: dict = field(
        default=Factory(dict),
        validator=validators.instance_of(dict))

    @value.validator
    def _check_value(self, attribute, value):
        if not value >= 0.0:
            raise ValueError(f"Norm values are nonnegative, got {value}")


def bessel_weight(f: SpectralField, s: float) -> np.ndarray:
    """(1 + |xi|^2)^(s/2) on the grid of f"""
    return (1.0 + f.grid.k_squared()) ** (s / 2.0)


def riesz_weight(f: SpectralField, s: float) -> np.ndarray:
    """|xi|^s on the grid of f, zero at the zero mode"""
    magnitude = f.grid.k_magnitude()
    weight = np.zeros_like(magnitude)
    nonzero = magnitude > 0.0
    weight[nonzero] = magnitude[nonzero] ** s
    return weight


def sobolev_norm(f: SpectralField, s: float) -> float:
    """||f||_{H^s} = (sum_xi (1+|xi|^2)^s |f_hat|^2)^(1/2)

    Examples:
        >>> sobolev_norm(plane_wave(unit_grid, (0,)), 3.0)
        1.0
    """
    return float(np.sqrt(np.sum((1.0 + f.grid.k_squared()) ** s * np.abs(f.coefficients) ** 2)))


def homogeneous_norm(f: SpectralField, s: float) -> float:
    """||D^s f||_{L^2} with weight |xi|^s; the zero mode contributes nothing"""
    return float(np.sqrt(np.sum((riesz_weight(f, s) * np.abs(f.coefficients)) ** 2)))


def sobolev_inner(f: SpectralField, g: SpectralField, s: float) -> complex:
    """<<grad>^s f, <grad>^s g>, conjugate-linear in f"""
    if f.grid != g.grid:
        raise GridException(f"Fields live on different grids: {f.grid} and {g.grid}")
    weight = (1.0 + f.grid.k_squared()) ** s
    return complex(np.sum(weight * np.conj(f.coefficients) * g.coefficients))


def lp_norm(f: SpectralField, p: float) -> float:
    """Grid L^p norm with volume weights"""
    values = inverse_values(f.coefficients, f.grid)
    return float((np.sum(np.abs(values) ** p) * f.grid.cell_volume) ** (1.0 / p))


def h1_difference(a: SpectralField, b: SpectralField) -> float:
    """||a - b||_{H^1}"""
    return sobolev_norm(a - b, 1.0)


def trajectory_sup_h1_diff(run_a: Trajectory, run_b: Trajectory) -> float:
    """sup over shared snapshots of ||phi_A(t) - phi_B(t)||_{H^1}

    Raises:
        EvolutionException: If the snapshot times differ
    """
    times_a = [t for t, _ in run_a.snapshots]
    times_b = [t for t, _ in run_b.snapshots]
    if len(times_a) != len(times_b) or not np.allclose(times_a, times_b, rtol=0.0, atol=1e-12):
        raise EvolutionException("Runs have mismatched snapshot times")
    return max((h1_difference(a, b) for (_, a), (_, b) in zip(run_a.snapshots, run_b.snapshots)), default=0.0)


def strichartz_diagnostic(run: Trajectory) -> float:
    """Discrete ||<grad> phi||_{L^2_t L^6_x}

    A single snapshot is weighted by the run's time step.
    """
    if len(run.snapshots) == 0:
        return 0.0
    times = np.array([t for t, _ in run.snapshots])
    sixth = np.array([lp_norm(phi.with_coefficients(phi.coefficients * bessel_weight(phi, 1.0)), 6.0) for _, phi in run.snapshots])
    if len(times) == 1:
        return float(np.sqrt(run.dt * sixth[0] ** 2))
    return float(np.sqrt(trapezoid(sixth ** 2, times)))


def norm_report(kind: NormKind, value: float, **parameters: Any) -> NormReport:
    return NormReport(kind, value, dict(parameters))
