"""Spectral fields and the transforms, multipliers and products acting on them.

Coefficients are stored in transform order and scaled by sqrt(volume)/n_total, so that the
discrete Parseval identity  sum_j |f(x_j)|^2 * cell_volume == sum_xi |f_hat(xi)|^2  is exact.
A constant c on a unit-volume box has the single coefficient c at the zero mode.
"""
import logging
from math import sqrt
from typing import Callable, Union

import numpy as np
import scipy.fft
from attrs import define, field, validators

from ..base.interface import BaseInterface
from ..base.exceptions import GridException
from ..utils.converters import convert_to_complex_array
from .spec import GridSpec


logger = logging.getLogger(__name__)

__FFT_WORKERS__ = {"workers": 1}

Multiplier = Union[Callable[[tuple[np.ndarray, ...]], np.ndarray], np.ndarray, complex, float]


def set_fft_workers(workers: int) -> None:
    """Sets the thread count used by every transform (results do not depend on it)"""
    if workers == 0 or workers < -1:
        raise ValueError(f"workers must be -1 or a positive integer, got {workers}")
    __FFT_WORKERS__["workers"] = workers


def fft_workers() -> int:
    return __FFT_WORKERS__["workers"]


@define(frozen=True, slots=True, weakref_slot=False)
class SpectralField(BaseInterface):
    """A complex field on a periodic box, held by its Parseval-normalised coefficients

    Args:
        grid (GridSpec): The grid the field lives on
        coefficients (np.ndarray): Coefficients in transform order, copied read-only

    Raises:
        GridException: If the coefficient shape does not match the grid
    """
    grid: GridSpec = field(
        validator=validators.instance_of(GridSpec))

    coefficients: np.ndarray = field(
        converter=convert_to_complex_array,
        eq=False)

    def __attrs_post_init__(self):
        if self.coefficients.shape != self.grid.shape:
            raise GridException(f"Coefficient shape {self.coefficients.shape} does not match grid shape {self.grid.shape}")

    @property
    def values(self) -> np.ndarray:
        """Physical-space samples"""
        return transform_inverse(self)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))

    def inner(self, other: 'SpectralField') -> complex:
        """The L^2 inner product <self, other>, conjugate-linear in self"""
        _check_same_grid(self, other)
        return complex(np.vdot(self.coefficients, other.coefficients))

    def with_coefficients(self, coefficients: np.ndarray) -> 'SpectralField':
        return SpectralField(self.grid, coefficients)

    def on_grid(self, grid: GridSpec) -> 'SpectralField':
        """The same coefficients on a grid differing only in its dealias flag"""
        if grid.extents != self.grid.extents or grid.modes != self.grid.modes:
            raise GridException(f"Cannot move a field from {self.grid} to {grid}")
        return SpectralField(grid, self.coefficients)

    def equals(self, other: 'SpectralField', tolerance: float = 0.0) -> bool:
        """Coefficient-wise comparison, exact when tolerance is 0"""
        if self.grid != other.grid:
            return False
        if tolerance == 0.0:
            return bool(np.array_equal(self.coefficients, other.coefficients))
        return bool(np.max(np.abs(self.coefficients - other.coefficients), initial=0.0) <= tolerance)

    def __add__(self, other: 'SpectralField') -> 'SpectralField':
        _check_same_grid(self, other)
        return self.with_coefficients(self.coefficients + other.coefficients)

    def __sub__(self, other: 'SpectralField') -> 'SpectralField':
        _check_same_grid(self, other)
        return self.with_coefficients(self.coefficients - other.coefficients)

    def __mul__(self, scalar: complex) -> 'SpectralField':
        return self.with_coefficients(self.coefficients * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> 'SpectralField':
        return self.with_coefficients(-self.coefficients)


def _check_same_grid(a: SpectralField, b: SpectralField) -> None:
    if a.grid != b.grid:
        raise GridException(f"Fields live on different grids: {a.grid} and {b.grid}")


def forward_coefficients(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Raw forward transform of physical samples (no shape checks)"""
    return scipy.fft.fftn(values, norm="forward", workers=fft_workers()) * sqrt(grid.volume)


def inverse_values(coefficients: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Raw inverse transform of coefficients (no shape checks)"""
    return scipy.fft.ifftn(coefficients, norm="forward", workers=fft_workers()) / sqrt(grid.volume)


def transform_forward(values: np.ndarray, grid: GridSpec) -> SpectralField:
    """Transforms physical samples into a SpectralField

    Args:
        values (np.ndarray): Samples at the grid points
        grid (GridSpec): The grid

    Returns:
        SpectralField: The Parseval-normalised field

    Raises:
        GridException: If the sample array does not match the grid
    """
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise GridException(f"Sample shape {values.shape} does not match grid shape {grid.shape}")
    return SpectralField(grid, forward_coefficients(values.astype(np.complex128), grid))


def transform_inverse(field_: SpectralField) -> np.ndarray:
    """Physical samples of a SpectralField"""
    return inverse_values(field_.coefficients, field_.grid)


def evaluate_multiplier(grid: GridSpec, m: Multiplier) -> np.ndarray:
    """Evaluates a multiplier at every representable wavenumber

    Args:
        grid (GridSpec): The grid
        m (Multiplier): A callable taking the per-axis wavenumber arrays, an array, or a scalar

    Returns:
        np.ndarray: The multiplier, broadcast to the grid shape

    Raises:
        GridException: If any value is non-finite
    """
    values = m(grid.wavenumber_mesh()) if callable(m) else m
    values = np.broadcast_to(np.asarray(values), grid.shape)
    if not np.all(np.isfinite(values)):
        raise GridException("Multiplier is not finite at every representable wavenumber")
    return values


def apply_multiplier(field_: SpectralField, m: Multiplier) -> SpectralField:
    """Multiplies every coefficient by m(xi)

    Args:
        field_ (SpectralField): The field
        m (Multiplier): The multiplier

    Returns:
        SpectralField: A new field on the same grid
    """
    return field_.with_coefficients(field_.coefficients * evaluate_multiplier(field_.grid, m))


def dealias(coefficients: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Zeroes the modes removed by the 2/3 rule"""
    return np.where(grid.dealias_mask(), coefficients, 0.0)


def pointwise_product(a: SpectralField, b: SpectralField) -> SpectralField:
    """The physical-space product a*b, dealiased when the grid asks for it

    Raises:
        GridException: If the fields live on different grids
    """
    _check_same_grid(a, b)
    grid = a.grid
    coefficients = forward_coefficients(inverse_values(a.coefficients, grid) * inverse_values(b.coefficients, grid), grid)
    if grid.dealias:
        coefficients = dealias(coefficients, grid)
    return SpectralField(grid, coefficients)


def conjugate(field_: SpectralField) -> SpectralField:
    """The complex conjugate in physical space"""
    return transform_forward(np.conj(field_.values), field_.grid)


def zeros(grid: GridSpec) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.shape, dtype=np.complex128))


def plane_wave(grid: GridSpec, mode: tuple[int, ...], amplitude: complex = 1.0) -> SpectralField:
    """The field amplitude * exp(i k.x) for the integer mode multi-index `mode`

    The stored coefficient is amplitude * sqrt(volume); on a unit-volume box it equals the amplitude.
    """
    coefficients = np.zeros(grid.shape, dtype=np.complex128)
    coefficients[grid.index_of(mode)] = amplitude * sqrt(grid.volume)
    return SpectralField(grid, coefficients)


def random_field(grid: GridSpec, rng: np.random.Generator, decay: float = 0.0) -> SpectralField:
    """A field with complex Gaussian coefficients damped by <xi>^(-decay)"""
    noise = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return SpectralField(grid, noise * (1.0 + grid.k_squared()) ** (-decay / 2))
