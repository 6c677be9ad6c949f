from functools import lru_cache
from math import pi, prod
from typing import Optional

import numpy as np
from attrs import define, field, validators

from ..base.interface import BaseInterface
from ..base.exceptions import GridException
from ..utils.converters import convert_to_float_tuple, convert_to_int_tuple
from ..utils.validators import validate_positive_tuple, validate_even_tuple


__SUPPORTED_DIMS__ = (1, 2, 3)


@define(frozen=True, slots=True, weakref_slot=False)
class GridSpec(BaseInterface):
    """A periodic box discretised by a tensor grid of Fourier modes

    Axis a has side length L_a and n_a modes; the representable wavenumbers are
    2*pi*m/L_a for m = -n_a/2 ... n_a/2 - 1.  Axes may differ in both n_a and L_a.

    Args:
        extents (tuple[float, ...]): The box side lengths L_a
        modes (tuple[int, ...]): The even mode counts n_a
        dealias (bool): Whether pointwise products apply the 2/3 rule

    Examples:
        >>> grid = GridSpec((16 * pi,), (256,))
        >>> grid.spacing(0)
        0.125
    """
    extents: tuple[float, ...] = field(
        converter=convert_to_float_tuple,
        validator=validate_positive_tuple)

    modes: tuple[int, ...] = field(
        converter=convert_to_int_tuple,
        validator=validate_even_tuple)

    dealias: bool = field(
        default=False,
        validator=validators.instance_of(bool))

    def __attrs_post_init__(self):
        if len(self.extents) != len(self.modes):
            raise GridException(f"Got {len(self.extents)} extents but {len(self.modes)} mode counts")
        if len(self.modes) not in __SUPPORTED_DIMS__:
            raise GridException(f"Grid dimension must be one of {__SUPPORTED_DIMS__}, got {len(self.modes)}")

    @classmethod
    def cube(cls, dim: int, extent: float, modes: int, dealias: bool = False) -> 'GridSpec':
        """Builds an isotropic grid"""
        return cls((extent,) * dim, (modes,) * dim, dealias)

    @property
    def dim(self) -> int:
        return len(self.modes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.modes

    @property
    def mode_count(self) -> int:
        return prod(self.modes)

    @property
    def volume(self) -> float:
        return prod(self.extents)

    @property
    def cell_volume(self) -> float:
        return self.volume / self.mode_count

    def spacing(self, axis: int) -> float:
        """The wavenumber spacing 2*pi/L_a of an axis"""
        return 2.0 * pi / self.extents[axis]

    def nyquist(self, axis: int) -> float:
        """The largest representable |wavenumber| on an axis, pi*n_a/L_a"""
        return self.spacing(axis) * self.modes[axis] / 2

    @property
    def min_nyquist(self) -> float:
        return min(self.nyquist(axis) for axis in range(self.dim))

    def mode_indices(self, axis: int) -> np.ndarray:
        """The integer mode indices m of an axis, in transform order"""
        return _mode_indices(self.modes[axis])

    def wavenumbers(self, axis: int) -> np.ndarray:
        """The wavenumbers 2*pi*m/L_a of an axis, in transform order"""
        return self.mode_indices(axis) * self.spacing(axis)

    def wavenumber_mesh(self) -> tuple[np.ndarray, ...]:
        """Broadcastable (sparse) wavenumber arrays, one per axis"""
        return _wavenumber_mesh(self)

    def k_squared(self) -> np.ndarray:
        """|xi|^2 at every mode"""
        return _k_squared(self)

    def k_magnitude(self) -> np.ndarray:
        """|xi| at every mode"""
        return _k_magnitude(self)

    def dealias_mask(self) -> np.ndarray:
        """True where |m_a| <= n_a/3 on every axis"""
        return _dealias_mask(self)

    def coordinates(self, axis: int) -> np.ndarray:
        """Physical sample positions j*L_a/n_a of an axis"""
        return np.arange(self.modes[axis]) * (self.extents[axis] / self.modes[axis])

    def physical_mesh(self) -> tuple[np.ndarray, ...]:
        """Broadcastable (sparse) physical coordinate arrays"""
        return tuple(np.meshgrid(*(self.coordinates(axis) for axis in range(self.dim)), indexing="ij", sparse=True))

    def index_of(self, mode: tuple[int, ...]) -> tuple[int, ...]:
        """The array index of an integer mode multi-index

        Raises:
            GridException: If the mode is not representable
        """
        if len(mode) != self.dim:
            raise GridException(f"Mode {mode} does not match grid dimension {self.dim}")
        index = []
        for axis, m in enumerate(mode):
            n = self.modes[axis]
            if not -n // 2 <= m <= n // 2 - 1:
                raise GridException(f"Mode {m} is not representable on axis {axis} with {n} modes")
            index.append(m % n)
        return tuple(index)

    def with_dealias(self, dealias: bool) -> 'GridSpec':
        return GridSpec(self.extents, self.modes, dealias)

    def refined(self, factor: int = 2, extent_factor: Optional[float] = None) -> 'GridSpec':
        """A grid with `factor` times the modes and `extent_factor` times the box on every axis"""
        extent_factor = factor if extent_factor is None else extent_factor
        return GridSpec(tuple(L * extent_factor for L in self.extents), tuple(n * factor for n in self.modes), self.dealias)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@lru_cache(maxsize=64)
def _mode_indices(n: int) -> np.ndarray:
    return _frozen(np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64))


@lru_cache(maxsize=32)
def _wavenumber_mesh(grid: GridSpec) -> tuple[np.ndarray, ...]:
    axes = [grid.wavenumbers(axis) for axis in range(grid.dim)]
    return tuple(_frozen(mesh) for mesh in np.meshgrid(*axes, indexing="ij", sparse=True))


@lru_cache(maxsize=32)
def _k_squared(grid: GridSpec) -> np.ndarray:
    total = np.zeros(grid.shape)
    for mesh in grid.wavenumber_mesh():
        total = total + mesh ** 2
    return _frozen(total)


@lru_cache(maxsize=32)
def _k_magnitude(grid: GridSpec) -> np.ndarray:
    return _frozen(np.sqrt(grid.k_squared()))


@lru_cache(maxsize=32)
def _dealias_mask(grid: GridSpec) -> np.ndarray:
    mask = np.ones(grid.shape, dtype=bool)
    for axis in range(grid.dim):
        keep = np.abs(grid.mode_indices(axis)) <= grid.modes[axis] / 3
        shape = [1] * grid.dim
        shape[axis] = grid.modes[axis]
        mask = mask & keep.reshape(shape)
    return _frozen(mask)
