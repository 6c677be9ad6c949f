"""Norm algebra for factorized marginal hierarchies gamma^(k) = |phi><phi|^(tensor k).

Every level quantity reduces to one-particle inner products: the kernel of S^(alpha,k) gamma^(k)
is a tensor product, so its L^2 norm is ||phi||_{H^alpha}^(2k) and the difference of two such
kernels has squared norm a^(2k) + b^(2k) - 2|c|^(2k) with a, b the squared norms and c the inner
product of the two states.
"""
import logging
import math
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.fft
from attrs import define, field, validators

from ..base.interface import BaseInterface
from ..base.report import BoundReport
from ..base.exceptions import (
    GridException,
    EvolutionException,
    HierarchyConvergenceException,
    HypothesisViolationException,
)
from ..grid.spec import GridSpec
from ..grid.field import SpectralField, transform_inverse
from ..physics.norms import sobolev_norm, h1_difference


logger = logging.getLogger(__name__)

__TAIL_TOLERANCE__ = 1e-12
__MAX_LEVELS__ = 100000
__HYPOTHESIS_SLACK__ = 1e-12
__ORACLE_LIMIT__ = 1 << 20


def _weighted(f: SpectralField, alpha: float) -> np.ndarray:
    return f.coefficients * (1.0 + f.grid.k_squared()) ** (alpha / 2.0)


def _check_pair(f: SpectralField, g: SpectralField) -> None:
    if f.grid != g.grid:
        raise GridException(f"States live on different grids: {f.grid} and {g.grid}")


@define(frozen=True, slots=True, weakref_slot=False)
class _PairAlgebra:
    """a = ||f||^2, b = ||g||^2, u = |<f, g>|^2 together with a - b and ab - u computed without cancellation"""
    a: float
    b: float
    u: float
    a_minus_b: float
    gap: float

    @classmethod
    def of(cls, f: SpectralField, g: SpectralField, alpha: float) -> '_PairAlgebra':
        _check_pair(f, g)
        wf, wg = _weighted(f, alpha), _weighted(g, alpha)
        a = float(np.vdot(wf, wf).real)
        b = float(np.vdot(wg, wg).real)
        c = complex(np.vdot(wf, wg))
        d = wg - wf
        a_minus_b = float(np.vdot(wf - wg, wf + wg).real)
        if a == 0.0:
            gap = 0.0
        else:
            orthogonal = d - (np.vdot(wf, d) / a) * wf
            gap = a * float(np.vdot(orthogonal, orthogonal).real)
        return cls(a, b, abs(c) ** 2, a_minus_b, max(gap, 0.0))

    def scaled(self, Z: float) -> '_PairAlgebra':
        return _PairAlgebra(self.a / Z, self.b / Z, self.u / Z ** 2, self.a_minus_b / Z, self.gap / Z ** 2)

    def level_difference(self, k: int) -> float:
        """sqrt((a^k - b^k)^2 + 2((ab)^k - u^k)) with both differences factored"""
        powers = np.arange(k)
        power_difference = self.a_minus_b * float(np.sum(self.a ** powers * self.b ** (k - 1 - powers)))
        p = self.a * self.b
        gap_difference = self.gap * float(np.sum(p ** powers * self.u ** (k - 1 - powers)))
        return math.sqrt(max(power_difference ** 2 + 2.0 * gap_difference, 0.0))


def tensor_level_norm(phi: SpectralField, alpha: float, k: int) -> float:
    """||S^(alpha,k) gamma^(k)||_{L^2} = ||phi||_{H^alpha}^(2k)

    Args:
        phi (SpectralField): The one-particle state
        alpha (float): The regularity parameter
        k (int): The level, k >= 1

    Returns:
        float: The level norm
    """
    if k < 1:
        raise ValueError(f"Levels start at k=1, got {k}")
    return sobolev_norm(phi, alpha) ** (2 * k)


def tensor_difference_norm(phi_N: SpectralField, phi: SpectralField, k: int, alpha: float = 1.0) -> float:
    """||S^(alpha,k) (|phi_N><phi_N|^(tensor k) - |phi><phi|^(tensor k))||_{L^2}

    Raises:
        GridException: If the states live on different grids
    """
    if k < 1:
        raise ValueError(f"Levels start at k=1, got {k}")
    return _PairAlgebra.of(phi_N, phi, alpha).level_difference(k)


def _kernel(values: np.ndarray, k: int) -> np.ndarray:
    """prod_j phi(x_j) conj(phi(x'_j)) with axes ordered x_1, x'_1, ..., x_k, x'_k"""
    kernel = np.ones(())
    for _ in range(k):
        kernel = np.multiply.outer(np.multiply.outer(kernel, values), np.conj(values))
    return kernel


def _kernel_norm(kernel: np.ndarray, grid: GridSpec, alpha: float) -> float:
    """L^2 norm of <grad>^alpha applied in every kernel variable"""
    variables = kernel.ndim
    coefficients = scipy.fft.fftn(kernel, norm="forward") * math.sqrt(grid.volume ** variables)
    weight = (1.0 + grid.wavenumbers(0) ** 2) ** (alpha / 2.0)
    weights = np.ones(())
    for _ in range(variables):
        weights = np.multiply.outer(weights, weight)
    return float(np.sqrt(np.sum(np.abs(weights * coefficients) ** 2)))


def _check_oracle_grid(grid: GridSpec, k: int) -> None:
    if grid.dim != 1:
        raise GridException(f"Kernel oracles run on 1D grids, got dimension {grid.dim}")
    if grid.modes[0] ** (2 * k) > __ORACLE_LIMIT__:
        raise GridException(f"A level-{k} kernel on {grid.modes[0]} modes exceeds {__ORACLE_LIMIT__} entries")


def kernel_level_norm(phi: SpectralField, alpha: float, k: int) -> float:
    """||S^(alpha,k) gamma^(k)||_{L^2} from the materialised 2k-variable kernel on a tiny 1D grid

    Raises:
        GridException: If the grid is not 1D or the kernel would be too large
    """
    _check_oracle_grid(phi.grid, k)
    return _kernel_norm(_kernel(transform_inverse(phi), k), phi.grid, alpha)


def kernel_difference_norm(phi_N: SpectralField, phi: SpectralField, k: int, alpha: float = 1.0) -> float:
    """The materialised-kernel counterpart of tensor_difference_norm"""
    _check_pair(phi_N, phi)
    _check_oracle_grid(phi.grid, k)
    difference = _kernel(transform_inverse(phi_N), k) - _kernel(transform_inverse(phi), k)
    return _kernel_norm(difference, phi.grid, alpha)


def binomial_bound_check(phi_N: SpectralField, phi: SpectralField, k: int, C1: float) -> BoundReport:
    """Checks the level difference against 2k (3 C1)^(2k-1) ||phi_N - phi||_{H^1}

    Raises:
        HypothesisViolationException: If either state has H^1 norm above C1
    """
    norms = (sobolev_norm(phi_N, 1.0), sobolev_norm(phi, 1.0))
    if max(norms) > C1 * (1.0 + __HYPOTHESIS_SLACK__):
        raise HypothesisViolationException(f"H^1 norms {norms[0]:.6g}, {norms[1]:.6g} exceed C1={C1:.6g}")
    lhs = tensor_difference_norm(phi_N, phi, k)
    rhs = 2.0 * k * (3.0 * C1) ** (2 * k - 1) * h1_difference(phi_N, phi)
    return BoundReport.compare(lhs, rhs, k=k, C1=C1)


def _geometric(r: float) -> float:
    if not 0.0 <= r < 1.0:
        raise HierarchyConvergenceException(f"Master norm diverges: ratio {r:.6g} >= 1")
    return r / (1.0 - r)


def master_norm_factorized(phi: SpectralField, alpha: float, Z: float) -> float:
    """sum_k Z^(-k) ||phi||_{H^alpha}^(2k) = r / (1 - r) with r = ||phi||_{H^alpha}^2 / Z

    Raises:
        HierarchyConvergenceException: If Z <= 0 or r >= 1

    Examples:
        >>> master_norm_factorized(unit_state, 1.0, 4.0)
        0.3333333333333333
    """
    if not Z > 0.0:
        raise HierarchyConvergenceException(f"Z must be positive, got {Z}")
    return _geometric(sobolev_norm(phi, alpha) ** 2 / Z)


def _tail_envelope(delta: float, C1: float, Z: float, K: int) -> float:
    """sum_{k>K} Z^(-k) 2k (3 C1)^(2k-1) delta"""
    if delta == 0.0 or C1 == 0.0:
        return 0.0
    rho = (3.0 * C1) ** 2 / Z
    return 2.0 * delta / (3.0 * C1) * rho ** (K + 1) * ((K + 1) - K * rho) / (1.0 - rho) ** 2


@define(frozen=True, slots=True, weakref_slot=False)
class HierarchyDifference(BaseInterface):
    """The master-norm distance of two factorized hierarchies

    Args:
        value (float): sum_{k <= k_max} Z^(-k) times the level differences
        Z (float): The level weight
        k_max (int): The truncation level
        tail_bound (float): Certified bound on the omitted levels
        envelope_bound (float): Upper bound on the whole series from the level-wise binomial estimate
        C1 (float): The H^1 bound used for the envelope
    """
    value: float = field(converter=float)
    Z: float = field(converter=float)
    k_max: int = field(validator=validators.instance_of(int))
    tail_bound: float = field(converter=float)
    envelope_bound: float = field(converter=float)
    C1: float = field(converter=float)


def hierarchy_difference_report(phi_N: SpectralField, phi: SpectralField, Z: float,
                                k_max: Optional[int] = None, C1: Optional[float] = None) -> HierarchyDifference:
    """Sums the weighted level differences until the envelope tail is below 1e-12 of the sum

    Args:
        phi_N (SpectralField): The Hartree state
        phi (SpectralField): The cubic state
        Z (float): The level weight
        k_max (int, optional): The smallest truncation level to use
        C1 (float, optional): An H^1 bound for both states, the larger norm by default

    Raises:
        HierarchyConvergenceException: If Z <= (3 C1)^2 or the tail never certifies
    """
    norms = max(sobolev_norm(phi_N, 1.0), sobolev_norm(phi, 1.0))
    C1 = norms if C1 is None else float(C1)
    if C1 < norms * (1.0 - __HYPOTHESIS_SLACK__):
        raise HierarchyConvergenceException(f"C1={C1:.6g} is below the state norm {norms:.6g}")
    if not Z > (3.0 * C1) ** 2:
        raise HierarchyConvergenceException(f"Need Z > (3 C1)^2 = {(3.0 * C1) ** 2:.6g}, got Z={Z:.6g}")

    algebra = _PairAlgebra.of(phi_N, phi, 1.0).scaled(Z)
    delta = h1_difference(phi_N, phi)
    minimum = 1 if k_max is None else int(k_max)
    if minimum < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")

    total, K = 0.0, 0
    while True:
        K += 1
        total += algebra.level_difference(K)
        tail = _tail_envelope(delta, C1, Z, K)
        if K >= minimum and tail <= __TAIL_TOLERANCE__ * total:
            break
        if K >= __MAX_LEVELS__:
            raise HierarchyConvergenceException(f"Tail {tail:.3g} not certified after {K} levels")
    envelope = _tail_envelope(delta, C1, Z, 0)
    logger.debug("Hierarchy difference %.6g at Z=%g after %d levels", total, Z, K)
    return HierarchyDifference(total, Z, K, tail, envelope, C1)


def hierarchy_difference_master_norm(phi_N: SpectralField, phi: SpectralField, Z: float, k_max: Optional[int] = None) -> float:
    """sum_k Z^(-k) ||S^(1,k)(gamma_N^(k) - gamma^(k))||_{L^2} with a certified tail"""
    return hierarchy_difference_report(phi_N, phi, Z, k_max).value


@define(frozen=True, slots=True, weakref_slot=False)
class FactorizedHierarchy(BaseInterface):
    """gamma^(k) = |phi><phi|^(tensor k) for k = 1, 2, ...

    Args:
        phi (SpectralField): The one-particle state
        alpha (float): The regularity parameter
    """
    phi: SpectralField = field(validator=validators.instance_of(SpectralField))
    alpha: float = field(default=1.0, converter=float)

    def level_norm(self, k: int) -> float:
        return tensor_level_norm(self.phi, self.alpha, k)

    def master_norm(self, Z: float) -> float:
        return master_norm_factorized(self.phi, self.alpha, Z)

    def difference(self, other: 'FactorizedHierarchy', k: int) -> float:
        """Level-k distance, with self as the Hartree side"""
        return tensor_difference_norm(self.phi, other.phi, k, self.alpha)


def _convert_weights(value: Sequence[float]) -> tuple[float, ...]:
    return tuple(float(item) for item in value)


@define(frozen=True, slots=True, weakref_slot=False)
class MixedHierarchy(BaseInterface):
    """gamma^(k) = sum_i lambda_i |phi_i><phi_i|^(tensor k) for a finite convex mixture

    Args:
        states (tuple[SpectralField, ...]): The states phi_i on one grid
        weights (tuple[float, ...]): Nonnegative lambda_i summing to one
        alpha (float): The regularity parameter

    Raises:
        ValueError: If the weights are not a probability vector or the counts differ
        GridException: If the states live on different grids
    """
    states: tuple[SpectralField, ...] = field(
        converter=tuple,
        validator=validators.deep_iterable(validators.instance_of(SpectralField)),
        eq=False)
    weights: tuple[float, ...] = field(converter=_convert_weights)
    alpha: float = field(default=1.0, converter=float)

    def __attrs_post_init__(self):
        if len(self.states) == 0 or len(self.states) != len(self.weights):
            raise ValueError(f"Need one weight per state, got {len(self.weights)} weights for {len(self.states)} states")
        if min(self.weights) < 0.0 or abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"Weights {self.weights} are not a probability vector")
        for state in self.states[1:]:
            _check_pair(self.states[0], state)

    def gram(self) -> np.ndarray:
        """G_ij = <<grad>^alpha phi_i, <grad>^alpha phi_j>"""
        weighted = np.stack([_weighted(state, self.alpha).ravel() for state in self.states])
        return np.conj(weighted) @ weighted.T

    def level_norm(self, k: int) -> float:
        """sqrt(sum_ij lambda_i lambda_j |G_ij|^(2k))"""
        if k < 1:
            raise ValueError(f"Levels start at k=1, got {k}")
        lam = np.asarray(self.weights)
        return float(np.sqrt(max(lam @ (np.abs(self.gram()) ** (2 * k)) @ lam, 0.0)))

    def master_norm(self, Z: float) -> float:
        """sum_k Z^(-k) level_norm(k), summed until the geometric tail is below 1e-12 of the sum

        Raises:
            HierarchyConvergenceException: If Z does not exceed max_i ||phi_i||_{H^alpha}^2
        """
        if not Z > 0.0:
            raise HierarchyConvergenceException(f"Z must be positive, got {Z}")
        gram = np.abs(self.gram())
        C = float(np.max(np.diag(gram)))
        r = C / Z
        if r >= 1.0:
            raise HierarchyConvergenceException(f"Master norm diverges: ratio {r:.6g} >= 1")
        lam = np.asarray(self.weights)
        total, k = 0.0, 0
        while True:
            k += 1
            total += float(np.sqrt(max(lam @ (gram / Z) ** (2 * k) @ lam, 0.0)))
            tail = r ** (k + 1) / (1.0 - r)
            if tail <= __TAIL_TOLERANCE__ * total or total == 0.0 or k >= __MAX_LEVELS__:
                return total


class HierarchySeriesRow(NamedTuple):
    """One CSV row of the hierarchy comparison
    """
    t: float
    Z: float
    k_max: int
    hierarchy_diff: float
    envelope_bound: float


@define(frozen=True, slots=True, weakref_slot=False)
class HierarchySeries(BaseInterface):
    """The master-norm distance along two runs

    Args:
        rows (tuple[HierarchySeriesRow, ...]): One row per shared snapshot
        C1 (float): The H^1 bound over both runs
    """
    rows: tuple[HierarchySeriesRow, ...] = field(converter=tuple)
    C1: float = field(converter=float)

    @property
    def sup(self) -> float:
        return max((row.hierarchy_diff for row in self.rows), default=0.0)

    @property
    def envelope_holds(self) -> bool:
        return all(row.hierarchy_diff <= row.envelope_bound * (1.0 + 1e-12) for row in self.rows)


def hierarchy_difference_series(cubic_run, hartree_run, Z: float) -> HierarchySeries:
    """The master-norm distance at every shared snapshot, with C1 taken over both runs

    Args:
        cubic_run (EvolutionRun): The cubic NLS trajectory
        hartree_run (EvolutionRun): The Hartree trajectory
        Z (float): The level weight

    Raises:
        EvolutionException: If the runs have different snapshot times
        HierarchyConvergenceException: If Z <= (3 C1)^2
    """
    times = [t for t, _ in cubic_run.snapshots]
    if times != [t for t, _ in hartree_run.snapshots]:
        raise EvolutionException("Runs have mismatched snapshot times")
    C1 = max(max(cubic_run.h1_norms, default=0.0), max(hartree_run.h1_norms, default=0.0))
    rows = []
    for (t, phi), (_, phi_N) in zip(cubic_run.snapshots, hartree_run.snapshots):
        report = hierarchy_difference_report(phi_N, phi, Z, C1=C1)
        rows.append(HierarchySeriesRow(t, Z, report.k_max, report.value, report.envelope_bound))
    series = HierarchySeries(tuple(rows), C1)
    logger.info("Hierarchy difference sup %.6g over %d snapshots (Z=%g)", series.sup, len(rows), Z)
    return series
