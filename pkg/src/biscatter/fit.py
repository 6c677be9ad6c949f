"""Log-log rate fits of (N, error) samples."""
import logging
import math
from typing import Iterable, Optional

import numpy as np
from attrs import define, field, validators

from .base.interface import BaseInterface
from .base.types import FitModel
from .base.exceptions import FitException, DegenerateSamplesException


logger = logging.getLogger(__name__)

__MIN_SAMPLES__ = 4
__NOISE_FLOOR__ = 1e-10
__DISCARD_FACTOR__ = 3.0
__RESIDUAL_FLOOR__ = 1e-9


def _validate_samples(instance, attribute, value) -> None:
    if not isinstance(value, tuple):
        raise TypeError(f"Expected samples to be a tuple, got {type(value)}")
    for item in value:
        if not (isinstance(item, tuple) and len(item) == 2):
            raise ValueError(f"Expected (N, error) pairs, got {item!r}")
    if any(a[0] >= b[0] for a, b in zip(value, value[1:])):
        raise ValueError("Samples must be sorted by strictly increasing N")


def _convert_samples(value: Iterable) -> tuple[tuple[int, float], ...]:
    return tuple((int(N), float(error)) for N, error in value)


@define(frozen=True, slots=True, weakref_slot=False)
class RateFit(BaseInterface):
    """A fitted log-log rate

    Args:
        samples (tuple[tuple[int, float], ...]): The (N, error) samples used by the fit, sorted by N
        slope (float): The fitted exponent s in error ~ N^s
        intercept (float): The fitted log-prefactor
        max_residual (float): The largest |residual| in log space
        model (FitModel): The fit model
        loglog_coefficient (float | None): The ln ln N coefficient of the power-with-loglog model
        discarded (tuple[tuple[int, float], ...]): Samples dropped as preasymptotic
    """
    samples: tuple[tuple[int, float], ...] = field(
        converter=_convert_samples,
        validator=_validate_samples)

    slope: float = field(
        converter=float)

    intercept: float = field(
        converter=float)

    max_residual: float = field(
        converter=float)

    model: FitModel = field(
        default=FitModel.PURE_POWER,
        validator=validators.instance_of(FitModel))

    loglog_coefficient: Optional[float] = field(
        default=None,
        validator=validators.optional(validators.instance_of(float)))

    discarded: tuple[tuple[int, float], ...] = field(
        default=(),
        converter=_convert_samples)

    @slope.validator
    def _check_slope(self, attribute, value):
        if not math.isfinite(value):
            raise FitException(f"Fitted slope is not finite: {value}")

    @property
    def N_values(self) -> tuple[int, ...]:
        return tuple(N for N, _ in self.samples)

    @property
    def errors(self) -> tuple[float, ...]:
        return tuple(error for _, error in self.samples)

    def predict(self, N: float) -> float:
        """The fitted error at N"""
        log_value = self.intercept + self.slope * math.log(N)
        if self.loglog_coefficient is not None:
            log_value += self.loglog_coefficient * math.log(math.log(N))
        return math.exp(log_value)

    def slope_within(self, low: float, high: float) -> bool:
        return low <= self.slope <= high


def _design(N: np.ndarray, model: FitModel) -> np.ndarray:
    log_N = np.log(N)
    if model is FitModel.PURE_POWER:
        return np.column_stack([np.ones_like(log_N), log_N])
    if np.any(N <= 2):
        raise FitException("The power-with-loglog model needs every N > 2")
    return np.column_stack([np.ones_like(log_N), log_N, np.log(log_N)])


def _solve(N: np.ndarray, errors: np.ndarray, model: FitModel) -> tuple[np.ndarray, np.ndarray]:
    if model is FitModel.PURE_POWER:
        slope, intercept = np.polyfit(np.log(N), np.log(errors), 1)
        coefficients = np.array([intercept, slope])
    else:
        coefficients, *_ = np.linalg.lstsq(_design(N, model), np.log(errors), rcond=None)
    residuals = np.log(errors) - _design(N, model) @ coefficients
    return coefficients, residuals


def fit_rate(samples: Iterable[tuple[int, float]],
             model: FitModel = FitModel.PURE_POWER,
             allow_discard: bool = True,
             noise_floor: float = __NOISE_FLOOR__) -> RateFit:
    """Fits log(error) against log(N)

    The smallest N is dropped when its |residual| exceeds three times the median
    |residual|, at most once, and only while at least four samples remain.
    Residuals at rounding level never trigger a discard.

    Args:
        samples (Iterable[tuple[int, float]]): The (N, error) samples
        model (FitModel): pure-power fits a + s ln N; power-with-loglog adds c ln ln N
        allow_discard (bool): Whether the preasymptotic discard rule applies
        noise_floor (float): Errors at or below this are noise

    Returns:
        RateFit: The fit

    Raises:
        FitException: With fewer than four samples, a repeated N or a nonpositive error
        DegenerateSamplesException: If every error is at or below the noise floor
    """
    ordered = sorted((int(N), float(error)) for N, error in samples)
    if len(ordered) < __MIN_SAMPLES__:
        raise FitException(f"A rate fit needs at least {__MIN_SAMPLES__} samples, got {len(ordered)}")
    if len({N for N, _ in ordered}) != len(ordered):
        raise FitException("Rate fit samples repeat an N")
    if all(error <= noise_floor for _, error in ordered):
        raise DegenerateSamplesException(f"degenerate samples: every error is at or below {noise_floor:g}")
    if any(not (error > 0.0 and math.isfinite(error)) for _, error in ordered):
        raise FitException(f"Rate fit samples must be finite and positive: {ordered}")

    N = np.array([item[0] for item in ordered], dtype=float)
    errors = np.array([item[1] for item in ordered])
    coefficients, residuals = _solve(N, errors, model)
    discarded = ()

    if allow_discard and len(ordered) > __MIN_SAMPLES__:
        median = float(np.median(np.abs(residuals)))
        if abs(residuals[0]) > max(__DISCARD_FACTOR__ * median, __RESIDUAL_FLOOR__):
            logger.warning("Discarding preasymptotic sample N=%d (residual %.3g, median %.3g)", ordered[0][0], residuals[0], median)
            discarded = (ordered[0],)
            ordered = ordered[1:]
            N, errors = N[1:], errors[1:]
            coefficients, residuals = _solve(N, errors, model)

    loglog = float(coefficients[2]) if model is FitModel.POWER_WITH_LOGLOG else None
    fit = RateFit(
        samples=tuple(ordered),
        slope=float(coefficients[1]),
        intercept=float(coefficients[0]),
        max_residual=float(np.max(np.abs(residuals))),
        model=model,
        loglog_coefficient=loglog,
        discarded=discarded)
    logger.info("Rate fit (%s): slope %.4f over N=%s", model.value, fit.slope, fit.N_values)
    return fit
