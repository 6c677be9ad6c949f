import math
from typing import Any, Iterable

import numpy as np


def is_dyadic(value: Any) -> bool:
    """
    Checks if value is a positive integer power of two
    """
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool) and value >= 1 and (int(value) & (int(value) - 1)) == 0


def is_dyadic_sequence(values: Iterable[Any]) -> bool:
    """
    Checks if values are distinct powers of two in increasing order
    """
    values = list(values)
    if not all(is_dyadic(value) for value in values):
        return False
    return all(a < b for a, b in zip(values, values[1:]))


def validate_positive(instance, attribute, value) -> None:
    """Validates the argument is a finite positive number

    Args:
        instance (Any): The instance
        attribute (Any): The attribute
        value (Any): The value

    Raises:
        ValueError: If the value is not a finite positive number
    """
    if not (isinstance(value, (int, float, np.integer, np.floating)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{attribute.name} must be a finite positive number, but received {value!r}")


def validate_nonnegative(instance, attribute, value) -> None:
    """Validates the argument is a finite nonnegative number"""
    if not (isinstance(value, (int, float, np.integer, np.floating)) and math.isfinite(value) and value >= 0):
        raise ValueError(f"{attribute.name} must be a finite nonnegative number, but received {value!r}")


def validate_open_unit_interval(instance, attribute, value) -> None:
    """Validates the argument lies in (0, 1)"""
    if not (isinstance(value, (int, float, np.integer, np.floating)) and 0.0 < value < 1.0):
        raise ValueError(f"{attribute.name} must lie in the open interval (0, 1), but received {value!r}")


def validate_positive_tuple(instance, attribute, value) -> None:
    """Validates the argument is a tuple of finite positive numbers"""
    if not isinstance(value, tuple) or len(value) == 0:
        raise ValueError(f"{attribute.name} must be a non-empty tuple, but received {value!r}")
    for item in value:
        if not (math.isfinite(item) and item > 0):
            raise ValueError(f"{attribute.name} entries must be finite and positive, but received {value!r}")


def validate_even_tuple(instance, attribute, value) -> None:
    """Validates the argument is a tuple of positive even integers"""
    if not isinstance(value, tuple) or len(value) == 0:
        raise ValueError(f"{attribute.name} must be a non-empty tuple, but received {value!r}")
    for item in value:
        if not isinstance(item, int) or item <= 0 or item % 2 != 0:
            raise ValueError(f"{attribute.name} entries must be positive even integers, but received {value!r}")
