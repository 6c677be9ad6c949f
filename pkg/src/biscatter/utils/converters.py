from typing import Any, Iterable

import numpy as np


def convert_to_float_tuple(value: Any) -> tuple[float, ...]:
    """Converts a scalar or an iterable to a tuple of floats

    Args:
        value (Any): The value to convert
    """
    if isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool):
        return (float(value),)
    if isinstance(value, Iterable) and not isinstance(value, (str, bytes)):
        return tuple(float(item) for item in value)
    raise TypeError(f"Could not convert {value!r} to a tuple of floats")


def convert_to_int_tuple(value: Any) -> tuple[int, ...]:
    """Converts a scalar or an iterable to a tuple of ints

    Args:
        value (Any): The value to convert
    """
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return (int(value),)
    if isinstance(value, Iterable) and not isinstance(value, (str, bytes)):
        items = tuple(value)
        for item in items:
            if isinstance(item, bool) or not float(item).is_integer():
                raise TypeError(f"Could not convert {value!r} to a tuple of ints")
        return tuple(int(item) for item in items)
    raise TypeError(f"Could not convert {value!r} to a tuple of ints")


def convert_to_frozen_array(value: Any, dtype: Any = np.complex128) -> np.ndarray:
    """Copies a value into a read-only numpy array

    Args:
        value (Any): The array-like to copy
        dtype (Any): The dtype of the copy
    """
    array = np.array(value, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def convert_to_complex_array(value: Any) -> np.ndarray:
    return convert_to_frozen_array(value, np.complex128)


def convert_to_real_array(value: Any) -> np.ndarray:
    return convert_to_frozen_array(value, np.float64)


def format_float(value: float) -> str:
    """Formats a float with round-trip precision for CSV emission"""
    return format(float(value), '.17g')
