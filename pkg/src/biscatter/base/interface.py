"""Frozen attrs record base shared by grids, reports and configuration sections.

Slots starting with an underscore are private: they show in repr() but never in str(),
_to_dict() or the manifest fingerprint. Arrays are summarised by shape in repr() and left
out of _to_dict(), so every record can be echoed into a run manifest as plain JSON.

    >>> from attrs import define
    >>> from biscatter.base.interface import BaseInterface
    >>> @define(frozen=True, slots=True, weakref_slot=False)
    ... class Example(BaseInterface):
    ...     beta: float = 0.25
    >>> Example()._to_dict()
    {'beta': 0.25}
"""
import json
from abc import ABC
from enum import Enum
from typing import Any, Iterator

import numpy as np
from attrs import define

from ..utils.digest import Digest


def _emit(value: Any) -> Any:
    """Converts a slot value to a JSON-ready value

    Args:
        value (Any): The value to convert

    Returns:
        Any: The converted value, or None for arrays
    """
    if isinstance(value, BaseInterface):
        return value._to_dict()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return None
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (tuple, list)):
        return [_emit(item) for item in value]
    if isinstance(value, dict):
        return {str(key): _emit(item) for key, item in value.items()}
    return value


@define(frozen=True, slots=True, weakref_slot=False)
class BaseInterface(ABC):
    """
    Base interface for all records
    """

    def __iter_slots__(self, include_underscored_slots: bool = False, private_only: bool = False) -> Iterator[str]:
        """Returns an iterator over the slots of the record and its attrs bases."""
        if not include_underscored_slots and private_only:
            raise ValueError("private_only requires include_underscored_slots")

        for attribute in self.__attrs_attrs__:
            slot = attribute.name
            if private_only:
                if slot.startswith("_"):
                    yield slot
            else:
                if not include_underscored_slots and slot.startswith("_"):
                    continue
                yield slot

    def __iter__(self) -> Iterator[str]:
        """Returns an iterator over all slots.

        Returns:
            Iterator[str]: An iterator over all slots.
        """
        yield from self.__iter_slots__(include_underscored_slots=True, private_only=False)

    @staticmethod
    def __repr_value__(value: Any) -> str:
        if isinstance(value, np.ndarray):
            return f"ndarray(shape={value.shape}, dtype={value.dtype})"
        return repr(value)

    def __repr_private__(self, include_underscored_slots: bool = True, private_only: bool = False) -> str:
        """Returns a string representation of the record in a standard format.

        Returns:
            str: A string representation of the record.
        """
        items = ', '.join(
            f'{slot}={self.__repr_value__(getattr(self, slot))}'
            for slot in self.__iter_slots__(include_underscored_slots, private_only))
        return f"{self.__class__.__name__}({items})"

    def __repr__(self) -> str:
        return self.__repr_private__(include_underscored_slots=True, private_only=False)

    def __str_item__(self, item: str) -> str:
        """Returns a string of a slot and its value.

        Returns:
            str: A string containing a slot and its value.
        """
        return f"{item}: {self.__repr_value__(getattr(self, item))}"

    def __str__(self) -> str:
        """Returns a string of key-value pairs of public slots and their values."""
        return ", ".join(self.__str_item__(slot) for slot in self.__iter_slots__())

    def _to_dict(self) -> dict:
        """Returns a JSON-ready dict of the public slots.

        Returns:
            dict: The public slots, arrays omitted.
        """
        emitted = {}
        for slot in self.__iter_slots__():
            value = getattr(self, slot)
            if isinstance(value, np.ndarray):
                continue
            emitted[slot] = _emit(value)
        return emitted

    def _hash_repr(self) -> str:
        """Returns the SHA-256 hex digest of the record's public content.

        Returns:
            str: The hex digest.
        """
        return Digest.from_str(json.dumps(self._to_dict(), sort_keys=True)).hex
