import hashlib
import re
from pathlib import Path
from typing import Iterable

from attrs import define, field


def convert_str_to_bytes(data: str | bytes) -> bytes:
    """Converts a string to bytes

    Args:
        data (str | bytes): The data to convert

    Returns:
        bytes: The converted data
    """
    if isinstance(data, str):
        return data.encode()
    if isinstance(data, bytes):
        return data
    raise ValueError(f"Expected data to be str or bytes, got {type(data)}")


@define(frozen=True, slots=True, weakref_slot=False)
class Digest:
    """A SHA-256 digest of an output artefact.
    """

    _raw_hash: bytes = field(alias="raw_hash")

    @_raw_hash.validator
    def _check_hash(self, attribute, value):
        if not isinstance(value, bytes):
            raise ValueError(f"Expected hash to be bytes, got {type(value)}")

        if len(value) != 32:
            raise ValueError("Expected hash to be 32 bytes")

    @property
    def hash(self) -> bytes:
        return self._raw_hash

    @property
    def hex(self) -> str:
        return self._raw_hash.hex()

    @classmethod
    def from_bytes(cls, data: bytes) -> 'Digest':
        return cls(hashlib.sha256(data).digest())

    @classmethod
    def from_str(cls, data: str) -> 'Digest':
        return cls.from_bytes(convert_str_to_bytes(data))

    @classmethod
    def from_file(cls, path: str | Path) -> 'Digest':
        sha = hashlib.sha256()
        with open(path, 'rb') as handle:
            for chunk in iter(lambda: handle.read(1 << 16), b''):
                sha.update(chunk)
        return cls(sha.digest())

    @classmethod
    def from_hex(cls, value: str) -> 'Digest':
        if not re.match(r'^[0-9a-fA-F]{64}$', value):
            raise ValueError("Expected a 64 character hex digest")
        return cls(bytes.fromhex(value))


def combine_digests(digests: Iterable[Digest]) -> Digest | None:
    """Folds digests pairwise, level by level, into one root digest

    An odd digest at the end of a level is paired with itself.

    Args:
        digests (Iterable[Digest]): The leaf digests, in a fixed order

    Returns:
        Digest | None: The root digest, or None if there are no leaves
    """
    level = [digest.hash for digest in digests]
    if len(level) == 0:
        return None

    while len(level) > 1:
        if len(level) % 2 == 1:
            level.append(level[-1])
        level = [hashlib.sha256(level[i] + level[i + 1]).digest() for i in range(0, len(level), 2)]

    return Digest(level[0])
