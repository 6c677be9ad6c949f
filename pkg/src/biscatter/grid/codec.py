"""Flat binary layout for spectral fields.

    header:  dim (int64) | n_1 ... n_dim (int64) | L_1 ... L_dim (float64)     all little-endian
    body:    coefficients as little-endian complex128 (interleaved real/imag float64),
             ascending wavenumber order m = -n_a/2 ... n_a/2 - 1 on every axis, row-major
"""
import io
from pathlib import Path
from typing import BinaryIO, Iterable

import numpy as np

from ..base.exceptions import CodecException
from .spec import GridSpec
from .field import SpectralField


_INT = np.dtype('<i8')
_FLOAT = np.dtype('<f8')
_COMPLEX = np.dtype('<c16')


def encode_field(field_: SpectralField) -> bytes:
    """Serialises a field to the flat binary layout"""
    grid = field_.grid
    header = (np.array([grid.dim], dtype=_INT).tobytes()
              + np.array(grid.modes, dtype=_INT).tobytes()
              + np.array(grid.extents, dtype=_FLOAT).tobytes())
    body = np.ascontiguousarray(np.fft.fftshift(field_.coefficients), dtype=_COMPLEX).tobytes()
    return header + body


def decode_field(data: bytes, dealias: bool = False) -> SpectralField:
    """Reads one field from the flat binary layout

    Raises:
        CodecException: If the buffer is truncated or the header is invalid
    """
    field_, consumed = _decode_one(data, 0, dealias)
    if consumed != len(data):
        raise CodecException(f"{len(data) - consumed} trailing bytes after field")
    return field_


def _decode_one(data: bytes, offset: int, dealias: bool) -> tuple[SpectralField, int]:
    if len(data) - offset < _INT.itemsize:
        raise CodecException("Buffer too short for a field header")
    dim = int(np.frombuffer(data, dtype=_INT, count=1, offset=offset)[0])
    if dim not in (1, 2, 3):
        raise CodecException(f"Invalid dimension {dim} in field header")
    offset += _INT.itemsize
    header_size = dim * (_INT.itemsize + _FLOAT.itemsize)
    if len(data) - offset < header_size:
        raise CodecException("Buffer too short for a field header")
    modes = tuple(int(n) for n in np.frombuffer(data, dtype=_INT, count=dim, offset=offset))
    offset += dim * _INT.itemsize
    extents = tuple(float(L) for L in np.frombuffer(data, dtype=_FLOAT, count=dim, offset=offset))
    offset += dim * _FLOAT.itemsize
    try:
        grid = GridSpec(extents, modes, dealias)
    except (ValueError, TypeError) as exc:
        raise CodecException(f"Invalid grid in field header: {exc}") from exc
    count = grid.mode_count
    if len(data) - offset < count * _COMPLEX.itemsize:
        raise CodecException(f"Buffer too short for {count} coefficients")
    body = np.frombuffer(data, dtype=_COMPLEX, count=count, offset=offset).reshape(grid.shape)
    offset += count * _COMPLEX.itemsize
    return SpectralField(grid, np.fft.ifftshift(body)), offset


def write_field(field_: SpectralField, target: str | Path | BinaryIO) -> None:
    """Writes a field to a path or an open binary handle"""
    payload = encode_field(field_)
    if isinstance(target, (str, Path)):
        with open(target, 'wb') as handle:
            handle.write(payload)
    else:
        target.write(payload)


def read_field(source: str | Path | BinaryIO, dealias: bool = False) -> SpectralField:
    """Reads a field from a path or an open binary handle"""
    if isinstance(source, (str, Path)):
        with open(source, 'rb') as handle:
            return decode_field(handle.read(), dealias)
    return decode_field(source.read(), dealias)


def write_fields(fields: Iterable[SpectralField], target: str | Path) -> None:
    """Writes consecutive fields (snapshot export)"""
    with open(target, 'wb') as handle:
        for field_ in fields:
            handle.write(encode_field(field_))


def read_fields(source: str | Path, dealias: bool = False) -> list[SpectralField]:
    """Reads every consecutive field from a file"""
    with open(source, 'rb') as handle:
        data = handle.read()
    fields, offset = [], 0
    while offset < len(data):
        field_, offset = _decode_one(data, offset, dealias)
        fields.append(field_)
    return fields


def roundtrip_bytes(field_: SpectralField) -> SpectralField:
    """Encodes then decodes through an in-memory buffer"""
    buffer = io.BytesIO()
    write_field(field_, buffer)
    buffer.seek(0)
    return read_field(buffer, field_.grid.dealias)
