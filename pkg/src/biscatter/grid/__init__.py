from .spec import GridSpec
from .field import (
    SpectralField,
    transform_forward,
    transform_inverse,
    apply_multiplier,
    evaluate_multiplier,
    pointwise_product,
    conjugate,
    dealias,
    zeros,
    plane_wave,
    random_field,
    set_fft_workers,
)
from .codec import encode_field, decode_field, write_field, read_field, write_fields, read_fields


__all__ = [
    "GridSpec",
    "SpectralField",
    "transform_forward",
    "transform_inverse",
    "apply_multiplier",
    "evaluate_multiplier",
    "pointwise_product",
    "conjugate",
    "dealias",
    "zeros",
    "plane_wave",
    "random_field",
    "set_fft_workers",
    "encode_field",
    "decode_field",
    "write_field",
    "read_field",
    "write_fields",
    "read_fields",
]
