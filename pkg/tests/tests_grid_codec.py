import unittest
import sys
import tempfile
from math import pi
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.biscatter.grid.spec import GridSpec
from src.biscatter.grid.field import plane_wave, random_field
from src.biscatter.grid.codec import (
    encode_field,
    decode_field,
    write_fields,
    read_fields,
    roundtrip_bytes,
)
from src.biscatter.base.exceptions import CodecException


class TestCodec(unittest.TestCase):
    def setUp(self):
        self.grid = GridSpec((2 * pi, 4 * pi), (4, 6))
        self.field = random_field(self.grid, np.random.default_rng(3))

    def test_header_layout(self):
        data = encode_field(self.field)
        self.assertEqual(np.frombuffer(data[:8], dtype='<i8')[0], 2)
        np.testing.assert_array_equal(np.frombuffer(data[8:24], dtype='<i8'), [4, 6])
        np.testing.assert_allclose(np.frombuffer(data[24:40], dtype='<f8'), [2 * pi, 4 * pi])
        self.assertEqual(len(data), 40 + 24 * 16)

    def test_body_in_ascending_wavenumber_order(self):
        grid = GridSpec((2 * pi,), (4,))
        wave = plane_wave(grid, (-2,), 1.0)
        body = np.frombuffer(encode_field(wave)[24:], dtype='<c16')
        self.assertNotEqual(body[0], 0.0)
        self.assertEqual(int(np.count_nonzero(body)), 1)

    def test_decode_is_exact(self):
        decoded = decode_field(encode_field(self.field))
        self.assertEqual(decoded.grid, self.field.grid)
        np.testing.assert_array_equal(decoded.coefficients, self.field.coefficients)

    def test_roundtrip_keeps_dealias_flag(self):
        field = random_field(self.grid.with_dealias(True), np.random.default_rng(4))
        self.assertTrue(roundtrip_bytes(field).grid.dealias)

    def test_truncated(self):
        data = encode_field(self.field)
        with self.assertRaises(CodecException):
            decode_field(data[:-1])
        with self.assertRaises(CodecException):
            decode_field(data[:4])

    def test_trailing_bytes(self):
        with self.assertRaises(CodecException):
            decode_field(encode_field(self.field) + b"\x00")

    def test_bad_dimension(self):
        with self.assertRaises(CodecException):
            decode_field(np.array([5], dtype='<i8').tobytes())

    def test_odd_modes_in_header(self):
        data = np.array([1, 3], dtype='<i8').tobytes() + np.array([1.0], dtype='<f8').tobytes() + bytes(48)
        with self.assertRaises(CodecException):
            decode_field(data)

    def test_snapshot_file(self):
        fields = [self.field, self.field * 2.0, self.field * 3.0]
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "snapshots.bin"
            write_fields(fields, path)
            restored = read_fields(path)
        self.assertEqual(len(restored), 3)
        for original, copy in zip(fields, restored):
            self.assertTrue(copy.equals(original))


if __name__ == '__main__':
    unittest.main()
