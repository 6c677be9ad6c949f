import unittest
import sys
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.biscatter.utils.converters import (
    convert_to_float_tuple,
    convert_to_int_tuple,
    convert_to_complex_array,
    convert_to_real_array,
    format_float,
)


class TestConverters(unittest.TestCase):
    def test_convert_scalar_to_float_tuple(self):
        self.assertEqual(convert_to_float_tuple(2), (2.0,))

    def test_convert_list_to_float_tuple(self):
        self.assertEqual(convert_to_float_tuple([1, 2.5]), (1.0, 2.5))

    def test_convert_string_to_float_tuple(self):
        with self.assertRaises(TypeError):
            convert_to_float_tuple("1.0")

    def test_convert_bool_to_float_tuple(self):
        with self.assertRaises(TypeError):
            convert_to_float_tuple(True)

    def test_convert_to_int_tuple(self):
        self.assertEqual(convert_to_int_tuple(64), (64,))
        self.assertEqual(convert_to_int_tuple((32, 64.0)), (32, 64))

    def test_convert_fraction_to_int_tuple(self):
        with self.assertRaises(TypeError):
            convert_to_int_tuple([32, 64.5])

    def test_converted_arrays_are_read_only_copies(self):
        source = np.arange(4, dtype=float)
        array = convert_to_complex_array(source)
        source[0] = 10.0
        self.assertEqual(array[0], 0.0)
        self.assertEqual(array.dtype, np.complex128)
        with self.assertRaises(ValueError):
            array[0] = 1.0

    def test_convert_to_real_array(self):
        self.assertEqual(convert_to_real_array([1, 2]).dtype, np.float64)

    def test_format_float(self):
        self.assertEqual(format_float(0.1), "0.10000000000000001")
        self.assertEqual(format_float(2.0), "2")
        self.assertEqual(float(format_float(1 / 3)), 1 / 3)


if __name__ == '__main__':
    unittest.main()
