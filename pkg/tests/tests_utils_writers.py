import unittest
import sys
import json
import tempfile
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.biscatter.base.types import ProfileKind
from src.biscatter.utils.digest import Digest
from src.biscatter.utils.writers import write_csv, write_json


class TestWriters(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.path = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def test_write_csv(self):
        rows = [{"N": 16, "supDiff": 0.5, "passed": True, "profile": ProfileKind.BUMP, "extra": "ignored"}]
        digest = write_csv(rows, self.path / "nested" / "out.csv", ["N", "supDiff", "passed", "profile"])
        text = (self.path / "nested" / "out.csv").read_text()
        self.assertEqual(text, "N,supDiff,passed,profile\n16,0.5,true,bump\n")
        self.assertEqual(digest, Digest.from_file(self.path / "nested" / "out.csv"))

    def test_write_csv_round_trip_precision(self):
        write_csv([{"x": 0.1}], self.path / "out.csv", ["x"])
        self.assertEqual(float((self.path / "out.csv").read_text().splitlines()[1]), 0.1)

    def test_write_csv_missing_column(self):
        with self.assertRaises(KeyError):
            write_csv([{"N": 16}], self.path / "out.csv", ["N", "supDiff"])

    def test_write_csv_is_deterministic(self):
        rows = [{"N": N, "value": 1.0 / N} for N in (16, 32, 64)]
        first = write_csv(rows, self.path / "a.csv", ["N", "value"])
        second = write_csv(rows, self.path / "b.csv", ["N", "value"])
        self.assertEqual(first, second)

    def test_write_json(self):
        write_json({"b": np.float64(0.5), "a": ProfileKind.GAUSSIAN, "path": self.path}, self.path / "m.json")
        document = json.loads((self.path / "m.json").read_text())
        self.assertEqual(document, {"a": "gaussian", "b": 0.5, "path": str(self.path)})
        self.assertTrue((self.path / "m.json").read_text().endswith("}\n"))

    def test_write_json_non_finite(self):
        write_json({"ratio": float("inf"), "values": [float("nan"), 1.0]}, self.path / "m.json")
        document = json.loads((self.path / "m.json").read_text())
        self.assertEqual(document["ratio"], "inf")
        self.assertEqual(document["values"], ["nan", 1.0])

    def test_write_json_unknown_type(self):
        with self.assertRaises(TypeError):
            write_json({"x": object()}, self.path / "m.json")


if __name__ == '__main__':
    unittest.main()
