import unittest
import sys
import random
from pathlib import Path

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.biscatter.pool import SweepPool, SweepEntry, SweepKey


__RANGE__ = 200


def _entry(N, seed=0, q=1.0, sup_diff=1e-3):
    return SweepEntry(N, seed, q, sup_diff, 1e-14, 1e-8)


class TestSweepPool(unittest.TestCase):
    def setUp(self):
        self.entry = _entry(64)

    def test_init(self):
        pool = SweepPool((self.entry, ))
        self.assertEqual(pool.entries, (self.entry, ))
        self.assertEqual(len(pool), 1)

    def test_init_with_bad_type(self):
        self.assertRaises(TypeError, SweepPool, ([self.entry], ))
        self.assertRaises(ValueError, SweepPool, ((64, 0, 1.0), ))
        self.assertRaises(TypeError, SweepPool, ((64.0, 0, 1.0, 0.1, 0.0, 0.0), ))

    def test_pool_has_slots(self):
        self.assertEqual(SweepPool().__slots__, ('entries', ))

    def test_check_if_exists(self):
        pool = SweepPool((self.entry, ))
        self.assertTrue(pool.check_if_exists(SweepKey(64, 0, 1.0)))
        self.assertFalse(pool.check_if_exists(SweepKey(64, 1, 1.0)))

    def test_add_and_get(self):
        pool = SweepPool()
        pool.add_entry(self.entry)
        self.assertEqual(pool.get_entry(SweepKey(64, 0, 1.0)).sup_diff, 1e-3)

    def test_add_duplicate(self):
        pool = SweepPool()
        pool.add_entry(self.entry)
        with self.assertRaises(ValueError):
            pool.add_entry(_entry(64, sup_diff=2e-3))

    def test_add_bad_type(self):
        with self.assertRaises(TypeError):
            SweepPool().add_entry((64, 0, 1.0, 1e-3, 0.0, 0.0))

    def test_get_missing(self):
        with self.assertRaises(ValueError):
            SweepPool().get_entry(SweepKey(16, 0, 1.0))

    def test_order_does_not_depend_on_arrival(self):
        keys = [(2 ** e, seed, q) for e in range(4, 9) for seed in range(4) for q in (0.5, 1.0)]
        expected = sorted(keys)
        for _ in range(5):
            random.shuffle(keys)
            pool = SweepPool()
            for N, seed, q in keys:
                pool.add_entry(SweepEntry(N, seed, q, 1.0 / N, 0.0, 0.0))
            self.assertEqual([tuple(entry.key) for entry in pool.ordered()], expected)
            self.assertEqual([tuple(entry.key) for entry in pool], expected)

    def test_samples(self):
        pool = SweepPool()
        for N in (256, 16, 64):
            pool.add_entry(_entry(N, sup_diff=1.0 / N))
        self.assertEqual(pool.samples(), [(16, 1 / 16), (64, 1 / 64), (256, 1 / 256)])

    def test_many_entries(self):
        pool = SweepPool()
        for i in range(__RANGE__):
            pool.add_entry(_entry(16, seed=i, sup_diff=random.random()))
        self.assertEqual(len(pool), __RANGE__)
        self.assertEqual([entry.seed for entry in pool], list(range(__RANGE__)))


if __name__ == '__main__':
    unittest.main()
