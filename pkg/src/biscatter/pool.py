from attrs import define, field, validators, Factory
from typing import NamedTuple, Tuple, Iterator


class SweepKey(NamedTuple):
    """The deterministic ordering key of a sweep element
    """
    N: int
    seed: int
    q: float


class SweepEntry(NamedTuple):
    """One finished sweep element
    """
    N: int
    seed: int
    q: float
    sup_diff: float
    mass_drift_max: float
    energy_drift_max: float

    @property
    def key(self) -> SweepKey:
        return SweepKey(self.N, self.seed, self.q)


def _validate_sweep_entry(instance, attr, value: SweepEntry) -> None:
    if not isinstance(value, tuple):
        raise TypeError(f'Expected tuple, got {type(value)}')

    if len(value) != 6:
        raise ValueError(f'Expected tuple of length 6, got {len(value)}')

    if not isinstance(value[0], int) or isinstance(value[0], bool):
        raise TypeError(f'Expected int N, got {type(value[0])}')

    if not isinstance(value[1], int) or isinstance(value[1], bool):
        raise TypeError(f'Expected int seed, got {type(value[1])}')


@define(slots=True, weakref_slot=False)
class SweepPool:
    """The SweepPool collects finished sweep elements, whatever order they arrive in

    Args:
        entries (tuple[SweepEntry, ...]): The entries held by the pool
            structure: ((N, seed, q, sup_diff, mass_drift_max, energy_drift_max), ...)

    Examples:
        >>> pool = SweepPool()
        >>> pool.add_entry(SweepEntry(64, 0, 1.0, 1e-3, 1e-14, 1e-8))
        >>> pool.get_entry(SweepKey(64, 0, 1.0)).sup_diff
        0.001
    """
    entries: Tuple[SweepEntry, ...] = field(
        default=Factory(tuple),
        validator=validators.optional(validators.deep_iterable(_validate_sweep_entry,
        iterable_validator=validators.instance_of(tuple))))

    def check_if_exists(self, key: SweepKey) -> bool:
        """Check if an entry with this key exists in the pool

        Args:
            key (SweepKey): The (N, seed, q) key

        Returns:
            bool: True if the entry exists, False otherwise
        """
        return any(SweepEntry(*entry).key == key for entry in self.entries)

    def add_entry(self, entry: SweepEntry) -> None:
        """Add an entry to the pool

        Args:
            entry (SweepEntry): The entry to add

        Raises:
            TypeError: If entry is not a SweepEntry
            ValueError: If an entry with the same key already exists
        """
        if not isinstance(entry, SweepEntry):
            raise TypeError(f'Expected SweepEntry, got {type(entry)}')

        if self.check_if_exists(entry.key):
            raise ValueError(f'Entry with key {tuple(entry.key)} already exists in the SweepPool')

        self.entries += (entry, )

    def get_entry(self, key: SweepKey) -> SweepEntry:
        """Get an entry from the pool

        Raises:
            ValueError: If no entry has this key
        """
        for entry in self.entries:
            if SweepEntry(*entry).key == key:
                return SweepEntry(*entry)
        raise ValueError(f'Entry with key {tuple(key)} does not exist in the SweepPool')

    def ordered(self) -> tuple[SweepEntry, ...]:
        """The entries sorted by (N, seed, q)"""
        return tuple(sorted((SweepEntry(*entry) for entry in self.entries), key=lambda entry: tuple(entry.key)))

    def samples(self) -> list[tuple[int, float]]:
        """(N, sup_diff) pairs in key order"""
        return [(entry.N, entry.sup_diff) for entry in self.ordered()]

    def __iter__(self) -> Iterator[SweepEntry]:
        """Iterate over the entries in key order
        """
        return iter(self.ordered())

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self):
        return f'SweepPool(entries={self.entries})'
