"""Exact counting for the Klainerman-Machedon board game.

An admissible map sends l in {k+1, ..., k+j} to mu(l) in {1, ..., l-1}; it is reduced when
mu is nondecreasing. Reduced maps inject into strictly increasing sequences s in
{1, ..., k+2j-2}^j through s(a) = mu(k+a) + a - 1.
"""
import itertools
import logging
import math
from functools import lru_cache
from typing import Iterator, NamedTuple, Optional

from attrs import define, field, validators

from ..base.interface import BaseInterface
from ..base.exceptions import BoardGameRangeException, SequenceException


logger = logging.getLogger(__name__)

__MAX_RANGE__ = 8


def _check_range(k: int, j: int) -> None:
    if not (1 <= k <= __MAX_RANGE__ and 1 <= j <= __MAX_RANGE__):
        raise BoardGameRangeException(f"(k, j) = ({k}, {j}) is outside 1 <= k, j <= {__MAX_RANGE__}")


@define(frozen=True, slots=True, weakref_slot=False)
class AdmissibleMap(BaseInterface):
    """mu(k+1), ..., mu(k+j) with 1 <= mu(l) < l

    Args:
        k (int): The number of initial particles
        j (int): The number of Duhamel iterations
        values (tuple[int, ...]): mu(k+1), ..., mu(k+j)

    Raises:
        SequenceException: If a value breaks admissibility or the length is not j

    Examples:
        >>> AdmissibleMap(2, 2, (1, 3)).reduced
        True
    """
    k: int = field(validator=[validators.instance_of(int), validators.ge(1)])
    j: int = field(validator=[validators.instance_of(int), validators.ge(1)])
    values: tuple[int, ...] = field(converter=lambda value: tuple(int(item) for item in value))

    def __attrs_post_init__(self):
        if len(self.values) != self.j:
            raise SequenceException(f"Expected {self.j} values, got {len(self.values)}")
        for offset, mu in enumerate(self.values, start=1):
            if not 1 <= mu < self.k + offset:
                raise SequenceException(f"mu({self.k + offset}) = {mu} is not in 1..{self.k + offset - 1}")

    @property
    def reduced(self) -> bool:
        return all(a <= b for a, b in zip(self.values, self.values[1:]))

    def __call__(self, l: int) -> int:
        return self.values[l - self.k - 1]


def admissible_count(k: int, j: int) -> int:
    """prod_{l=k+1}^{k+j} (l - 1) = (k+j-1)! / (k-1)!"""
    return math.factorial(k + j - 1) // math.factorial(k - 1)


def catalan_bound(k: int, j: int) -> int:
    """binom(k + 2j - 2, j)"""
    return math.comb(k + 2 * j - 2, j)


def power_bound(k: int, j: int) -> int:
    """2^(k + 2j - 2)"""
    return 2 ** (k + 2 * j - 2)


def iter_admissible(k: int, j: int) -> Iterator[AdmissibleMap]:
    """Lazily yields every admissible map in lexicographic order"""
    _check_range(k, j)
    for values in itertools.product(*(range(1, l) for l in range(k + 1, k + j + 1))):
        yield AdmissibleMap(k, j, values)


def enumerate_admissible(k: int, j: int) -> list[AdmissibleMap]:
    """Every admissible map; there are prod (l - 1) of them

    Raises:
        BoardGameRangeException: Outside 1 <= k, j <= 8
    """
    return list(iter_admissible(k, j))


@lru_cache(maxsize=None)
def _count_nondecreasing(k: int, j: int, a: int, floor: int) -> int:
    """Ways to fill mu(k+a..k+j) nondecreasingly with mu(k+a) >= floor"""
    if a > j:
        return 1
    return sum(_count_nondecreasing(k, j, a + 1, mu) for mu in range(floor, k + a))


def count_reduced(k: int, j: int) -> int:
    """The number of reduced (nondecreasing) admissible maps

    Raises:
        BoardGameRangeException: Outside 1 <= k, j <= 8
    """
    _check_range(k, j)
    return _count_nondecreasing(k, j, 1, 1)


def map_to_sequence(mu: AdmissibleMap) -> tuple[int, ...]:
    """s(a) = mu(k+a) + a - 1

    Raises:
        SequenceException: If mu is not reduced
    """
    if not mu.reduced:
        raise SequenceException(f"{mu.values} is not nondecreasing")
    return tuple(value + a - 1 for a, value in enumerate(mu.values, start=1))


def sequence_to_map(s: tuple[int, ...], k: int, j: int) -> Optional[AdmissibleMap]:
    """mu(k+a) = s(a) - a + 1, or None when the result is not admissible

    Raises:
        SequenceException: If s is not a strictly increasing sequence of j values in 1..k+2j-2
    """
    s = tuple(int(item) for item in s)
    if len(s) != j:
        raise SequenceException(f"Expected {j} values, got {len(s)}")
    if any(a >= b for a, b in zip(s, s[1:])):
        raise SequenceException(f"{s} is not strictly increasing")
    if s[0] < 1 or s[-1] > k + 2 * j - 2:
        raise SequenceException(f"{s} leaves 1..{k + 2 * j - 2}")
    values = tuple(value - a + 1 for a, value in enumerate(s, start=1))
    if any(mu >= k + a for a, mu in enumerate(values, start=1)):
        return None
    return AdmissibleMap(k, j, values)


def iter_sequences(k: int, j: int) -> Iterator[tuple[int, ...]]:
    """Every strictly increasing j-sequence in 1..k+2j-2"""
    return itertools.combinations(range(1, k + 2 * j - 1), j)


class BoardGameRow(NamedTuple):
    """One row of the counting table
    """
    k: int
    j: int
    admissible_count: int
    reduced_count: int
    catalan_bound: int
    power_bound: int


def boardgame_table(k_max: int, j_max: int) -> list[BoardGameRow]:
    """Counts for every 1 <= k <= k_max, 1 <= j <= j_max"""
    _check_range(k_max, j_max)
    return [
        BoardGameRow(k, j, admissible_count(k, j), count_reduced(k, j), catalan_bound(k, j), power_bound(k, j))
        for k in range(1, k_max + 1) for j in range(1, j_max + 1)]


@define(frozen=True, slots=True, weakref_slot=False)
class BoardGameVerification(BaseInterface):
    """Exhaustive checks at one (k, j)

    Args:
        k (int): k
        j (int): j
        enumerated (int): Admissible maps found by enumeration
        reduced (int): Reduced maps found by enumeration
        rejects (int): Sequences rejected by sequence_to_map
        passed (bool): Every identity and bound holds exactly
    """
    k: int
    j: int
    enumerated: int
    reduced: int
    rejects: int
    passed: bool


def verify_counts(k: int, j: int) -> BoardGameVerification:
    """Enumerates maps and sequences and checks the counts, bounds and both roundtrips exactly"""
    maps = enumerate_admissible(k, j)
    reduced = [mu for mu in maps if mu.reduced]
    roundtrip_maps = all(sequence_to_map(map_to_sequence(mu), k, j) == mu for mu in reduced)
    rejects, accepted = 0, set()
    roundtrip_sequences = True
    for s in iter_sequences(k, j):
        mu = sequence_to_map(s, k, j)
        if mu is None:
            rejects += 1
            continue
        accepted.add(mu.values)
        roundtrip_sequences = roundtrip_sequences and map_to_sequence(mu) == s
    passed = (
        len(maps) == admissible_count(k, j)
        and len(reduced) == count_reduced(k, j)
        and len(reduced) <= catalan_bound(k, j) <= power_bound(k, j)
        and len(reduced) + rejects == catalan_bound(k, j)
        and accepted == {mu.values for mu in reduced}
        and roundtrip_maps and roundtrip_sequences)
    if not passed:
        logger.warning("Board-game counts failed at (k, j) = (%d, %d)", k, j)
    return BoardGameVerification(k, j, len(maps), len(reduced), rejects, bool(passed))
