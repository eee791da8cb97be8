from bisect import bisect_left
from dataclasses import dataclass
from itertools import permutations as _itertools_permutations
from typing import Iterator, List, Optional, Sequence, Set, Tuple, Union

from models.errors import InvalidPermutationError

# Positions are 1-indexed on every public interface of this module.
Entry = Tuple[int, int]


@dataclass(frozen=True, order=True)
class Permutation:
    """
    A permutation in one-line notation p_1 p_2 ... p_n.

    Instances are immutable and hashable; ordering is lexicographic on the
    entries, which is the enumeration order used everywhere else.
    """
    entries: Tuple[int, ...] = ()

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, 'entries', entries)
        if sorted(entries) != list(range(1, len(entries) + 1)):
            raise InvalidPermutationError(
                f"{list(entries)} is not a rearrangement of 1..{len(entries)}"
            )

    @property
    def n(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __getitem__(self, index):
        return self.entries[index]

    def at(self, position: int) -> int:
        """Entry at a 1-indexed position"""
        return self.entries[position - 1]

    def __str__(self) -> str:
        return format_permutation(self)


@dataclass(frozen=True)
class StatVector:
    """Per-entry statistic (rank or co-rank), aligned with the source permutation"""
    values: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __getitem__(self, index):
        return self.values[index]

    def as_list(self) -> List[int]:
        return list(self.values)


PermLike = Union[Permutation, Sequence[int]]


def make_permutation(raw: Sequence[int]) -> Permutation:
    """
    Validate a raw integer sequence and wrap it.

    Raises:
        InvalidPermutationError: duplicates, gaps or non-positive values
    """
    values = list(raw)
    for value in values:
        if not isinstance(value, int) or isinstance(value, bool):
            raise InvalidPermutationError(f"Non-integer entry {value!r}")
        if value < 1:
            raise InvalidPermutationError(f"Non-positive entry {value}")
    if len(set(values)) != len(values):
        raise InvalidPermutationError(f"Duplicate entries in {values}")
    return Permutation(tuple(values))


def parse_values(text: str) -> Tuple[int, ...]:
    """
    Parse the text format into distinct positive integers without requiring
    them to be 1..n: comma-separated values, or a bare digit string of at
    most 9 digits (e.g. "21745").
    """
    text = text.strip()
    if not text:
        return ()
    if ',' in text:
        parts = [part.strip() for part in text.split(',')]
        if not all(parts):
            raise InvalidPermutationError(f"Empty entry in '{text}'")
        if not all(part.isdigit() for part in parts):
            raise InvalidPermutationError(f"Cannot parse permutation '{text}'")
        values = [int(part) for part in parts]
    else:
        if not text.isdigit():
            raise InvalidPermutationError(f"Cannot parse permutation '{text}'")
        if len(text) > 9:
            raise InvalidPermutationError(
                f"Bare digit strings are only accepted for n <= 9; use commas: '{text}'"
            )
        values = [int(ch) for ch in text]
    if any(value < 1 for value in values):
        raise InvalidPermutationError(f"Non-positive entry in '{text}'")
    if len(set(values)) != len(values):
        raise InvalidPermutationError(f"Duplicate entries in '{text}'")
    return tuple(values)


def parse_permutation(text: str) -> Permutation:
    """
    Parse the text format: comma-separated values, or a bare digit string
    when n <= 9 (e.g. "3752416").
    """
    return make_permutation(parse_values(text))


def format_permutation(p: PermLike, compact: Optional[bool] = None) -> str:
    """Render with commas; compact digit form only if asked and n <= 9"""
    values = list(p)
    if compact and len(values) <= 9:
        return ''.join(str(v) for v in values)
    return ','.join(str(v) for v in values)


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(1, n + 1)))


def decreasing(n: int) -> Permutation:
    return Permutation(tuple(range(n, 0, -1)))


def all_permutations(n: int) -> Iterator[Permutation]:
    """All permutations of length n in lexicographic order"""
    for entries in _itertools_permutations(range(1, n + 1)):
        yield Permutation(entries)


def _rank_values(values: Sequence[int]) -> List[int]:
    ranks: List[int] = []
    for h, value in enumerate(values):
        best = 0
        for g in range(h):
            if values[g] < value and ranks[g] > best:
                best = ranks[g]
        ranks.append(best + 1)
    return ranks


def _corank_values(values: Sequence[int]) -> List[int]:
    n = len(values)
    coranks = [0] * n
    for i in range(n - 1, -1, -1):
        best = 0
        for j in range(i + 1, n):
            if values[j] > values[i] and coranks[j] > best:
                best = coranks[j]
        coranks[i] = best + 1
    return coranks


def rank_vector(p: PermLike) -> StatVector:
    """Length of the longest increasing subsequence ending at each entry"""
    return StatVector(tuple(_rank_values(list(p))))


def patience_rank_vector(p: PermLike) -> StatVector:
    """
    O(n log n) version of rank_vector.

    tails[r] holds the smallest value ending an increasing run of length r+1;
    the slot an entry lands in is its rank minus one.
    """
    tails: List[int] = []
    ranks: List[int] = []
    for value in p:
        slot = bisect_left(tails, value)
        if slot == len(tails):
            tails.append(value)
        else:
            tails[slot] = value
        ranks.append(slot + 1)
    return StatVector(tuple(ranks))


def corank_vector(p: PermLike) -> StatVector:
    """Length of the longest increasing subsequence starting at each entry"""
    return StatVector(tuple(_corank_values(list(p))))


def right_to_left_maxima(p: PermLike) -> Set[Entry]:
    """(position, value) pairs with no larger entry further right"""
    values = list(p)
    maxima: Set[Entry] = set()
    running = 0
    for i in range(len(values) - 1, -1, -1):
        if values[i] > running:
            maxima.add((i + 1, values[i]))
            running = values[i]
    return maxima


def rightmost_descent(p: PermLike) -> Optional[int]:
    """Largest i with p_i > p_{i+1}, or None for an increasing sequence"""
    values = list(p)
    for i in range(len(values) - 2, -1, -1):
        if values[i] > values[i + 1]:
            return i + 1
    return None


def reduce_subsequence(values: Sequence[int]) -> Permutation:
    """
    The permutation order-isomorphic to a sequence of distinct integers,
    e.g. 3726 -> 2413.
    """
    values = list(values)
    if len(set(values)) != len(values):
        raise InvalidPermutationError(f"Cannot reduce a sequence with repeated values: {values}")
    order = {value: rank for rank, value in enumerate(sorted(values), start=1)}
    return Permutation(tuple(order[value] for value in values))
