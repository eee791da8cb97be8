"""
Exhaustive enumeration and counting of Av_n(S).

Permutations are built left to right in lexicographic order. A prefix is
pruned as soon as its newest entry completes a forbidden pattern, so only
occurrences ending at the new position are ever searched for.
"""
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from joblib import Parallel, delayed

from app import validation
from models.containment import completes_pattern
from models.errors import PreconditionError
from models.patterns import PatternSet
from models.permutation import Permutation

logger = logging.getLogger(__name__)

# Largest n enumerated without --force-max-n
LIBRARY_MAX_N_GENERIC = 13
LIBRARY_MAX_N_A_FAMILY = 14
CLI_MAX_N_GENERIC = 12
CLI_MAX_N_A_FAMILY = 13


class _GenericPruner:
    """Rejects an entry that completes any pattern of the set"""

    forced_tail = False

    def __init__(self, pattern_set: PatternSet):
        self.patterns = [tuple(q) for q in pattern_set.sorted_patterns()]

    def accepts(self, prefix: List[int]) -> bool:
        size = len(prefix)
        return not any(len(q) <= size and completes_pattern(prefix, q) for q in self.patterns)

    def retract(self):
        pass


class _RankPruner:
    """
    Tracks the rank of every placed entry.

    With a monotone limit, an entry of rank >= limit is rejected. With an
    A_{k,k} split rank, once an entry of rank >= k-1 has been placed every
    later entry must exceed its predecessor.
    """

    def __init__(self, monotone_limit: Optional[int] = None, split_rank: Optional[int] = None):
        self.monotone_limit = monotone_limit
        self.split_rank = split_rank
        self.ranks: List[int] = []
        self.split: Optional[int] = None

    def accepts(self, prefix: List[int]) -> bool:
        value = prefix[-1]
        if self.split is not None and value < prefix[-2]:
            return False
        best = 0
        for earlier, rank in zip(prefix, self.ranks):
            if earlier < value and rank > best:
                best = rank
        rank = best + 1
        if self.monotone_limit is not None and rank >= self.monotone_limit:
            return False
        self.ranks.append(rank)
        if self.split is None and self.split_rank is not None and rank >= self.split_rank:
            self.split = len(self.ranks) - 1
        return True

    @property
    def forced_tail(self) -> bool:
        """After the split the rest of an avoider is increasing"""
        return self.split is not None

    def retract(self):
        self.ranks.pop()
        if self.split == len(self.ranks):
            self.split = None


def _make_pruner(pattern_set: PatternSet):
    if pattern_set.kind == 'A':
        return _RankPruner(split_rank=pattern_set.k - 1)
    if pattern_set.kind == 'mono':
        return _RankPruner(monotone_limit=pattern_set.k)
    patterns = pattern_set.sorted_patterns()
    if len(patterns) == 1 and tuple(patterns[0]) == tuple(range(1, len(patterns[0]) + 1)):
        return _RankPruner(monotone_limit=len(patterns[0]))
    return _GenericPruner(pattern_set)


class AvoiderSearch:
    """Depth-first search over prefixes of Av_n(S), optionally with a fixed first entry"""

    def __init__(self, n: int, pattern_set: PatternSet):
        if n < 0:
            raise PreconditionError(f"n must be >= 0, got {n}")
        self.n = n
        self.pattern_set = pattern_set

    def _walk(self, first: Optional[int]) -> Iterator[Tuple[int, ...]]:
        n = self.n
        if n == 0:
            yield ()
            return
        pruner = _make_pruner(self.pattern_set)
        prefix: List[int] = []
        used = [False] * (n + 1)

        def extend() -> Iterator[Tuple[int, ...]]:
            if len(prefix) == n:
                yield tuple(prefix)
                return
            if pruner.forced_tail:
                # Only the increasing completion survives, and only if it
                # starts above the last placed entry.
                rest = [v for v in range(1, n + 1) if not used[v]]
                if rest[0] > prefix[-1]:
                    yield tuple(prefix) + tuple(rest)
                return
            values = range(1, n + 1) if prefix or first is None else (first,)
            for value in values:
                if used[value]:
                    continue
                prefix.append(value)
                if pruner.accepts(prefix):
                    used[value] = True
                    yield from extend()
                    used[value] = False
                    pruner.retract()
                prefix.pop()

        yield from extend()

    def iterate(self, first: Optional[int] = None) -> Iterator[Permutation]:
        for entries in self._walk(first):
            yield Permutation(entries)

    def count(self, first: Optional[int] = None) -> int:
        return sum(1 for _ in self._walk(first))


def enumerate_avoiders(n: int, pattern_set: PatternSet) -> Iterator[Permutation]:
    """Av_n(S) in lexicographic order"""
    return AvoiderSearch(n, pattern_set).iterate()


def _count_subtree(n: int, pattern_set: PatternSet, first: int) -> int:
    return AvoiderSearch(n, pattern_set).count(first)


def count_avoiders_parallel(n: int, pattern_set: PatternSet, jobs: int = -1) -> int:
    """Count Av_n(S) with one task per first entry, summed at the end"""
    if n < 0:
        raise PreconditionError(f"n must be >= 0, got {n}")
    if n == 0:
        return 1
    partial = Parallel(n_jobs=jobs)(
        delayed(_count_subtree)(n, pattern_set, first) for first in range(1, n + 1)
    )
    return sum(partial)


def count_avoiders(n: int, pattern_set: PatternSet, jobs: int = 1) -> int:
    """|Av_n(S)| without materialising the avoiders"""
    if jobs != 1 and n >= 2:
        return count_avoiders_parallel(n, pattern_set, jobs)
    return AvoiderSearch(n, pattern_set).count()


def check_ceiling(n: int, pattern_set: PatternSet, limit: Optional[int] = None,
                  force: bool = False, cli: bool = False):
    """
    Raises:
        ResourceCeilingError: n above the ceiling and not forced
    """
    if limit is not None:
        validation.check_ceiling(n, pattern_set, limit, limit, force)
    elif cli:
        validation.check_ceiling(n, pattern_set, CLI_MAX_N_GENERIC, CLI_MAX_N_A_FAMILY, force)
    else:
        validation.check_ceiling(n, pattern_set, LIBRARY_MAX_N_GENERIC, LIBRARY_MAX_N_A_FAMILY, force)


@dataclass(frozen=True)
class CountSequence:
    descriptor: str
    terms: Tuple[int, ...]

    @property
    def max_n(self) -> int:
        return len(self.terms) - 1

    def __getitem__(self, n: int) -> int:
        return self.terms[n]

    def __len__(self) -> int:
        return len(self.terms)

    def to_dict(self) -> dict:
        return {'class': self.descriptor, 'terms': [str(t) for t in self.terms]}


def count_sequence(pattern_set: PatternSet, max_n: int, cache=None, jobs: int = 1,
                   limit: Optional[int] = None, force: bool = False,
                   cli: bool = False) -> CountSequence:
    """
    |Av_n(S)| for n = 0..max_n.

    Args:
        pattern_set: class to count
        max_n: last n
        cache: optional CountCache; hits are reused, misses recorded
        jobs: joblib n_jobs for each count

    Returns:
        CountSequence
    """
    if max_n < 0:
        raise PreconditionError(f"max_n must be >= 0, got {max_n}")
    check_ceiling(max_n, pattern_set, limit, force, cli)

    descriptor = pattern_set.descriptor
    terms = []
    for n in range(max_n + 1):
        cached = cache.lookup(descriptor, n) if cache is not None else None
        if cached is not None:
            logger.debug("Cache hit %s n=%d", descriptor, n)
            terms.append(cached)
            continue
        count = count_avoiders(n, pattern_set, jobs)
        logger.info("Counted %s n=%d: %d", descriptor, n, count)
        if cache is not None:
            cache.record(descriptor, n, count)
        terms.append(count)
    return CountSequence(descriptor, tuple(terms))
