"""
Pattern containment and avoidance.

The generic check is a positional backtracking search; each pattern is first
compiled into a plan that, for every pattern position, names the already
matched positions holding the nearest smaller and nearest larger pattern
values. A candidate entry only has to fit strictly between the entries matched
there, so order-isomorphism is checked incrementally in O(1) per step.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from models.errors import PreconditionError
from models.patterns import PatternSet
from models.permutation import (
    Permutation,
    PermLike,
    patience_rank_vector,
    reduce_subsequence,
)


@dataclass(frozen=True)
class _MatchPlan:
    lower: Tuple[int, ...]
    upper: Tuple[int, ...]
    below_last: Tuple[bool, ...]


@lru_cache(maxsize=1024)
def _compile(q: Tuple[int, ...]) -> _MatchPlan:
    lower, upper = [], []
    for j, value in enumerate(q):
        below = [g for g in range(j) if q[g] < value]
        above = [g for g in range(j) if q[g] > value]
        lower.append(max(below, key=lambda g: q[g]) if below else -1)
        upper.append(min(above, key=lambda g: q[g]) if above else -1)
    below_last = tuple(value < q[-1] for value in q) if q else ()
    return _MatchPlan(tuple(lower), tuple(upper), below_last)


def _embeds(values: Sequence[int], q: Tuple[int, ...], anchor_last: bool) -> bool:
    """
    Search for an occurrence of q in values. With anchor_last, the last
    pattern entry must be matched to the last entry of values.
    """
    size, n = len(q), len(values)
    if size == 0:
        return True
    if size > n:
        return False
    plan = _compile(q)
    lower, upper, below_last = plan.lower, plan.upper, plan.below_last
    last_value = values[-1]
    matched = [0] * size

    def fits(j: int, value: int) -> bool:
        if lower[j] >= 0 and value < matched[lower[j]]:
            return False
        if upper[j] >= 0 and value > matched[upper[j]]:
            return False
        return True

    def extend(j: int, start: int) -> bool:
        if anchor_last and j == size - 1:
            return start <= n - 1 and fits(j, last_value)
        for t in range(start, n - (size - j) + 1):
            value = values[t]
            if anchor_last and (value < last_value) != below_last[j]:
                continue
            if not fits(j, value):
                continue
            matched[j] = value
            if j == size - 1 or extend(j + 1, t + 1):
                return True
        return False

    return extend(0, 0)


def contains(p: PermLike, q: PermLike) -> bool:
    """True iff some subsequence of p is order-isomorphic to q"""
    return _embeds(tuple(p), tuple(q), anchor_last=False)


def completes_pattern(prefix: Sequence[int], q: Tuple[int, ...]) -> bool:
    """True iff prefix has an occurrence of q that uses its last entry"""
    if not prefix:
        return False
    return _embeds(prefix, q, anchor_last=True)


def avoids_all(p: PermLike, pattern_set: PatternSet) -> bool:
    """Generic check against every pattern of the set"""
    values = tuple(p)
    return not any(_embeds(values, tuple(q), anchor_last=False)
                   for q in pattern_set.sorted_patterns())


def lis_length(p: PermLike) -> int:
    """Length of the longest increasing subsequence"""
    ranks = patience_rank_vector(p)
    return max(ranks.values, default=0)


def avoids_monotone(p: PermLike, length: int) -> bool:
    return lis_length(p) < length


def _leftmost_rank(values: Sequence[int], target: int) -> Optional[int]:
    """0-based index of the leftmost entry of rank >= target"""
    for index, rank in enumerate(patience_rank_vector(values)):
        if rank >= target:
            return index
    return None


def _is_increasing(values: Sequence[int]) -> bool:
    return all(a < b for a, b in zip(values, values[1:]))


def avoids_A_fast(p: PermLike, k: int) -> bool:
    """
    Avoidance of A_{k,k} through the front/tail structure: the entries from
    the leftmost rank-(k-1) entry onwards must increase.
    """
    if k < 3:
        raise PreconditionError(f"avoids_A_fast needs k >= 3, got {k}")
    values = tuple(p)
    split = _leftmost_rank(values, k - 1)
    if split is None:
        return True
    return _is_increasing(values[split:])


def avoids(p: PermLike, pattern_set: PatternSet) -> bool:
    """Avoidance with the structural fast path where one exists"""
    if pattern_set.kind == 'A':
        return avoids_A_fast(p, pattern_set.k)
    if pattern_set.kind == 'mono':
        return avoids_monotone(p, pattern_set.k)
    return avoids_all(p, pattern_set)


@dataclass(frozen=True)
class Decomposition:
    """
    Front/tail split of an A_{k,k}-avoider. split is 1-indexed and equals
    n+1 when there is no rank-(k-1) entry.
    """
    split: int
    front: Tuple[int, ...]
    tail: Tuple[int, ...]
    k: int

    @property
    def reduced_front(self) -> Permutation:
        return reduce_subsequence(self.front)


def decompose_front_tail(p: PermLike, k: int) -> Decomposition:
    """
    Split p at its leftmost entry of rank k-1.

    Raises:
        PreconditionError: p contains a pattern of A_{k,k}
    """
    values = tuple(p)
    if not avoids_A_fast(values, k):
        raise PreconditionError(f"{list(values)} contains a pattern of A:{k}")
    split = _leftmost_rank(values, k - 1)
    if split is None:
        return Decomposition(split=len(values) + 1, front=values, tail=(), k=k)
    return Decomposition(split=split + 1, front=values[:split], tail=values[split:], k=k)


def recompose(decomposition: Decomposition) -> Permutation:
    return Permutation(decomposition.front + decomposition.tail)


def occurrences(p: PermLike, q: PermLike) -> List[Tuple[int, ...]]:
    """All 1-indexed position tuples where q occurs in p (brute force, small inputs)"""
    values, target = tuple(p), tuple(q)
    found = []
    for positions in combinations(range(len(values)), len(target)):
        if tuple(reduce_subsequence([values[i] for i in positions])) == target:
            found.append(tuple(i + 1 for i in positions))
    return found
