"""
Co-rank preserving bijections.

g_map sends Av_n(12...l) to Av_n(213...l) keeping every entry of co-rank
<= l-2 in place; h_map sends Av_n(A_{k,k}) to Av_n(B_{k,k}) by applying g
(with l = k-1) to the part up to the rightmost descent.

Both maps work on literal values, so they can be applied to a prefix of a
permutation without reducing it first.
"""
import logging
from typing import List, Sequence, Tuple, Union

from models.containment import avoids_A_fast, avoids_all, lis_length
from models.errors import InternalInvariantError, InvalidPermutationError, PreconditionError
from models.patterns import (
    build_pattern_set,
    direct_sum,
    explicit_pattern_set,
    monotone_pattern,
)
from models.permutation import Permutation, PermLike, corank_vector, rightmost_descent

logger = logging.getLogger(__name__)

MapResult = Union[Permutation, Tuple[int, ...]]


def _distinct_values(p: PermLike) -> Tuple[int, ...]:
    values = tuple(p)
    if any(not isinstance(v, int) or isinstance(v, bool) or v < 1 for v in values):
        raise InvalidPermutationError(f"Expected positive integers, got {list(values)}")
    if len(set(values)) != len(values):
        raise InvalidPermutationError(f"Duplicate entries in {list(values)}")
    return values


def _as_result(values: Tuple[int, ...]) -> MapResult:
    """A Permutation when the values are 1..n, the literal tuple otherwise"""
    if sorted(values) == list(range(1, len(values) + 1)):
        return Permutation(values)
    return values


def _corank_against_suffix(value: int, later_values: Sequence[int], later_coranks: Sequence[int]) -> int:
    best = 0
    for other, corank in zip(later_values, later_coranks):
        if other > value and corank > best:
            best = corank
    return best + 1


def _fixed_mask(values: Sequence[int], ell: int) -> List[bool]:
    return [corank <= ell - 2 for corank in corank_vector(values).as_list()]


def _g_values(values: Tuple[int, ...], ell: int) -> Tuple[int, ...]:
    n = len(values)
    original_coranks = corank_vector(values).as_list()
    fixed = [corank <= ell - 2 for corank in original_coranks]
    unused = sorted((values[i] for i in range(n) if not fixed[i]), reverse=True)

    result = [0] * n
    result_coranks = [0] * n
    # Right to left: the suffix is final when a slot is decided.
    for s in range(n - 1, -1, -1):
        later_values = result[s + 1:]
        later_coranks = result_coranks[s + 1:]
        if fixed[s]:
            corank = _corank_against_suffix(values[s], later_values, later_coranks)
            if corank != original_coranks[s]:
                raise InternalInvariantError(
                    f"g_map moved the co-rank of fixed entry {values[s]} at position {s + 1} "
                    f"from {original_coranks[s]} to {corank}"
                )
            result[s], result_coranks[s] = values[s], corank
            continue

        for candidate in unused:
            corank = _corank_against_suffix(candidate, later_values, later_coranks)
            if corank >= ell - 1:
                result[s], result_coranks[s] = candidate, corank
                unused.remove(candidate)
                break
        else:
            raise InternalInvariantError(
                f"g_map found no placeable value at position {s + 1} of {list(values)} (l={ell})"
            )
    return tuple(result)


def _g_inverse_values(values: Tuple[int, ...], ell: int) -> Tuple[int, ...]:
    fixed = _fixed_mask(values, ell)
    remaining = iter(sorted((v for v, keep in zip(values, fixed) if not keep), reverse=True))
    return tuple(v if keep else next(remaining) for v, keep in zip(values, fixed))


def _check_ell(ell: int):
    if ell < 3:
        raise PreconditionError(f"The g bijection needs l >= 3, got {ell}")


def g_map(p: PermLike, ell: int) -> MapResult:
    """
    Av_n(12...l) -> Av_n(213...l).

    Entries of co-rank <= l-2 stay put; every other slot, from right to left,
    receives the largest unused value whose co-rank there is >= l-1.
    """
    _check_ell(ell)
    values = _distinct_values(p)
    if lis_length(values) >= ell:
        raise PreconditionError(f"g_map needs an avoider of 12...{ell}, got {list(values)}")
    return _as_result(_g_values(values, ell))


def g_inverse(w: PermLike, ell: int) -> MapResult:
    """
    Av_n(213...l) -> Av_n(12...l): keep entries of co-rank <= l-2, write the
    rest into the free slots in decreasing order.
    """
    _check_ell(ell)
    values = _distinct_values(w)
    target = direct_sum(Permutation((2, 1)), monotone_pattern(ell - 2))
    if not avoids_all(values, explicit_pattern_set([target])):
        raise PreconditionError(f"g_inverse needs an avoider of {target}, got {list(values)}")
    return _as_result(_g_inverse_values(values, ell))


def _check_k(k: int):
    if k < 4:
        raise PreconditionError(f"The h bijection needs k >= 4, got {k}")


def h_map(p: PermLike, k: int) -> MapResult:
    """
    Av_n(A_{k,k}) -> Av_n(B_{k,k}): apply g (l = k-1) to p_1..p_i where i is
    the rightmost descent, keep the increasing run after it.
    """
    _check_k(k)
    values = _distinct_values(p)
    if not avoids_A_fast(values, k):
        raise PreconditionError(f"h_map needs an avoider of A:{k}, got {list(values)}")
    i = rightmost_descent(values)
    if i is None:
        return _as_result(values)
    prefix = values[:i]
    if lis_length(prefix) >= k - 1:
        raise InternalInvariantError(
            f"Prefix {list(prefix)} before the rightmost descent contains 12...{k - 1}"
        )
    return _as_result(_g_values(prefix, k - 1) + values[i:])


def h_inverse(w: PermLike, k: int) -> MapResult:
    """Av_n(B_{k,k}) -> Av_n(A_{k,k}), splitting at the rightmost descent of w"""
    _check_k(k)
    values = _distinct_values(w)
    if not avoids_all(values, build_pattern_set('B', k)):
        raise PreconditionError(f"h_inverse needs an avoider of B:{k}, got {list(values)}")
    i = rightmost_descent(values)
    if i is None:
        return _as_result(values)
    return _as_result(_g_inverse_values(values[:i], k - 1) + values[i:])
