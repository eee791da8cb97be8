import re
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Sequence

from models.errors import InvalidDescriptorError, InvalidPermutationError
from models.permutation import (
    Permutation,
    decreasing,
    format_permutation,
    identity,
    parse_permutation,
)

FAMILY_KINDS = ('A', 'B', 'Am', 'mono', 'wb', 'set')

_DESCRIPTOR_RE = re.compile(
    r'^(?:(?P<kind>A|B):(?P<k>\d+)'
    r'|Am:(?P<am_k>\d+):(?P<am_m>\d+)'
    r'|mono:(?P<mono>\d+)'
    r'|wb:(?P<wb_k>\d+):(?P<wb_m>\d+)'
    r'|set:(?P<set>.+))$'
)


@dataclass(frozen=True)
class PatternSet:
    """
    A finite set of forbidden patterns with the descriptor it was built from.

    kind/k/m keep the family parameters so that enumeration and containment
    can pick a structural fast path instead of the generic check.
    """
    descriptor: str
    patterns: FrozenSet[Permutation]
    kind: str = 'set'
    k: Optional[int] = None
    m: Optional[int] = None
    min_length: int = field(init=False, default=0)

    def __post_init__(self):
        if not self.patterns:
            raise InvalidDescriptorError("A pattern set needs at least one pattern")
        if any(len(q) == 0 for q in self.patterns):
            raise InvalidDescriptorError("The empty pattern is not allowed")
        if self.kind not in FAMILY_KINDS:
            raise InvalidDescriptorError(f"Unknown family kind '{self.kind}'")
        object.__setattr__(self, 'min_length', min(len(q) for q in self.patterns))

    def sorted_patterns(self) -> List[Permutation]:
        return sorted(self.patterns)

    def __str__(self) -> str:
        return self.descriptor


def _family_pattern(prefix_shape: Sequence[int], k: int, v: int) -> Permutation:
    """
    Pattern of length k ending in v whose first k-1 entries are the values
    {1..k} minus v arranged in the order given by prefix_shape (1-based ranks).
    """
    remaining = [x for x in range(1, k + 1) if x != v]
    prefix = [remaining[rank - 1] for rank in prefix_shape]
    return Permutation(tuple(prefix + [v]))


def _prefix_shape(k: int, m: int) -> List[int]:
    """Ranks m, m-1, ..., 1, m+1, ..., k-1 (m=1 gives the increasing prefix)"""
    return list(range(m, 0, -1)) + list(range(m + 1, k))


def build_pattern_set(kind: str, k: int, m: Optional[int] = None) -> PatternSet:
    """
    Build the A_{k,k}, B_{k,k} or A_{k,k,m} family.

    Args:
        kind: 'A', 'B' or 'Am'
        k: pattern length
        m: length of the reversed block (Am only)

    Returns:
        PatternSet with its canonical descriptor
    """
    if kind == 'A':
        if k < 3:
            raise InvalidDescriptorError(f"A:k needs k >= 3, got {k}")
        shape = _prefix_shape(k, 1)
        descriptor = f"A:{k}"
    elif kind == 'B':
        if k < 4:
            raise InvalidDescriptorError(f"B:k needs k >= 4, got {k}")
        shape = _prefix_shape(k, 2)
        descriptor = f"B:{k}"
    elif kind == 'Am':
        if m is None or not (1 < m < k - 1):
            raise InvalidDescriptorError(f"Am:k:m needs 1 < m < k-1, got k={k}, m={m}")
        shape = _prefix_shape(k, m)
        descriptor = f"Am:{k}:{m}"
    else:
        raise InvalidDescriptorError(f"Unknown pattern family '{kind}'")

    patterns = frozenset(_family_pattern(shape, k, v) for v in range(1, k))
    return PatternSet(descriptor=descriptor, patterns=patterns, kind=kind, k=k, m=m)


def monotone_pattern(length: int, decreasing_order: bool = False) -> Permutation:
    """12...l, or l...21 when decreasing_order is set"""
    return decreasing(length) if decreasing_order else identity(length)


def direct_sum(q: Permutation, r: Permutation) -> Permutation:
    """q ⊕ r: q on {1..|q|} followed by r shifted up by |q|"""
    shift = len(q)
    return Permutation(tuple(q) + tuple(value + shift for value in r))


def reversed_prefix_pattern(k: int, m: int) -> Permutation:
    """m(m-1)...21(m+1)...k, i.e. d_m ⊕ i_{k-m}"""
    if not (2 <= m <= k - 1):
        raise InvalidDescriptorError(f"Reversed-prefix pattern needs 2 <= m <= k-1, got k={k}, m={m}")
    return direct_sum(decreasing(m), identity(k - m))


def _canonical_set_descriptor(patterns: FrozenSet[Permutation]) -> str:
    compact = all(len(q) <= 9 for q in patterns)
    return 'set:' + ';'.join(format_permutation(q, compact=compact) for q in sorted(patterns))


def explicit_pattern_set(patterns: Sequence[Permutation]) -> PatternSet:
    frozen = frozenset(patterns)
    if not frozen:
        raise InvalidDescriptorError("set: needs at least one pattern")
    return PatternSet(descriptor=_canonical_set_descriptor(frozen), patterns=frozen)


def parse_descriptor(text: str) -> PatternSet:
    """
    Parse `A:<k>`, `B:<k>`, `Am:<k>:<m>`, `mono:<l>`, `wb:<k>:<m>` or
    `set:<p1>;<p2>;...` into a PatternSet.
    """
    text = text.strip()
    match = _DESCRIPTOR_RE.match(text)
    if not match:
        raise InvalidDescriptorError(f"Cannot parse pattern-set descriptor '{text}'")

    if match.group('kind'):
        return build_pattern_set(match.group('kind'), int(match.group('k')))
    if match.group('am_k'):
        return build_pattern_set('Am', int(match.group('am_k')), int(match.group('am_m')))
    if match.group('mono'):
        length = int(match.group('mono'))
        if length < 1:
            raise InvalidDescriptorError("mono:<l> needs l >= 1")
        return PatternSet(descriptor=f"mono:{length}",
                          patterns=frozenset([monotone_pattern(length)]),
                          kind='mono', k=length)
    if match.group('wb_k'):
        k, m = int(match.group('wb_k')), int(match.group('wb_m'))
        return PatternSet(descriptor=f"wb:{k}:{m}",
                          patterns=frozenset([reversed_prefix_pattern(k, m)]),
                          kind='wb', k=k, m=m)

    try:
        patterns = [parse_permutation(part) for part in match.group('set').split(';') if part.strip()]
    except InvalidPermutationError as e:
        raise InvalidDescriptorError(f"Bad pattern in '{text}': {e}") from e
    return explicit_pattern_set(patterns)
