"""
Desk-scale checks of counting relations between pattern classes.

Every check returns a report object whose rows can be turned into a pandas
DataFrame; pass/fail is a field of the report, never an exception.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Tuple

import pandas as pd
from joblib import Parallel, delayed

from app.enumerator import count_sequence, enumerate_avoiders
from models.bijections import g_inverse, g_map, h_inverse, h_map
from models.errors import InternalInvariantError, PreconditionError
from models.patterns import (
    PatternSet,
    build_pattern_set,
    direct_sum,
    explicit_pattern_set,
    monotone_pattern,
    parse_descriptor,
)
from models.permutation import (
    Permutation,
    corank_vector,
    format_permutation,
    right_to_left_maxima,
    rightmost_descent,
)
from models.series import binomial_transform

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 6
_WORK_PRECISION = 40


def _to_decimal(value) -> Decimal:
    if isinstance(value, Fraction):
        return Decimal(value.numerator) / Decimal(value.denominator)
    return Decimal(value)


def format_significant(value, digits: int = SIGNIFICANT_DIGITS) -> str:
    """Decimal string with `digits` significant digits, e.g. 2.58807"""
    with localcontext() as ctx:
        ctx.prec = _WORK_PRECISION
        exact = _to_decimal(value)
        if exact == 0:
            return '0'
        with localcontext() as rounded_ctx:
            rounded_ctx.prec = digits
            rounded = +exact
        return f"{rounded:.{max(digits - 1 - rounded.adjusted(), 0)}f}"


def nth_root(count: int, n: int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = _WORK_PRECISION
        return Decimal(count) ** (Decimal(1) / Decimal(n))


def _fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _counts(pattern_set: PatternSet, max_n: int, cache=None, jobs: int = 1,
            force: bool = False) -> List[int]:
    return list(count_sequence(pattern_set, max_n, cache=cache, jobs=jobs, force=force).terms)


def compute_s_sequence(k: int, max_n: int, cache=None, jobs: int = 1, force: bool = False) -> List[int]:
    """
    s_n = sum_{i=k-2}^{n} C(n, i) f_i for n = 0..max_n, with f_i = |Av_i(12...(k-1))|.

    Computed as the binomial transform of f with terms below k-2 zeroed, and
    cross-checked against the direct sum.
    """
    if k < 4:
        raise PreconditionError(f"compute_s_sequence needs k >= 4, got {k}")
    if max_n < k - 2:
        raise PreconditionError(f"compute_s_sequence needs N >= k-2 = {k - 2}, got {max_n}")
    f = _counts(parse_descriptor(f"mono:{k - 1}"), max_n, cache, jobs, force)
    shifted = [value if i >= k - 2 else 0 for i, value in enumerate(f)]
    s = binomial_transform(shifted)
    for n in range(max_n + 1):
        direct = sum(comb(n, i) * f[i] for i in range(k - 2, n + 1))
        if direct != s[n]:
            raise InternalInvariantError(f"Binomial transform disagrees with the direct sum at n={n}")
    return [int(value) for value in s]


def criterion_exponent(k: int) -> Tuple[Fraction, bool]:
    """e = (k^2 - 4k + 3)/2 and whether it is a positive integer"""
    e = Fraction(k * k - 4 * k + 3, 2)
    return e, e.denominator == 1 and e > 0


def growth_target(k: int) -> int:
    return (k - 2) ** 2 + 1


def _normalized(count: int, n: int, e: Fraction, base: int) -> Decimal:
    """count * n^e / base^n"""
    with localcontext() as ctx:
        ctx.prec = _WORK_PRECISION
        return Decimal(count) * (Decimal(n) ** _to_decimal(e)) / (Decimal(base) ** n)


@dataclass
class SandwichReport:
    k: int
    rows: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row['passed'] for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=['n', 's_n', 'lower', 'count', 'upper', 's_scaled', 'passed'])

    def to_dict(self) -> dict:
        return {'k': self.k, 'passed': self.passed, 'rows': _stringify_rows(self.rows)}


def sandwich_check(k: int, max_n: int, cache=None, jobs: int = 1, force: bool = False) -> SandwichReport:
    """
    s_n/(k-1) <= |Av_n(A_{k,k})| <= s_n for every n in k-2..max_n.

    The factor 1/(k-1) is the generalisation of the k=5 factor 1/4 and is
    under test here, not assumed.
    """
    if k < 4:
        raise PreconditionError(f"sandwich_check needs k >= 4, got {k}")
    s = compute_s_sequence(k, max(max_n, k - 2), cache, jobs, force)
    counts = _counts(build_pattern_set('A', k), max_n, cache, jobs, force)
    e, _ = criterion_exponent(k)
    base = growth_target(k)

    report = SandwichReport(k=k)
    for n in range(k - 2, max_n + 1):
        lower = Fraction(s[n], k - 1)
        passed = lower <= counts[n] <= s[n]
        if not passed:
            logger.error("Sandwich fails for k=%d n=%d: %s <= %d <= %d", k, n, lower, counts[n], s[n])
        report.rows.append({
            'n': n,
            's_n': s[n],
            'lower': _fraction_text(lower),
            'count': counts[n],
            'upper': s[n],
            's_scaled': format_significant(_normalized(s[n], n, e, base)) if n > 0 else '',
            'passed': passed,
        })
    return report


@dataclass
class WilfReport:
    left: str
    right: str
    rows: List[Dict] = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return all(row['equal'] for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=['n', 'left', 'right', 'equal'])

    def to_dict(self) -> dict:
        return {'left': self.left, 'right': self.right, 'equal': self.equal,
                'rows': _stringify_rows(self.rows)}


def wilf_check(left: PatternSet, right: PatternSet, max_n: int, cache=None, jobs: int = 1,
               force: bool = False) -> WilfReport:
    """Compare |Av_n(S)| and |Av_n(T)| for n = 0..max_n"""
    left_counts = _counts(left, max_n, cache, jobs, force)
    right_counts = _counts(right, max_n, cache, jobs, force)
    report = WilfReport(left=left.descriptor, right=right.descriptor)
    for n, (a, b) in enumerate(zip(left_counts, right_counts)):
        report.rows.append({'n': n, 'left': a, 'right': b, 'equal': a == b})
    logger.info("Wilf check %s vs %s up to n=%d: %s", left, right, max_n,
                'equal' if report.equal else 'different')
    return report


def direct_sum_patterns(m: int, q: Permutation) -> Tuple[PatternSet, PatternSet]:
    """({12...m ⊕ q}, {m...21 ⊕ q})"""
    if m < 1:
        raise PreconditionError(f"direct-sum patterns need m >= 1, got {m}")
    left = explicit_pattern_set([direct_sum(monotone_pattern(m), q)])
    right = explicit_pattern_set([direct_sum(monotone_pattern(m, decreasing_order=True), q)])
    return left, right


def direct_sum_wilf_check(m: int, q: Permutation, max_n: int, cache=None, jobs: int = 1,
                          force: bool = False) -> WilfReport:
    """Wilf check between 12...m ⊕ q and m...21 ⊕ q"""
    left, right = direct_sum_patterns(m, q)
    return wilf_check(left, right, max_n, cache, jobs, force)


def _configuration_key(p: Permutation) -> str:
    return ' '.join(f"({pos},{value})" for pos, value in sorted(right_to_left_maxima(p)))


def rlmax_profile(pattern_set: PatternSet, n: int) -> Counter:
    """Multiset of right-to-left-maxima configurations over Av_n(S)"""
    return Counter(_configuration_key(p) for p in enumerate_avoiders(n, pattern_set))


@dataclass
class ProfileReport:
    left: str
    right: str
    n: int
    rows: List[Dict] = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return all(row['left'] == row['right'] for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=['configuration', 'left', 'right'])

    def to_dict(self) -> dict:
        return {'left': self.left, 'right': self.right, 'n': self.n, 'equal': self.equal,
                'configurations': len(self.rows), 'rows': _stringify_rows(self.rows)}


def rlmax_profile_compare(left: PatternSet, right: PatternSet, n: int) -> ProfileReport:
    """
    Equal profiles are necessary for a bijection Av_n(S) -> Av_n(T) that
    fixes every right-to-left maximum. A match is evidence, not proof.
    """
    if n < 0:
        raise PreconditionError(f"n must be >= 0, got {n}")
    left_profile = rlmax_profile(left, n)
    right_profile = left_profile if left == right else rlmax_profile(right, n)
    report = ProfileReport(left=left.descriptor, right=right.descriptor, n=n)
    for key in sorted(set(left_profile) | set(right_profile)):
        report.rows.append({'configuration': key, 'left': left_profile[key], 'right': right_profile[key]})
    logger.info("Profile %s vs %s at n=%d: %d configurations, %s", left, right, n,
                len(report.rows), 'equal' if report.equal else 'different')
    return report


@dataclass
class GrowthReport:
    """Finite-range diagnostics only; nothing here is asserted"""
    k: int
    target: int
    exponent: Fraction
    exponent_is_integer: bool
    rows: List[Dict] = field(default_factory=list)
    c_low: Optional[str] = None
    c_high: Optional[str] = None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=['n', 'count', 'nth_root', 'ratio', 'normalized'])

    def to_dict(self) -> dict:
        return {
            'k': self.k,
            'target': self.target,
            'exponent': _fraction_text(self.exponent),
            'exponent_is_integer': self.exponent_is_integer,
            'c_low': self.c_low,
            'c_high': self.c_high,
            'rows': _stringify_rows(self.rows),
        }


def _growth_rows(counts: List[int], e: Fraction, base: int) -> Tuple[List[Dict], Optional[str], Optional[str]]:
    rows, normalized_values = [], []
    for n in range(1, len(counts)):
        normalized = _normalized(counts[n], n, e, base)
        normalized_values.append(normalized)
        rows.append({
            'n': n,
            'count': counts[n],
            'nth_root': format_significant(nth_root(counts[n], n)),
            'ratio': format_significant(Fraction(counts[n], counts[n - 1])) if n >= 2 else '',
            'normalized': format_significant(normalized),
        })
    if not normalized_values:
        return rows, None, None
    return rows, format_significant(min(normalized_values)), format_significant(max(normalized_values))


def growth_report(k: int, max_n: int, cache=None, jobs: int = 1, force: bool = False) -> GrowthReport:
    """
    Counts of Av_n(A_{k,k}) with nth roots, successive ratios and the window
    constants min/max of count * n^e / K^n, K = (k-2)^2 + 1.
    """
    if k < 3:
        raise PreconditionError(f"growth_report needs k >= 3, got {k}")
    counts = _counts(build_pattern_set('A', k), max_n, cache, jobs, force)
    e, integral = criterion_exponent(k)
    base = growth_target(k)
    rows, c_low, c_high = _growth_rows(counts, e, base)
    return GrowthReport(k=k, target=base, exponent=e, exponent_is_integer=integral,
                        rows=rows, c_low=c_low, c_high=c_high)


def regev_report(k: int, max_n: int, cache=None, jobs: int = 1, force: bool = False) -> GrowthReport:
    """
    Av_n(12...k) normalised by n^{(k^2-2k)/2} / (k-1)^{2n}. The limit constant
    is not estimated; the rows are diagnostics.
    """
    if k < 2:
        raise PreconditionError(f"regev_report needs k >= 2, got {k}")
    counts = _counts(parse_descriptor(f"mono:{k}"), max_n, cache, jobs, force)
    e = Fraction(k * k - 2 * k, 2)
    base = (k - 1) ** 2
    rows, c_low, c_high = _growth_rows(counts, e, base)
    return GrowthReport(k=k, target=base, exponent=e, exponent_is_integer=e.denominator == 1,
                        rows=rows, c_low=c_low, c_high=c_high)


BIJECTION_MAPS = ('g', 'h')


def bijection_classes(map_name: str, param: int):
    if map_name == 'g':
        if param < 3:
            raise PreconditionError(f"g needs l >= 3, got {param}")
        source = parse_descriptor(f"mono:{param}")
        target = explicit_pattern_set([direct_sum(Permutation((2, 1)), monotone_pattern(param - 2))])
        return source, target, g_map, g_inverse
    if map_name == 'h':
        if param < 4:
            raise PreconditionError(f"h needs k >= 4, got {param}")
        return build_pattern_set('A', param), build_pattern_set('B', param), h_map, h_inverse
    raise PreconditionError(f"Unknown bijection '{map_name}', expected one of {BIJECTION_MAPS}")


def _bijection_row(map_name: str, param: int, n: int) -> Dict:
    source, target, forward, backward = bijection_classes(map_name, param)
    domain = list(enumerate_avoiders(n, source))
    images = [forward(p, param) for p in domain]
    image_set = set(images)
    target_set = set(enumerate_avoiders(n, target))

    roundtrip_failures = sum(1 for p, w in zip(domain, images) if backward(w, param) != p)
    structure_failures = 0
    for p, w in zip(domain, images):
        if map_name == 'g':
            coranks = corank_vector(p).as_list()
            if any(corank <= param - 2 and p[i] != w[i] for i, corank in enumerate(coranks)):
                structure_failures += 1
        elif rightmost_descent(p) != rightmost_descent(w):
            structure_failures += 1

    row = {
        'n': n,
        'domain': len(domain),
        'image': len(image_set),
        'injective': len(image_set) == len(domain),
        'onto_target': image_set == target_set,
        'roundtrip_failures': roundtrip_failures,
        'structure_failures': structure_failures,
    }
    row['passed'] = (row['injective'] and row['onto_target']
                     and roundtrip_failures == 0 and structure_failures == 0)
    if not row['passed']:
        offenders = sorted(image_set ^ target_set)[:3]
        logger.error("Bijection %s(%d) fails at n=%d; sample symmetric difference: %s", map_name, param, n,
                     [format_permutation(p) for p in offenders])
    return row


@dataclass
class BijectionReport:
    map_name: str
    param: int
    rows: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row['passed'] for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=['n', 'domain', 'image', 'injective', 'onto_target',
                                                'roundtrip_failures', 'structure_failures', 'passed'])

    def to_dict(self) -> dict:
        return {'map': self.map_name, 'param': self.param, 'passed': self.passed,
                'rows': _stringify_rows(self.rows)}


def bijection_check(map_name: str, param: int, max_n: int, jobs: int = 1) -> BijectionReport:
    """
    Exhaustive check of g (co-rank fixation) or h (rightmost descent kept):
    injective, onto the target class and inverted by the inverse map.
    """
    bijection_classes(map_name, param)
    if max_n < 0:
        raise PreconditionError(f"max_n must be >= 0, got {max_n}")
    rows = Parallel(n_jobs=jobs)(delayed(_bijection_row)(map_name, param, n) for n in range(max_n + 1))
    return BijectionReport(map_name=map_name, param=param, rows=sorted(rows, key=lambda row: row['n']))


def _stringify_rows(rows: List[Dict]) -> List[Dict]:
    """Integers become decimal strings; flags and text pass through"""
    return [
        {key: str(value) if isinstance(value, int) and not isinstance(value, bool) else value
         for key, value in row.items()}
        for row in rows
    ]
