#!/usr/bin/env python3
"""
Tests for the sandwich, Wilf, profile, growth and bijection reports
"""

import os
import sys
from fractions import Fraction

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import pytest

from app.analysis import (
    bijection_check,
    compute_s_sequence,
    criterion_exponent,
    direct_sum_wilf_check,
    format_significant,
    growth_report,
    regev_report,
    rlmax_profile_compare,
    sandwich_check,
    wilf_check,
)
from app.enumerator import count_avoiders
from models.errors import PreconditionError
from models.patterns import parse_descriptor
from models.permutation import parse_permutation

FULL = os.environ.get('PAVANE_FULL_CHECKS') == '1'
WILF_N = 10 if FULL else 7
PROFILE_N = 8 if FULL else 6
BIJECTION_N = 9 if FULL else 6


def cls(text):
    return parse_descriptor(text)


def test_s_sequence():
    s = compute_s_sequence(5, 6)
    assert s[:3] == [0, 0, 0]
    assert s[3] == 6
    assert s[4] == 47
    assert s[5] == 278
    assert compute_s_sequence(4, 4) == [0, 0, 2, 11, 46]
    with pytest.raises(PreconditionError):
        compute_s_sequence(3, 5)
    with pytest.raises(PreconditionError):
        compute_s_sequence(5, 2)


def test_sandwich_k5():
    report = sandwich_check(5, 10 if FULL else 7)
    assert report.passed
    assert [row['n'] for row in report.rows][0] == 3
    row = next(row for row in report.rows if row['n'] == 5)
    assert row['lower'] == '139/2'
    assert Fraction(row['lower']) == Fraction(278, 4)
    assert row['count'] == 116 and row['upper'] == 278
    assert report.to_dict()['rows'][2]['count'] == '116'
    assert list(report.to_frame().columns) == ['n', 's_n', 'lower', 'count', 'upper', 's_scaled', 'passed']


def test_sandwich_k4():
    report = sandwich_check(4, 9 if FULL else 7)
    assert report.passed
    assert report.rows[0]['n'] == 2
    assert [row['s_n'] for row in report.rows[:5]] == [2, 11, 46, 182, 724]


def test_wilf_equivalences():
    assert wilf_check(cls("A:4"), cls("B:4"), WILF_N).equal
    assert wilf_check(cls("A:5"), cls("B:5"), WILF_N).equal
    assert wilf_check(cls("mono:4"), cls("set:2134"), WILF_N).equal
    assert wilf_check(cls("mono:4"), cls("set:3214"), WILF_N).equal
    assert wilf_check(cls("mono:3"), cls("set:321"), 7).equal


def test_wilf_difference_is_reported():
    report = wilf_check(cls("A:3"), cls("mono:3"), 5)
    assert not report.equal
    assert [row['equal'] for row in report.rows] == [True, True, True, False, False, False]
    assert report.rows[4]['left'] == 8 and report.rows[4]['right'] == 14


def test_direct_sum_wilf():
    assert direct_sum_wilf_check(2, parse_permutation("12"), 7).equal
    report = direct_sum_wilf_check(3, parse_permutation("1"), 7)
    assert report.left == "set:1234" and report.right == "set:3214"
    assert report.equal
    with pytest.raises(PreconditionError):
        direct_sum_wilf_check(0, parse_permutation("1"), 3)


def test_rlmax_profiles():
    for n in range(PROFILE_N + 1):
        assert rlmax_profile_compare(cls("mono:3"), cls("set:213"), n).equal
    same = rlmax_profile_compare(cls("A:4"), cls("A:4"), 5)
    assert same.equal
    assert sum(row['left'] for row in same.rows) == count_avoiders(5, cls("A:4"))


def test_rlmax_profile_open_case_completes():
    report = rlmax_profile_compare(cls("mono:4"), cls("set:2134"), PROFILE_N)
    assert sum(row['left'] for row in report.rows) == count_avoiders(PROFILE_N, cls("mono:4"))
    assert sum(row['right'] for row in report.rows) == count_avoiders(PROFILE_N, cls("set:2134"))
    assert isinstance(report.equal, bool)
    assert report.to_dict()['configurations'] == len(report.rows)


def test_criterion_exponent():
    assert criterion_exponent(3) == (Fraction(0), False)
    assert criterion_exponent(4) == (Fraction(3, 2), False)
    assert criterion_exponent(5) == (Fraction(4), True)
    assert criterion_exponent(6) == (Fraction(15, 2), False)
    assert criterion_exponent(7) == (Fraction(12), True)


def test_format_significant():
    assert format_significant(Fraction(2)) == '2.00000'
    assert format_significant(Fraction(1, 2)) == '0.500000'
    assert format_significant(Fraction(1, 3)) == '0.333333'
    assert format_significant(116) == '116.000'
    assert format_significant(0) == '0'


def test_growth_report_k3():
    report = growth_report(3, 8)
    assert report.target == 2
    assert [row['count'] for row in report.rows] == [2 ** (n - 1) for n in range(1, 9)]
    assert all(row['ratio'] == '2.00000' for row in report.rows[1:])
    assert report.c_low == report.c_high == '0.500000'


def test_growth_report_k5():
    report = growth_report(5, 6)
    assert report.target == 10
    assert report.exponent_is_integer
    row = next(row for row in report.rows if row['n'] == 5)
    assert row['count'] == 116
    assert abs(float(row['nth_root']) - 116 ** 0.2) < 1e-4
    assert report.to_dict()['exponent'] == '4'
    with pytest.raises(PreconditionError):
        growth_report(2, 5)


def test_regev_report():
    report = regev_report(3, 6)
    assert report.target == 4
    assert report.exponent == Fraction(3, 2)
    assert [row['count'] for row in report.rows] == [1, 2, 5, 14, 42, 132]


def test_bijection_checks():
    for map_name, param in (('g', 3), ('g', 4), ('h', 4), ('h', 5)):
        report = bijection_check(map_name, param, BIJECTION_N)
        assert report.passed, report.rows
        assert [row['n'] for row in report.rows] == list(range(BIJECTION_N + 1))
        assert all(row['domain'] == row['image'] for row in report.rows)
    with pytest.raises(PreconditionError):
        bijection_check('f', 3, 4)
    with pytest.raises(PreconditionError):
        bijection_check('h', 3, 4)


def main():
    """Run all tests"""
    print("🚀 Starting analysis tests...\n")

    tests = [
        test_s_sequence,
        test_sandwich_k5,
        test_sandwich_k4,
        test_wilf_equivalences,
        test_wilf_difference_is_reported,
        test_direct_sum_wilf,
        test_rlmax_profiles,
        test_rlmax_profile_open_case_completes,
        test_criterion_exponent,
        test_format_significant,
        test_growth_report_k3,
        test_growth_report_k5,
        test_regev_report,
        test_bijection_checks,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            print(f"  ✅ {test.__name__}")
            passed += 1
        except Exception as e:
            print(f"  ❌ {test.__name__}: {e!r}")

    print(f"\n📊 Results: {passed}/{len(tests)} tests passed")
    return passed == len(tests)


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
