#!/usr/bin/env python3
"""
Tests for truncated power series, the A:4 closed form and the binomial transform
"""

import os
import sys
from fractions import Fraction
from math import comb

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest
import sympy

from app.enumerator import count_sequence
from models.errors import PreconditionError
from models.guesser import AnnihilatorCandidate, verify_annihilator
from models.patterns import parse_descriptor
from models.series import (
    TruncatedSeries,
    binomial_transform,
    binomial_transform_identity,
    gf_A44,
    series_functional,
    series_ring_ops,
)

FULL = os.environ.get('PAVANE_FULL_CHECKS') == '1'
RANDOM_ORDER = 30 if FULL else 12
RANDOM_SERIES = 100 if FULL else 20
ENUMERATION_N = 12 if FULL else 8

A44_RELATION = AnnihilatorCandidate(polys=((1,), (-1, -1), (0, 2, -1)), D=2)


def series(*coeffs, order=None):
    return TruncatedSeries(coeffs, order)


def random_series(rng, order, constant=None):
    coeffs = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))) for _ in range(order + 1)]
    if constant is not None:
        coeffs[0] = Fraction(constant)
    return TruncatedSeries(coeffs, order)


def test_ring_examples():
    geometric = series(1, 1, 1, 1)
    assert series_ring_ops(geometric, series(1, -1, 0, 0), 'mul') == series(1, 0, 0, 0)
    a = series(2, 3, 5, 7)
    assert series_ring_ops(a, a, 'div') == series(1, 0, 0, 0)
    assert series_ring_ops(series(1, 1), series(1, 1), 'mul') == series(1, 2)
    assert series_ring_ops(a, a, 'sub').is_zero()
    assert series_ring_ops(a, a, 'add') == a.scale(2)
    with pytest.raises(PreconditionError):
        series_ring_ops(a, series(0, 1, 0, 0), 'div')
    with pytest.raises(PreconditionError):
        series_ring_ops(a, series(1, 1), 'add')
    with pytest.raises(PreconditionError):
        series_ring_ops(a, a, 'pow')


def test_functional_examples():
    assert series_functional(series(1, -6, 5, 0), 'sqrt') == series(1, -3, -2, -6)
    identity_outer = series(0, 1, 0, 0)
    inner = series(0, 1, 0, 0) / series(1, -1, 0, 0)
    assert series_functional(identity_outer, 'compose', inner) == series(0, 1, 1, 1)
    assert series_functional(series(1, 0, 0), 'sqrt') == series(1, 0, 0)
    with pytest.raises(PreconditionError):
        series_functional(identity_outer, 'compose', series(1, 1, 0, 0))
    with pytest.raises(PreconditionError):
        series_functional(series(4, 1, 0), 'sqrt')
    with pytest.raises(PreconditionError):
        series_functional(identity_outer, 'compose')


def test_coefficients_stay_exact():
    third = series(Fraction(1, 3), Fraction(2, 3))
    product = third * third
    assert product.coeffs == (Fraction(1, 9), Fraction(4, 9))
    assert all(isinstance(c, Fraction) for c in product.coeffs)


def test_random_round_trips():
    rng = np.random.default_rng(31)
    for _ in range(RANDOM_SERIES):
        a = random_series(rng, RANDOM_ORDER)
        b = random_series(rng, RANDOM_ORDER, constant=int(rng.integers(1, 5)))
        assert (a / b) * b == a
        root_base = random_series(rng, RANDOM_ORDER, constant=1)
        root = root_base.sqrt()
        assert root * root == root_base
        assert root[0] == 1


def test_gf_a44_examples():
    assert gf_A44(5).as_integers() == [1, 1, 2, 6, 21, 79]
    assert gf_A44(0).as_integers() == [1]
    assert gf_A44(6)[6] == 311
    with pytest.raises(PreconditionError):
        gf_A44(-1)


def test_gf_a44_matches_enumeration():
    counts = count_sequence(parse_descriptor("A:4"), ENUMERATION_N).terms
    assert tuple(gf_A44(ENUMERATION_N).as_integers()) == counts


def test_gf_a44_satisfies_its_relation():
    terms = gf_A44(30).as_integers()
    assert all(t >= 0 for t in terms)
    assert verify_annihilator(terms, A44_RELATION)


def test_gf_a44_matches_symbolic_expansion():
    z = sympy.symbols('z')
    closed_form = (1 + z - sympy.sqrt(1 - 6 * z + 5 * z ** 2)) / (2 * (2 * z - z ** 2))
    expansion = sympy.series(closed_form, z, 0, 10).removeO()
    expected = [int(expansion.coeff(z, n)) for n in range(10)]
    assert gf_A44(9).as_integers() == expected


def test_binomial_transform():
    assert binomial_transform([1] * 8) == [2 ** n for n in range(8)]
    assert binomial_transform([1, 0, 0, 0, 0]) == [1] * 5
    assert binomial_transform([]) == []
    mono4 = count_sequence(parse_descriptor("mono:4"), 6)
    direct = [sum(comb(n, i) * mono4.terms[i] for i in range(n + 1)) for n in range(7)]
    assert binomial_transform(mono4) == direct


def test_binomial_transform_identity():
    rng = np.random.default_rng(5)
    order = 20 if FULL else 10
    for _ in range(50 if FULL else 10):
        terms = [int(v) for v in rng.integers(-20, 21, size=order + 1)]
        assert binomial_transform_identity(terms, order)
    with pytest.raises(PreconditionError):
        binomial_transform_identity([1, 2], 5)


def main():
    """Run all tests"""
    print("🚀 Starting series tests...\n")

    tests = [
        test_ring_examples,
        test_functional_examples,
        test_coefficients_stay_exact,
        test_random_round_trips,
        test_gf_a44_examples,
        test_gf_a44_matches_enumeration,
        test_gf_a44_satisfies_its_relation,
        test_gf_a44_matches_symbolic_expansion,
        test_binomial_transform,
        test_binomial_transform_identity,
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
