#!/usr/bin/env python3
"""
Tests for the exact nullspace solver and the algebraic-relation guesser
"""

import os
import sys
import tempfile
from pathlib import Path

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest
import sympy

from app.count_cache import CountCache
from app.enumerator import count_sequence
from models.errors import InsufficientTermsError, PreconditionError
from models.guesser import (
    AnnihilatorCandidate,
    guess_annihilator,
    hermite_pade_guess,
    integer_nullspace,
    read_terms_file,
    required_terms,
    search_annihilators,
    verify_annihilator,
    write_terms_file,
)
from models.patterns import parse_descriptor
from models.series import gf_A44

FULL = os.environ.get('PAVANE_FULL_CHECKS') == '1'

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786]


def test_integer_nullspace():
    assert integer_nullspace([[1, 1]]) == [[-1, 1]]
    assert integer_nullspace([[1, 0], [0, 1]]) == []
    assert integer_nullspace([], 2) == [[1, 0], [0, 1]]
    rng = np.random.default_rng(3)
    for _ in range(40):
        rows, cols = int(rng.integers(1, 6)), int(rng.integers(1, 7))
        matrix = rng.integers(-4, 5, size=(rows, cols)).tolist()
        basis = integer_nullspace(matrix, cols)
        assert len(basis) == cols - sympy.Matrix(matrix).rank()
        for vector in basis:
            assert any(vector)
            assert all(sum(a * b for a, b in zip(row, vector)) == 0 for row in matrix)


def test_catalan_relation():
    candidate = hermite_pade_guess(CATALAN[:8], 2, 1, margin=1)
    assert candidate is not None
    assert candidate.polys == ((1,), (-1,), (0, 1))
    assert candidate.d == 2
    z, F = sympy.symbols('z F')
    assert sympy.expand(candidate.as_expression() - (z * F ** 2 - F + 1)) == 0
    assert verify_annihilator(CATALAN[:8], candidate)


def test_geometric_relation():
    candidate = hermite_pade_guess([1, 2, 4, 8, 16], 1, 1, margin=1)
    assert candidate.polys == ((-1,), (1, -2))
    assert candidate.d == 1


def test_a44_relation_from_counts():
    if FULL:
        terms = list(count_sequence(parse_descriptor("A:4"), 14).terms)
    else:
        terms = gf_A44(14).as_integers()
    candidate = hermite_pade_guess(terms, 2, 2)
    assert candidate is not None
    assert candidate.polys == ((1,), (-1, -1), (0, 2, -1))
    assert verify_annihilator(terms, candidate)


def test_no_relation_for_a55():
    if FULL:
        # The full sequence takes a while, so it is kept in a reusable cache.
        cache_dir = os.environ.get('PAVANE_CACHE') or Path(tempfile.gettempdir()) / 'pavane-test-cache'
        top = 13
        terms = list(count_sequence(parse_descriptor("A:5"), top, cache=CountCache(cache_dir), jobs=-1).terms)
    else:
        top = 9
        terms = list(count_sequence(parse_descriptor("A:5"), top).terms)
    outcome = search_annihilators(terms, 4, 8, margin=5)
    assert not outcome.found
    assert outcome.message() == f"none found: no annihilator with d <= 4, D <= 8 at {top + 1} terms"
    if FULL:
        assert outcome.tried == [(1, 0), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (4, 0)]
    else:
        assert outcome.tried == [(1, 0), (1, 1), (2, 0), (3, 0), (4, 0)]


def test_non_rational_sequence_has_no_linear_relation():
    assert hermite_pade_guess(CATALAN, 1, 3, margin=3) is None


def test_single_guess_reports_shapes():
    outcome = guess_annihilator(CATALAN[:8], 2, 1, margin=1)
    assert outcome.found
    assert outcome.tried == [(1, 0), (1, 1), (2, 0), (2, 1)]
    assert outcome.candidate == hermite_pade_guess(CATALAN[:8], 2, 1, margin=1)
    empty = guess_annihilator(CATALAN[:8], 1, 1, margin=1)
    assert not empty.found and empty.tried == [(1, 0), (1, 1)]
    with pytest.raises(InsufficientTermsError):
        guess_annihilator(CATALAN[:8], 2, 2)


def test_sweep_returns_first_shape():
    outcome = search_annihilators(CATALAN, 3, 3, margin=1)
    assert outcome.found
    assert outcome.candidate.polys == ((1,), (-1,), (0, 1))
    assert outcome.tried[-1] == (2, 1)


def test_guess_preconditions():
    with pytest.raises(InsufficientTermsError):
        hermite_pade_guess([1, 2, 3], 2, 2)
    assert required_terms(2, 2) == 14
    with pytest.raises(PreconditionError):
        hermite_pade_guess(CATALAN, 0, 1)
    with pytest.raises(PreconditionError):
        hermite_pade_guess(CATALAN, 1, 1, margin=0)


def test_verify_annihilator():
    catalan_relation = AnnihilatorCandidate(polys=((1,), (-1,), (0, 1)), D=1)
    assert verify_annihilator(CATALAN, catalan_relation)
    assert not verify_annihilator(CATALAN, AnnihilatorCandidate(polys=((-1,), (1,)), D=0))
    assert not verify_annihilator([], catalan_relation)


def test_candidate_validation_and_json():
    with pytest.raises(PreconditionError):
        AnnihilatorCandidate(polys=((2,), (4,)), D=0)
    with pytest.raises(PreconditionError):
        AnnihilatorCandidate(polys=((0,), (0, 0)), D=1)

    candidate = AnnihilatorCandidate(polys=((1,), (-1, -1), (0, 2, -1)), D=2)
    assert candidate.degree_z == 2
    assert candidate.max_coefficient == 2
    assert candidate.to_dict() == {'d': 2, 'polys': [['1'], ['-1', '-1'], ['0', '2', '-1']]}
    assert AnnihilatorCandidate.from_json(candidate.to_json()) == candidate
    plain = AnnihilatorCandidate.from_json('{"d": 1, "polys": [[-1], [1, -2]]}')
    assert plain.polys == ((-1,), (1, -2))
    with pytest.raises(PreconditionError):
        AnnihilatorCandidate.from_json('{"d": 3, "polys": [[-1], [1, -2]]}')


def test_terms_file_round_trip():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "catalan.txt"
        write_terms_file(path, CATALAN)
        assert read_terms_file(path) == CATALAN
        path.write_text("# Catalan\n1\n1\n\n2  # third\n5\n")
        assert read_terms_file(path) == [1, 1, 2, 5]
        path.write_text("1\ntwo\n")
        with pytest.raises(PreconditionError):
            read_terms_file(path)


def main():
    """Run all tests"""
    print("🚀 Starting guesser tests...\n")

    tests = [
        test_integer_nullspace,
        test_catalan_relation,
        test_geometric_relation,
        test_a44_relation_from_counts,
        test_no_relation_for_a55,
        test_non_rational_sequence_has_no_linear_relation,
        test_single_guess_reports_shapes,
        test_sweep_returns_first_shape,
        test_guess_preconditions,
        test_verify_annihilator,
        test_candidate_validation_and_json,
        test_terms_file_round_trip,
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
