"""
Algebraic-relation guessing for integer sequences.

Given terms a_0..a_N of F(z) = sum a_n z^n, look for integer polynomials
P_0..P_d of degree <= D in z with sum_i P_i(z) F(z)^i = O(z^{N+1}). The
coefficients of the P_i are the unknowns of an exact linear system, solved by
fraction-free elimination over the integers.

Finding nothing is a statement about the searched shapes and the available
terms only; it says nothing about algebraicity.
"""
import json
import logging
from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from models.errors import InsufficientTermsError, InternalInvariantError, PreconditionError
from models.series import TruncatedSeries

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 5


def _content(values) -> int:
    return reduce(gcd, (abs(int(v)) for v in values), 0)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def integer_nullspace(matrix: Sequence[Sequence[int]], ncols: Optional[int] = None) -> List[List[int]]:
    """
    Basis of the rational nullspace of an integer matrix, as primitive
    integer vectors.

    Gauss-Jordan elimination with cross-multiplication instead of division;
    every touched row is divided by its content to keep entries small.
    """
    rows = [list(row) for row in matrix]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]

    M = np.array(rows, dtype=object)
    nrows = M.shape[0]
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        candidates = [i for i in range(r, nrows) if M[i, col] != 0]
        if not candidates:
            continue
        best = min(candidates, key=lambda i: abs(M[i, col]))
        if best != r:
            M[[r, best]] = M[[best, r]]
        if M[r, col] < 0:
            M[r] = -M[r]
        row_content = _content(M[r])
        if row_content > 1:
            M[r] = M[r] // row_content
        for i in range(nrows):
            if i != r and M[i, col] != 0:
                M[i] = M[r, col] * M[i] - M[i, col] * M[r]
                other_content = _content(M[i])
                if other_content > 1:
                    M[i] = M[i] // other_content
        pivots.append(col)
        r += 1

    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        scale = 1
        for t, pc in enumerate(pivots):
            if M[t, free] != 0:
                scale = _lcm(scale, int(M[t, pc]))
        vector = [0] * ncols
        vector[free] = scale
        for t, pc in enumerate(pivots):
            if M[t, free] != 0:
                vector[pc] = -int(M[t, free]) * scale // int(M[t, pc])
        vector_content = _content(vector)
        basis.append([v // vector_content for v in vector])
    return basis


@dataclass(frozen=True)
class AnnihilatorCandidate:
    """
    sum_i P_i(z) F^i with integer polynomials given by coefficient lists
    (lowest degree first). d is the degree in F, D the degree bound in z.
    """
    polys: Tuple[Tuple[int, ...], ...]
    D: int
    d: int = field(init=False, default=0)

    def __post_init__(self):
        polys = [tuple(int(c) for c in poly) for poly in self.polys]
        while polys and not any(polys[-1]):
            polys.pop()
        if not polys:
            raise PreconditionError("An annihilator needs at least one non-zero coefficient")
        if _content(c for poly in polys for c in poly) != 1:
            raise PreconditionError("Annihilator coefficients must have content 1")
        polys = [_trim(poly) for poly in polys]
        object.__setattr__(self, 'polys', tuple(polys))
        object.__setattr__(self, 'd', len(polys) - 1)

    @property
    def degree_z(self) -> int:
        return max(len(poly) - 1 for poly in self.polys)

    @property
    def max_coefficient(self) -> int:
        return max(abs(c) for poly in self.polys for c in poly)

    def as_expression(self) -> sympy.Expr:
        z, F = sympy.symbols('z F')
        return sympy.expand(sum(
            sum(c * z ** j for j, c in enumerate(poly)) * F ** i
            for i, poly in enumerate(self.polys)
        ))

    def describe(self) -> str:
        return str(self.as_expression())

    def to_dict(self) -> dict:
        return {'d': self.d, 'polys': [[str(c) for c in poly] for poly in self.polys]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> 'AnnihilatorCandidate':
        polys = tuple(tuple(int(c) for c in poly) for poly in data['polys'])
        degree_bound = data.get('D', max(len(poly) - 1 for poly in polys) if polys else 0)
        candidate = cls(polys=polys, D=int(degree_bound))
        if 'd' in data and int(data['d']) != candidate.d:
            raise PreconditionError(f"Declared d={data['d']} does not match {candidate.d} polynomials")
        return candidate

    @classmethod
    def from_json(cls, text: str) -> 'AnnihilatorCandidate':
        return cls.from_dict(json.loads(text))


def _trim(poly: Tuple[int, ...]) -> Tuple[int, ...]:
    poly = list(poly)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly) if poly else (0,)


def _normalize_sign(polys: List[List[int]]) -> List[List[int]]:
    """Make the lowest non-zero coefficient of the top polynomial positive"""
    top = next(poly for poly in reversed(polys) if any(poly))
    lead = next(c for c in top if c != 0)
    if lead < 0:
        return [[-c for c in poly] for poly in polys]
    return polys


def _powers(terms: Sequence[int], d: int) -> List[List[int]]:
    order = len(terms) - 1
    F = TruncatedSeries(terms, order)
    powers, current = [], TruncatedSeries.one(order)
    for _ in range(d + 1):
        powers.append(current.as_integers())
        current = current * F
    return powers


def _system(powers: List[List[int]], d: int, D: int) -> List[List[int]]:
    """Row n: coefficient of z^n in sum_{i,j} p_{ij} z^j F^i, columns ordered (i, j)"""
    n_terms = len(powers[0])
    return [
        [powers[i][n - j] if n >= j else 0 for i in range(d + 1) for j in range(D + 1)]
        for n in range(n_terms)
    ]


def _solve_shape(powers: List[List[int]], d: int, D: int) -> Optional[AnnihilatorCandidate]:
    basis = integer_nullspace(_system(powers, d, D), (d + 1) * (D + 1))
    if not basis:
        return None
    candidates = []
    for vector in basis:
        polys = [vector[i * (D + 1):(i + 1) * (D + 1)] for i in range(d + 1)]
        candidates.append(AnnihilatorCandidate(polys=tuple(map(tuple, _normalize_sign(polys))), D=D))
    return min(candidates, key=lambda c: (c.d, c.degree_z, c.max_coefficient))


def _check_terms(terms: Sequence[int]) -> List[int]:
    values = []
    for term in terms:
        if int(term) != term:
            raise PreconditionError(f"Guessing needs integer terms, got {term}")
        values.append(int(term))
    return values


def required_terms(d: int, D: int, margin: int = DEFAULT_MARGIN) -> int:
    return (d + 1) * (D + 1) + margin


def hermite_pade_guess(terms: Sequence[int], d: int, D: int,
                       margin: int = DEFAULT_MARGIN) -> Optional[AnnihilatorCandidate]:
    """
    Search for an annihilator with degree <= d in F and <= D in z.

    Shapes are tried in order of increasing degree in F, then in z, so the
    first relation found is the minimal one; within one shape the basis
    vector with the smallest coefficients wins.

    Raises:
        InsufficientTermsError: fewer than (d+1)(D+1) + margin terms
    """
    return guess_annihilator(terms, d, D, margin).candidate


def guess_annihilator(terms: Sequence[int], d: int, D: int,
                      margin: int = DEFAULT_MARGIN) -> 'GuessOutcome':
    """hermite_pade_guess, keeping the shapes tried alongside the result"""
    if d < 1 or D < 0:
        raise PreconditionError(f"Need d >= 1 and D >= 0, got d={d}, D={D}")
    if margin < 1:
        raise PreconditionError("The equation surplus must be at least 1")
    values = _check_terms(terms)
    needed = required_terms(d, D, margin)
    if len(values) < needed:
        raise InsufficientTermsError(
            f"{len(values)} terms for d={d}, D={D}: need at least {needed} "
            f"({(d + 1) * (D + 1)} unknowns + margin {margin})"
        )
    # Every smaller shape is feasible too, so the sweep skips nothing here.
    return search_annihilators(values, d, D, margin)


def verify_annihilator(terms: Sequence[int], candidate: AnnihilatorCandidate) -> bool:
    """True iff sum_i P_i(z) F^i vanishes up to the last available term"""
    order = len(terms) - 1
    if order < 0:
        return False
    F = TruncatedSeries(terms, order)
    residual = TruncatedSeries.zero(order)
    power = TruncatedSeries.one(order)
    for poly in candidate.polys:
        residual = residual + TruncatedSeries.polynomial(poly, order) * power
        power = power * F
    return residual.is_zero()


@dataclass
class GuessOutcome:
    candidate: Optional[AnnihilatorCandidate]
    n_terms: int
    max_d: int
    max_D: int
    tried: List[Tuple[int, int]]

    @property
    def found(self) -> bool:
        return self.candidate is not None

    def message(self) -> str:
        if self.candidate is not None:
            return f"annihilator found: {self.candidate.describe()}"
        return f"none found: no annihilator with d <= {self.max_d}, D <= {self.max_D} at {self.n_terms} terms"

    def to_dict(self) -> dict:
        return {
            'found': self.found,
            'n_terms': self.n_terms,
            'max_d': self.max_d,
            'max_D': self.max_D,
            'tried': [list(shape) for shape in self.tried],
            'candidate': self.candidate.to_dict() if self.candidate else None,
            'expression': self.candidate.describe() if self.candidate else None,
            'message': self.message(),
        }


def search_annihilators(terms: Sequence[int], max_d: int, max_D: int,
                        margin: int = DEFAULT_MARGIN) -> GuessOutcome:
    """
    Try every shape (d, D) with d <= max_d and D <= max_D that leaves at
    least `margin` surplus equations, in (d, D) order.
    """
    values = _check_terms(terms)
    tried: List[Tuple[int, int]] = []
    powers = _powers(values, max_d)
    for d in range(1, max_d + 1):
        for D in range(max_D + 1):
            if len(values) < required_terms(d, D, margin):
                continue
            tried.append((d, D))
            candidate = _solve_shape(powers, d, D)
            if candidate is not None:
                if not verify_annihilator(values, candidate):
                    raise InternalInvariantError(f"Nullspace vector fails verification: {candidate.describe()}")
                logger.info("Sweep found annihilator at d=%d, D=%d", d, D)
                return GuessOutcome(candidate, len(values), max_d, max_D, tried)
    logger.info("Sweep over %d shapes found nothing", len(tried))
    return GuessOutcome(None, len(values), max_d, max_D, tried)


def read_terms_file(path: Union[str, Path]) -> List[int]:
    """One integer per line, index 0 first; blank lines and '#' comments ignored"""
    terms = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        try:
            terms.append(int(line))
        except ValueError as e:
            raise PreconditionError(f"{path}:{line_no}: not an integer: '{line}'") from e
    return terms


def write_terms_file(path: Union[str, Path], terms: Sequence[int]):
    Path(path).write_text(''.join(f"{int(t)}\n" for t in terms))
