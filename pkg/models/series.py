"""
Truncated formal power series with exact rational coefficients.

No floating point is used anywhere in this module.
"""
from fractions import Fraction
from math import comb
from typing import Any, Iterable, List, Optional, Sequence, Union

from models.errors import InternalInvariantError, PreconditionError

Number = Union[int, Fraction]


class TruncatedSeries:
    """
    c_0 + c_1 z + ... + c_N z^N + O(z^{N+1}).

    Arithmetic between two series requires equal truncation orders; results
    keep that order.
    """

    def __init__(self, coeffs: Iterable[Number], order: Optional[int] = None):
        values = [Fraction(c) for c in coeffs]
        if order is None:
            order = len(values) - 1
        if order < 0:
            raise PreconditionError("A truncated series needs order >= 0")
        values = values[:order + 1]
        values.extend([Fraction(0)] * (order + 1 - len(values)))
        self.coeffs = tuple(values)
        self.order = order

    @classmethod
    def zero(cls, order: int) -> 'TruncatedSeries':
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> 'TruncatedSeries':
        return cls([1], order)

    @classmethod
    def z(cls, order: int) -> 'TruncatedSeries':
        return cls([0, 1], order)

    @classmethod
    def polynomial(cls, coeffs: Sequence[Number], order: int) -> 'TruncatedSeries':
        return cls(coeffs, order)

    def __repr__(self) -> str:
        return f"TruncatedSeries({[str(c) for c in self.coeffs]}, order={self.order})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __getitem__(self, index: int) -> Fraction:
        return self.coeffs[index]

    def __len__(self) -> int:
        return self.order + 1

    def _check_same_order(self, other: 'TruncatedSeries'):
        if self.order != other.order:
            raise PreconditionError(
                f"Truncation orders differ: {self.order} vs {other.order}"
            )

    def __add__(self, other: 'TruncatedSeries') -> 'TruncatedSeries':
        self._check_same_order(other)
        return TruncatedSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __sub__(self, other: 'TruncatedSeries') -> 'TruncatedSeries':
        self._check_same_order(other)
        return TruncatedSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __neg__(self) -> 'TruncatedSeries':
        return TruncatedSeries([-c for c in self.coeffs], self.order)

    def scale(self, factor: Number) -> 'TruncatedSeries':
        factor = Fraction(factor)
        return TruncatedSeries([factor * c for c in self.coeffs], self.order)

    def __mul__(self, other: 'TruncatedSeries') -> 'TruncatedSeries':
        self._check_same_order(other)
        a, b, n = self.coeffs, other.coeffs, self.order
        product = [Fraction(0)] * (n + 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j in range(n + 1 - i):
                if b[j]:
                    product[i + j] += ai * b[j]
        return TruncatedSeries(product, n)

    def __truediv__(self, other: 'TruncatedSeries') -> 'TruncatedSeries':
        self._check_same_order(other)
        b = other.coeffs
        if b[0] == 0:
            raise PreconditionError("Division by a series with zero constant term")
        quotient: List[Fraction] = []
        for n, an in enumerate(self.coeffs):
            acc = an - sum((b[i] * quotient[n - i] for i in range(1, n + 1)), Fraction(0))
            quotient.append(acc / b[0])
        return TruncatedSeries(quotient, self.order)

    def __pow__(self, exponent: int) -> 'TruncatedSeries':
        if exponent < 0:
            raise PreconditionError("Only non-negative integer powers are supported")
        result = TruncatedSeries.one(self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def compose(self, inner: 'TruncatedSeries') -> 'TruncatedSeries':
        """self(inner(z)) by Horner's rule; inner must have zero constant term"""
        self._check_same_order(inner)
        if inner.coeffs[0] != 0:
            raise PreconditionError("Composition needs an inner series with zero constant term")
        result = TruncatedSeries([self.coeffs[-1]], self.order)
        for coeff in reversed(self.coeffs[:-1]):
            result = result * inner + TruncatedSeries([coeff], self.order)
        return result

    def sqrt(self) -> 'TruncatedSeries':
        """
        The square root with constant term 1 of a series with constant term 1.

        s_n = (a_n - sum_{i=1}^{n-1} s_i s_{n-i}) / 2
        """
        a = self.coeffs
        if a[0] != 1:
            raise PreconditionError(f"sqrt needs constant term 1, got {a[0]}")
        root = [Fraction(1)]
        for n in range(1, self.order + 1):
            acc = a[n] - sum((root[i] * root[n - i] for i in range(1, n)), Fraction(0))
            root.append(acc / 2)
        return TruncatedSeries(root, self.order)

    def shift_down(self) -> 'TruncatedSeries':
        """(self - c_0) / z, one order lower; c_0 must be zero"""
        if self.coeffs[0] != 0:
            raise PreconditionError("shift_down needs a zero constant term")
        if self.order == 0:
            raise PreconditionError("Cannot shift a series of order 0")
        return TruncatedSeries(self.coeffs[1:], self.order - 1)

    def truncate(self, order: int) -> 'TruncatedSeries':
        if order > self.order:
            raise PreconditionError(f"Cannot extend order {self.order} to {order}")
        return TruncatedSeries(self.coeffs, order)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def as_integers(self) -> List[int]:
        """Coefficients as ints; raises if any is not integral"""
        integers = []
        for c in self.coeffs:
            if c.denominator != 1:
                raise ValueError(f"Coefficient {c} is not an integer")
            integers.append(c.numerator)
        return integers


SERIES_RING_OPS = ('add', 'sub', 'mul', 'div')
SERIES_FUNCTIONAL_OPS = ('compose', 'sqrt')


def series_ring_ops(a: TruncatedSeries, b: TruncatedSeries, op: str) -> TruncatedSeries:
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    if op == 'div':
        return a / b
    raise PreconditionError(f"Unknown ring operation '{op}'")


def series_functional(a: TruncatedSeries, op: str,
                      inner: Optional[TruncatedSeries] = None) -> TruncatedSeries:
    if op == 'compose':
        if inner is None:
            raise PreconditionError("compose needs an inner series")
        return a.compose(inner)
    if op == 'sqrt':
        return a.sqrt()
    raise PreconditionError(f"Unknown functional operation '{op}'")


def gf_A44(order: int) -> TruncatedSeries:
    """
    Coefficients of (1 + z - sqrt(1 - 6z + 5z^2)) / (2(2z - z^2)) up to z^order.

    Numerator and denominator share the factor z, which is cancelled before
    the series division.
    """
    if order < 0:
        raise PreconditionError("gf_A44 needs order >= 0")
    work = order + 1
    discriminant = TruncatedSeries([1, -6, 5], work)
    numerator = TruncatedSeries([1, 1], work) - discriminant.sqrt()
    if numerator.coeffs[0] != 0:
        raise InternalInvariantError("Numerator of the A:4 closed form has a non-zero constant term")
    reduced_numerator = numerator.shift_down()
    reduced_denominator = TruncatedSeries([4, -2], order)
    return reduced_numerator / reduced_denominator


def binomial_transform(terms: Any) -> List[Number]:
    """
    b_n = sum_k C(n, k) a_k.

    Accepts a plain sequence or anything with a `terms` attribute
    (e.g. a CountSequence).
    """
    values = list(getattr(terms, 'terms', terms))
    return [sum((comb(n, k) * values[k] for k in range(n + 1)), 0) for n in range(len(values))]


def binomial_transform_identity(terms: Sequence[Number], order: Optional[int] = None) -> bool:
    """Check B(z) = 1/(1-z) * A(z/(1-z)) to the given order"""
    values = list(getattr(terms, 'terms', terms))
    if order is None:
        order = len(values) - 1
    if len(values) < order + 1:
        raise PreconditionError(f"Need {order + 1} terms, got {len(values)}")
    a = TruncatedSeries(values, order)
    one_minus_z = TruncatedSeries([1, -1], order)
    geometric = TruncatedSeries.one(order) / one_minus_z
    inner = TruncatedSeries.z(order) / one_minus_z
    expected = geometric * a.compose(inner)
    direct = TruncatedSeries(binomial_transform(values[:order + 1]), order)
    return expected == direct
