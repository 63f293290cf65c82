"""Exact real algebraic numbers.

A value is either a rational (fast path) or an irreducible integer
polynomial of degree >= 2 together with a rational open interval on whose
endpoints the polynomial has opposite signs and which contains exactly one
of its roots.  Because the defining polynomial is irreducible, two values
are equal iff they share the polynomial and their intervals can be merged
into one that still holds a single root.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from functools import cmp_to_key, lru_cache, total_ordering
from math import isqrt
from typing import Callable, Iterator, Union

from ..errors import DivisionByZero, NegativeRadicand, ParseError
from .poly import (
    IntPolynomial,
    count_roots_closed,
    factor_irreducible,
    isolate_squarefree,
    product_polynomial,
    sum_polynomial,
)


class Ordering(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


Number = Union["RealAlgebraic", Fraction, int]


@total_ordering
class RealAlgebraic:
    __slots__ = ("_q", "_poly", "_lo", "_hi", "_slo")

    def __init__(self, value: Fraction | int | str = 0):
        self._q: Fraction | None = Fraction(value)
        self._poly: IntPolynomial | None = None
        self._lo = self._hi = self._q
        self._slo = 0

    # -- construction -----------------------------------------------------

    @classmethod
    def _irrational(cls, poly: IntPolynomial, lo: Fraction, hi: Fraction) -> "RealAlgebraic":
        obj = cls.__new__(cls)
        obj._q = None
        obj._poly = poly
        obj._lo = Fraction(lo)
        obj._hi = Fraction(hi)
        obj._slo = poly.sign_at(obj._lo)
        if obj._slo == 0 or poly.sign_at(obj._hi) != -obj._slo:
            raise ValueError("interval endpoints must bracket a simple root")
        return obj

    @classmethod
    def root_of(cls, poly: IntPolynomial, lo: Fraction, hi: Fraction) -> "RealAlgebraic":
        """The unique root of ``poly`` in the closed interval [lo, hi].

        ``poly`` need not be irreducible or squarefree; it must however have
        exactly one distinct real root in the interval.
        """
        lo, hi = Fraction(lo), Fraction(hi)
        found = []
        for f in factor_irreducible(poly):
            k = count_roots_closed(f, lo, hi)
            found.extend([f] * k)
        if len(found) != 1:
            raise ValueError(f"{len(found)} roots of {poly} in [{lo}, {hi}]")
        f = found[0]
        if f.degree == 1:
            return cls(Fraction(-f.coeffs[0], f.coeffs[1]))
        return cls._irrational(f, lo, hi)

    @classmethod
    def coerce(cls, x: Number) -> "RealAlgebraic":
        return x if isinstance(x, RealAlgebraic) else cls(x)

    # -- inspection -------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self._q is not None

    @property
    def rational(self) -> Fraction:
        if self._q is None:
            raise ValueError("not a rational number")
        return self._q

    @property
    def poly(self) -> IntPolynomial:
        """Minimal polynomial (primitive, positive leading coefficient)."""
        if self._q is not None:
            return IntPolynomial.linear_root(self._q)
        return self._poly

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self._lo, self._hi

    @property
    def degree(self) -> int:
        return 1 if self._q is not None else self._poly.degree

    # -- refinement -------------------------------------------------------

    def _bisect(self) -> "RealAlgebraic":
        mid = (self._lo + self._hi) / 2
        s = self._poly.sign_at(mid)
        if s == 0:  # pragma: no cover - impossible for irreducible degree >= 2
            return RealAlgebraic(mid)
        obj = RealAlgebraic.__new__(RealAlgebraic)
        obj._q, obj._poly, obj._slo = None, self._poly, self._slo
        if s == self._slo:
            obj._lo, obj._hi = mid, self._hi
        else:
            obj._lo, obj._hi = self._lo, mid
        return obj

    def refined(self, width: Fraction) -> "RealAlgebraic":
        """Same value with an isolating interval no wider than ``width``."""
        x = self
        while x._q is None and x._hi - x._lo > width:
            x = x._bisect()
        return x

    def refinements(self) -> Iterator["RealAlgebraic"]:
        """Endless stream of successively halved representations."""
        x = self
        while True:
            yield x
            if x._q is None:
                x = x._bisect()

    def bracket(self, width: Fraction) -> tuple[Fraction, Fraction]:
        x = self.refined(width)
        return x._lo, x._hi

    def approx(self, width: Fraction = Fraction(1, 2**64)) -> Fraction:
        lo, hi = self.bracket(width)
        return (lo + hi) / 2

    def __float__(self) -> float:
        return float(self.approx(Fraction(1, 2**60)))

    def _sign_definite(self) -> "RealAlgebraic":
        x = self
        while x._q is None and x._lo <= 0 <= x._hi:
            x = x._bisect()
        return x

    def sign(self) -> int:
        if self._q is not None:
            return (self._q > 0) - (self._q < 0)
        x = self._sign_definite()
        return 1 if x._lo > 0 else -1

    def is_zero(self) -> bool:
        return self._q is not None and self._q == 0

    # -- comparison -------------------------------------------------------

    def compare(self, other: Number) -> Ordering:
        return compare(self, RealAlgebraic.coerce(other))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self._q is not None and self._q == other
        if not isinstance(other, RealAlgebraic):
            return NotImplemented
        return compare(self, other) is Ordering.EQ

    def __lt__(self, other: Number) -> bool:
        if not isinstance(other, (RealAlgebraic, int, Fraction)):
            return NotImplemented
        return self.compare(other) is Ordering.LT

    def __hash__(self) -> int:
        if self._q is not None:
            return hash(self._q)
        return hash(self._poly.coeffs)

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "RealAlgebraic":
        if self._q is not None:
            return RealAlgebraic(-self._q)
        return RealAlgebraic._irrational(self._poly.negate_variable(), -self._hi, -self._lo)

    def __add__(self, other: Number) -> "RealAlgebraic":
        if not isinstance(other, (RealAlgebraic, int, Fraction)):
            return NotImplemented
        return add(self, RealAlgebraic.coerce(other))

    __radd__ = __add__

    def __sub__(self, other: Number) -> "RealAlgebraic":
        if not isinstance(other, (RealAlgebraic, int, Fraction)):
            return NotImplemented
        return add(self, -RealAlgebraic.coerce(other))

    def __rsub__(self, other: Number) -> "RealAlgebraic":
        return add(RealAlgebraic.coerce(other), -self)

    def __mul__(self, other: Number) -> "RealAlgebraic":
        if not isinstance(other, (RealAlgebraic, int, Fraction)):
            return NotImplemented
        return mul(self, RealAlgebraic.coerce(other))

    __rmul__ = __mul__

    def inverse(self) -> "RealAlgebraic":
        return inv(self)

    def __truediv__(self, other: Number) -> "RealAlgebraic":
        if not isinstance(other, (RealAlgebraic, int, Fraction)):
            return NotImplemented
        return mul(self, inv(RealAlgebraic.coerce(other)))

    def __rtruediv__(self, other: Number) -> "RealAlgebraic":
        return mul(RealAlgebraic.coerce(other), inv(self))

    def __pow__(self, k: int) -> "RealAlgebraic":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return inv(self) ** (-k)
        result = RealAlgebraic(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __abs__(self) -> "RealAlgebraic":
        return -self if self.sign() < 0 else self

    def sqrt(self) -> "RealAlgebraic":
        return sqrt_nonneg(self)

    # -- text ---------------------------------------------------------------

    def to_json(self) -> str | dict:
        if self._q is not None:
            return str(self._q)
        return {"poly": list(self._poly.coeffs), "interval": [str(self._lo), str(self._hi)]}

    @classmethod
    def from_json(cls, obj, field: str | None = None) -> "RealAlgebraic":
        if isinstance(obj, bool):
            raise ParseError("booleans are not numbers", field)
        if isinstance(obj, int):
            return cls(obj)
        if isinstance(obj, float):
            raise ParseError(f"inexact number {obj!r}; write rationals as strings such as \"3/2\"", field)
        if isinstance(obj, str):
            try:
                return cls(Fraction(obj.strip()))
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"bad rational {obj!r}", field) from exc
        if isinstance(obj, dict):
            if set(obj) != {"poly", "interval"}:
                raise ParseError("algebraic numbers need exactly 'poly' and 'interval'", field)
            try:
                poly = IntPolynomial(tuple(int(c) for c in obj["poly"]))
                lo, hi = (Fraction(str(v)) for v in obj["interval"])
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"malformed algebraic number {obj!r}", field) from exc
            if poly.degree < 1:
                raise ParseError("defining polynomial must be nonconstant", field)
            try:
                return cls.root_of(poly, lo, hi)
            except ValueError as exc:
                raise ParseError(str(exc), field) from exc
        raise ParseError(f"cannot read a number from {obj!r}", field)

    def __repr__(self) -> str:
        if self._q is not None:
            return f"RealAlgebraic({str(self._q)!r})"
        return f"RealAlgebraic(root of {self._poly} in ({self._lo}, {self._hi}) ~ {float(self):.12g})"

    def __str__(self) -> str:
        if self._q is not None:
            return str(self._q)
        return f"~{float(self):.12g}"


# ---------------------------------------------------------------------------
# exact operations


def compare(x: RealAlgebraic, y: RealAlgebraic) -> Ordering:
    if x._q is not None and y._q is not None:
        return Ordering((x._q > y._q) - (x._q < y._q))
    if x._q is not None:
        return Ordering(-compare(y, x))
    if y._q is not None:
        q = y._q
        while x._lo <= q <= x._hi:
            x = x._bisect()
        return Ordering.GT if x._lo > q else Ordering.LT
    if x._poly == y._poly:
        lo = min(x._lo, y._lo)
        hi = max(x._hi, y._hi)
        if max(x._lo, y._lo) < min(x._hi, y._hi) and count_roots_closed(x._poly, lo, hi) == 1:
            return Ordering.EQ
    # distinct values: refine until the intervals separate
    while not (x._hi < y._lo or y._hi < x._lo):
        x, y = x._bisect(), y._bisect()
    return Ordering.LT if x._hi < y._lo else Ordering.GT


def _select(poly: IntPolynomial, enclosures: Iterator[tuple[Fraction, Fraction]]) -> RealAlgebraic:
    """Pick the root of ``poly`` that every enclosure in the stream contains."""
    factors = factor_irreducible(poly)
    for lo, hi in enclosures:
        hits = [(f, count_roots_closed(f, lo, hi)) for f in factors]
        if sum(k for _, k in hits) == 1:
            f = next(f for f, k in hits if k)
            if f.degree == 1:
                return RealAlgebraic(Fraction(-f.coeffs[0], f.coeffs[1]))
            return RealAlgebraic._irrational(f, lo, hi)
    raise AssertionError("enclosure stream ended")  # pragma: no cover


def _pairwise(x: RealAlgebraic, y: RealAlgebraic, op: Callable) -> Iterator[tuple[Fraction, Fraction]]:
    for xs, ys in zip(x.refinements(), y.refinements()):
        vals = [op(a, b) for a in (xs._lo, xs._hi) for b in (ys._lo, ys._hi)]
        yield min(vals), max(vals)


@lru_cache(maxsize=8192)
def add(x: RealAlgebraic, y: RealAlgebraic) -> RealAlgebraic:
    if x._q is not None and y._q is not None:
        return RealAlgebraic(x._q + y._q)
    if x._q is not None:
        x, y = y, x
    if y._q is not None:
        if y._q == 0:
            return x
        return RealAlgebraic._irrational(x._poly.shift_variable(y._q), x._lo + y._q, x._hi + y._q)
    poly = sum_polynomial(x._poly, y._poly)
    return _select(poly, _pairwise(x, y, lambda a, b: a + b))


@lru_cache(maxsize=8192)
def mul(x: RealAlgebraic, y: RealAlgebraic) -> RealAlgebraic:
    if x._q is not None and y._q is not None:
        return RealAlgebraic(x._q * y._q)
    if x._q is not None:
        x, y = y, x
    if y._q is not None:
        q = y._q
        if q == 0:
            return RealAlgebraic(0)
        if q == 1:
            return x
        ends = sorted((x._lo * q, x._hi * q))
        return RealAlgebraic._irrational(x._poly.scale_variable(q), ends[0], ends[1])
    poly = product_polynomial(x._poly, y._poly)
    return _select(poly, _pairwise(x, y, lambda a, b: a * b))


@lru_cache(maxsize=8192)
def inv(x: RealAlgebraic) -> RealAlgebraic:
    if x._q is not None:
        if x._q == 0:
            raise DivisionByZero("inverse of zero")
        return RealAlgebraic(1 / x._q)
    x = x._sign_definite()
    return RealAlgebraic._irrational(x._poly.reversed(), 1 / x._hi, 1 / x._lo)


def _sqrt_floor(q: Fraction, bits: int) -> Fraction:
    scale = 4**bits
    return Fraction(isqrt(q.numerator * scale // q.denominator), 2**bits)


def _sqrt_ceil(q: Fraction, bits: int) -> Fraction:
    scale = 4**bits
    return Fraction(isqrt(-(-q.numerator * scale // q.denominator)) + 1, 2**bits)


def _rational_sqrt(q: Fraction) -> Fraction | None:
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


@lru_cache(maxsize=8192)
def sqrt_nonneg(x: RealAlgebraic) -> RealAlgebraic:
    if x.sign() < 0:
        raise NegativeRadicand(f"square root of negative number {x}")
    if x._q is not None:
        exact = _rational_sqrt(x._q)
        if exact is not None:
            return RealAlgebraic(exact)
        poly = IntPolynomial((-x._q.numerator, 0, x._q.denominator))
    else:
        poly = x._poly.substitute_square()

    def enclosures():
        for bits, xs in enumerate(x.refinements(), start=4):
            lo = max(xs._lo, Fraction(0))
            yield _sqrt_floor(lo, bits), _sqrt_ceil(xs._hi, bits)

    return _select(poly, enclosures())


def isolate_real_roots(poly: IntPolynomial) -> list[RealAlgebraic]:
    """All distinct real roots, ascending, with pairwise disjoint intervals."""
    if poly.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    roots: list[RealAlgebraic] = []
    for f in factor_irreducible(poly):
        if f.degree == 1:
            roots.append(RealAlgebraic(Fraction(-f.coeffs[0], f.coeffs[1])))
            continue
        for lo, hi in isolate_squarefree(f):
            roots.append(RealAlgebraic._irrational(f, lo, hi))
    roots.sort(key=cmp_to_key(lambda a, b: int(compare(a, b))))
    for k in range(len(roots) - 1):
        a, b = roots[k], roots[k + 1]
        while a._hi >= b._lo:
            if a._q is None:
                a = a._bisect()
            if b._q is None and a._hi >= b._lo:
                b = b._bisect()
        roots[k], roots[k + 1] = a, b
    return roots


def root_by_index(poly: IntPolynomial, index: int) -> RealAlgebraic:
    """The index-th (1-based, ascending) distinct real root of ``poly``."""
    roots = isolate_real_roots(poly)
    if not 1 <= index <= len(roots):
        raise IndexError(f"{poly} has {len(roots)} real roots, asked for #{index}")
    return roots[index - 1]


def alg_arith(op: str, x: RealAlgebraic, y: RealAlgebraic | None = None) -> RealAlgebraic:
    """Dispatcher over the named field operations."""
    if op == "add":
        return add(x, y)
    if op == "mul":
        return mul(x, y)
    if op == "neg":
        return -x
    if op == "inv":
        return inv(x)
    if op == "sqrt_nonneg":
        return sqrt_nonneg(x)
    raise ValueError(f"unknown operation {op!r}")


def alg_compare(x: Number, y: Number) -> Ordering:
    return compare(RealAlgebraic.coerce(x), RealAlgebraic.coerce(y))
