"""Complex algebraic numbers as pairs of real algebraic numbers."""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from ..errors import DivisionByZero, ParseError
from .real import RealAlgebraic

Scalar = Union["ComplexAlgebraic", RealAlgebraic, Fraction, int]


class ComplexAlgebraic:
    __slots__ = ("re", "im")

    def __init__(self, re: RealAlgebraic | Fraction | int = 0, im: RealAlgebraic | Fraction | int = 0):
        self.re = RealAlgebraic.coerce(re)
        self.im = RealAlgebraic.coerce(im)

    @classmethod
    def coerce(cls, z: Scalar) -> "ComplexAlgebraic":
        return z if isinstance(z, ComplexAlgebraic) else cls(z)

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def is_real(self) -> bool:
        return self.im.is_zero()

    def is_rational(self) -> bool:
        return self.im.is_zero() and self.re.is_rational

    def is_positive_real(self) -> bool:
        return self.im.is_zero() and self.re.sign() > 0

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: Scalar) -> "ComplexAlgebraic":
        if not isinstance(other, (ComplexAlgebraic, RealAlgebraic, Fraction, int)):
            return NotImplemented
        w = ComplexAlgebraic.coerce(other)
        return ComplexAlgebraic(self.re + w.re, self.im + w.im)

    __radd__ = __add__

    def __neg__(self) -> "ComplexAlgebraic":
        return ComplexAlgebraic(-self.re, -self.im)

    def __sub__(self, other: Scalar) -> "ComplexAlgebraic":
        if not isinstance(other, (ComplexAlgebraic, RealAlgebraic, Fraction, int)):
            return NotImplemented
        return self + (-ComplexAlgebraic.coerce(other))

    def __rsub__(self, other: Scalar) -> "ComplexAlgebraic":
        return ComplexAlgebraic.coerce(other) - self

    def __mul__(self, other: Scalar) -> "ComplexAlgebraic":
        if not isinstance(other, (ComplexAlgebraic, RealAlgebraic, Fraction, int)):
            return NotImplemented
        w = ComplexAlgebraic.coerce(other)
        if w.im.is_zero():
            return ComplexAlgebraic(self.re * w.re, self.im * w.re)
        if self.im.is_zero():
            return ComplexAlgebraic(self.re * w.re, self.re * w.im)
        return ComplexAlgebraic(self.re * w.re - self.im * w.im, self.re * w.im + self.im * w.re)

    __rmul__ = __mul__

    def conj(self) -> "ComplexAlgebraic":
        return ComplexAlgebraic(self.re, -self.im)

    def norm_squared(self) -> RealAlgebraic:
        return self.re * self.re + self.im * self.im

    def modulus(self) -> RealAlgebraic:
        if self.im.is_zero():
            return abs(self.re)
        if self.re.is_zero():
            return abs(self.im)
        return self.norm_squared().sqrt()

    def inverse(self) -> "ComplexAlgebraic":
        if self.is_zero():
            raise DivisionByZero("inverse of complex zero")
        if self.im.is_zero():
            return ComplexAlgebraic(self.re.inverse())
        n = self.norm_squared().inverse()
        return ComplexAlgebraic(self.re * n, -self.im * n)

    def __truediv__(self, other: Scalar) -> "ComplexAlgebraic":
        if not isinstance(other, (ComplexAlgebraic, RealAlgebraic, Fraction, int)):
            return NotImplemented
        return self * ComplexAlgebraic.coerce(other).inverse()

    def __rtruediv__(self, other: Scalar) -> "ComplexAlgebraic":
        return ComplexAlgebraic.coerce(other) * self.inverse()

    def unit(self) -> "ComplexAlgebraic":
        """z / |z| for nonzero z."""
        if self.is_zero():
            raise DivisionByZero("unit of complex zero")
        return self * self.modulus().inverse()

    def __pow__(self, k: int) -> "ComplexAlgebraic":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ComplexAlgebraic(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (RealAlgebraic, Fraction, int)):
            other = ComplexAlgebraic(other)
        if not isinstance(other, ComplexAlgebraic):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        if self.im.is_zero():
            return hash(self.re)
        return hash((self.re, self.im))

    # -- text ---------------------------------------------------------------

    def to_json(self):
        if self.im.is_zero():
            return self.re.to_json()
        return {"re": self.re.to_json(), "im": self.im.to_json()}

    @classmethod
    def from_json(cls, obj, field: str | None = None) -> "ComplexAlgebraic":
        if isinstance(obj, dict) and set(obj) <= {"re", "im"} and obj:
            return cls(RealAlgebraic.from_json(obj.get("re", 0), field), RealAlgebraic.from_json(obj.get("im", 0), field))
        if isinstance(obj, dict) and "poly" not in obj:
            raise ParseError(f"malformed complex number {obj!r}", field)
        return cls(RealAlgebraic.from_json(obj, field))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        if self.im.is_zero():
            return f"ComplexAlgebraic({self.re!r})"
        return f"ComplexAlgebraic({self.re!r}, {self.im!r})"

    def __str__(self) -> str:
        if self.im.is_zero():
            return str(self.re)
        if self.re.is_zero():
            return f"{self.im}i"
        sign = "-" if self.im.sign() < 0 else "+"
        return f"{self.re}{sign}{abs(self.im)}i"


I = ComplexAlgebraic(0, 1)


def complex_ops(op: str, z: ComplexAlgebraic, w: ComplexAlgebraic | None = None):
    """Dispatcher over the named complex operations."""
    if op == "add":
        return z + w
    if op == "mul":
        return z * w
    if op == "conj":
        return z.conj()
    if op == "modulus":
        return z.modulus()
    if op == "is_zero":
        return z.is_zero()
    raise ValueError(f"unknown operation {op!r}")
