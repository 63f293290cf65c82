"""Certified enclosures of natural logarithms.

ln q for rational q > 0 is computed as e*ln 2 + ln m with m in [1, 2),
using ln m = 2*atanh((m-1)/(m+1)).  The series is summed in integer fixed
point, once rounding down and once rounding up with a tail bound, so both
ends are rigorous.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..errors import NonPositiveArgument
from .real import RealAlgebraic


@dataclass(frozen=True)
class DyadicInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, v: Fraction) -> bool:
        return self.lo <= v <= self.hi

    def contains_interval(self, other: "DyadicInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other: "DyadicInterval") -> "DyadicInterval":
        return DyadicInterval(self.lo + other.lo, self.hi + other.hi)

    def __neg__(self) -> "DyadicInterval":
        return DyadicInterval(-self.hi, -self.lo)

    def __sub__(self, other: "DyadicInterval") -> "DyadicInterval":
        return self + (-other)

    def __mul__(self, other: "DyadicInterval | Fraction | int") -> "DyadicInterval":
        if not isinstance(other, DyadicInterval):
            other = DyadicInterval(Fraction(other), Fraction(other))
        ends = [a * b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return DyadicInterval(min(ends), max(ends))

    __rmul__ = __mul__

    def strictly_below(self, other: "DyadicInterval") -> bool:
        return self.hi < other.lo

    def __str__(self) -> str:
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def _two_atanh_fixed(num: int, den: int, q: int) -> tuple[int, int]:
    """Bounds (lo, hi) on 2*atanh(num/den) * 2^q, for 0 <= num/den <= 1/3."""
    if num == 0:
        return 0, 0
    n2, d2 = num * num, den * den
    # lower bound: every rounding goes down
    pw = (num << q) // den
    s_lo = 0
    k = 0
    while pw:
        s_lo += pw // (2 * k + 1)
        pw = pw * n2 // d2
        k += 1
    # upper bound: every rounding goes up, then add the tail
    pw = -((-num << q) // den)
    s_hi = 0
    k = 0
    while pw > 1:
        s_hi += -(-pw // (2 * k + 1))
        pw = -(-pw * n2 // d2)
        k += 1
    # remaining terms sum to at most pw / (1 - z^2) <= 9/8 * pw <= 2 ulps
    s_hi += 2
    return 2 * s_lo, 2 * s_hi


@lru_cache(maxsize=64)
def _ln2_fixed(q: int) -> tuple[int, int]:
    return _two_atanh_fixed(1, 3, q)


def _ln_rational(x: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Rigorous (lo, hi) with ln x inside and hi - lo <= 2^-prec."""
    e = x.numerator.bit_length() - x.denominator.bit_length()
    if x < Fraction(2) ** e:
        e -= 1
    m = x / Fraction(2) ** e  # in [1, 2)
    q = prec + abs(e).bit_length() + 16
    one = 1 << q
    m_lo = m.numerator * one // m.denominator
    m_hi = -(-m.numerator * one // m.denominator)
    lnm_lo, _ = _two_atanh_fixed(m_lo - one, m_lo + one, q)
    _, lnm_hi = _two_atanh_fixed(m_hi - one, m_hi + one, q)
    l2_lo, l2_hi = _ln2_fixed(q)
    if e >= 0:
        lo, hi = e * l2_lo + lnm_lo, e * l2_hi + lnm_hi
    else:
        lo, hi = e * l2_hi + lnm_lo, e * l2_lo + lnm_hi
    return Fraction(lo, one), Fraction(hi, one)


def log_interval(x: RealAlgebraic | Fraction | int, bits: int) -> DyadicInterval:
    """Enclosure of ln(x) of width at most 2^-bits.

    Enclosures are nested: the result for any larger ``bits`` lies inside
    the result for ``bits``.  This comes from padding a core enclosure of
    width <= 2^-(bits+3) by 2^-(bits+2) on both sides.
    """
    x = RealAlgebraic.coerce(x)
    if x.sign() <= 0:
        raise NonPositiveArgument(f"logarithm of non-positive number {x}")
    if bits < 0:
        raise ValueError("bits must be natural")
    core = bits + 5
    if x.is_rational:
        lo, hi = _ln_rational(x.rational, core)
    else:
        # shrink the bracket until its relative width is below 2^-core
        xs = x._sign_definite()
        for xs in xs.refinements():
            xl, xh = xs.interval
            if xl > 0 and (xh - xl) <= xl / 2**core:
                break
        lo, _ = _ln_rational(xl, core)
        _, hi = _ln_rational(xh, core)
    pad = Fraction(1, 2 ** (bits + 2))
    return DyadicInterval(lo - pad, hi + pad)
