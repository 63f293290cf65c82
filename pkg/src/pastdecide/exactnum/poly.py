"""Univariate integer polynomials, Sturm sequences and real root isolation.

Coefficients are stored constant term first.  Every polynomial is kept in
primitive form with a positive leading coefficient, which never changes the
root set.  Factorisation and resultants are delegated to sympy; everything
that touches signs (Sturm chains, bisection) is done here with exact
rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import sympy

_T = sympy.Symbol("t")
_Y = sympy.Symbol("y")


def _content(coeffs: Sequence[int]) -> int:
    g = 0
    for c in coeffs:
        g = gcd(g, c)
    return g


@dataclass(frozen=True)
class IntPolynomial:
    """Primitive integer polynomial, constant term first."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        cs = list(self.coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        if cs:
            g = _content(cs)
            if cs[-1] < 0:
                g = -g
            cs = [c // g for c in cs]
        object.__setattr__(self, "coeffs", tuple(int(c) for c in cs))

    @classmethod
    def from_rationals(cls, coeffs: Iterable[Fraction | int]) -> "IntPolynomial":
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // gcd(den, c.denominator)
        return cls(tuple(int(c * den) for c in fr))

    @classmethod
    def linear_root(cls, q: Fraction) -> "IntPolynomial":
        q = Fraction(q)
        return cls((-q.numerator, q.denominator))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x: Fraction | int) -> int:
        return _sign_raw(self.coeffs, Fraction(x))

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def negate_variable(self) -> "IntPolynomial":
        """p(-t)."""
        return IntPolynomial(tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)))

    def reversed(self) -> "IntPolynomial":
        """t^deg * p(1/t); roots are the reciprocals of the nonzero roots."""
        cs = list(self.coeffs)
        while cs and cs[0] == 0:
            cs.pop(0)
        return IntPolynomial(tuple(reversed(cs)))

    def substitute_square(self) -> "IntPolynomial":
        """p(t^2)."""
        out = [0] * (2 * len(self.coeffs) - 1) if self.coeffs else []
        for k, c in enumerate(self.coeffs):
            out[2 * k] = c
        return IntPolynomial(tuple(out))

    def scale_variable(self, q: Fraction) -> "IntPolynomial":
        """Polynomial whose roots are q times the roots of p (q != 0)."""
        q = Fraction(q)
        n, d = q.numerator, q.denominator
        deg = self.degree
        # p(t/q) * n^deg = sum c_k t^k d^k n^(deg-k)
        return IntPolynomial(tuple(c * d**k * n ** (deg - k) for k, c in enumerate(self.coeffs)))

    def shift_variable(self, q: Fraction) -> "IntPolynomial":
        """Polynomial whose roots are the roots of p plus q."""
        expr = self.to_sympy(_T - sympy.Rational(q.numerator, q.denominator))
        return IntPolynomial.from_sympy(expr)

    def to_sympy(self, var=_T):
        return sum(sympy.Integer(c) * var**k for k, c in enumerate(self.coeffs))

    @classmethod
    def from_sympy(cls, expr, var=_T) -> "IntPolynomial":
        p = sympy.Poly(sympy.expand(expr), var, domain="QQ")
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())]
        return cls.from_rationals(coeffs)

    def __str__(self) -> str:
        return str(sympy.expand(self.to_sympy()))


# ---------------------------------------------------------------------------
# rational polynomial helpers (lists of Fractions, constant first)


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(a) - 1 >= db and a:
        coef = a[-1] / lb
        shift = len(a) - 1 - db
        for k in range(len(b)):
            a[shift + k] -= coef * b[k]
        a.pop()
        _trim(a)
    return a


def _primitive_positive(p: list[Fraction]) -> list[int]:
    """Scale by a *positive* constant to primitive integer coefficients.

    IntPolynomial normalises the sign of the leading coefficient, which a
    Sturm chain must not do, so raw lists are returned.
    """
    if not p:
        return []
    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = _content(ints)
    return [c // g for c in ints]


@lru_cache(maxsize=4096)
def sturm_sequence(p: IntPolynomial) -> tuple[tuple[int, ...], ...]:
    """Sturm chain p, p', -rem(...), ... with positive rescaling only."""
    if p.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    chain = [list(p.coeffs), list(p.derivative().coeffs)]
    while chain[-1] and len(chain[-1]) > 1:
        r = _rem([Fraction(c) for c in chain[-2]], [Fraction(c) for c in chain[-1]])
        if not r:
            break
        ints = _primitive_positive([-c for c in r])
        chain.append(ints)
    return tuple(tuple(c) for c in chain if c)


def _sign_raw(coeffs: Sequence[int], x: Fraction) -> int:
    n, d = x.numerator, x.denominator
    deg = len(coeffs) - 1
    total = 0
    npow = 1
    for k, c in enumerate(coeffs):
        total += c * npow * d ** (deg - k)
        npow *= n
    return (total > 0) - (total < 0)


def _variations(chain, x: Fraction) -> int:
    signs = [s for s in (_sign_raw(c, x) for c in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: IntPolynomial, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of p in the half-open interval (lo, hi]."""
    if lo >= hi:
        return 0
    chain = sturm_sequence(p)
    return _variations(chain, Fraction(lo)) - _variations(chain, Fraction(hi))


def count_roots_closed(p: IntPolynomial, lo: Fraction, hi: Fraction) -> int:
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        return 0
    extra = 1 if p.sign_at(lo) == 0 else 0
    if lo == hi:
        return extra
    return count_roots(p, lo, hi) + extra


def root_bound(p: IntPolynomial) -> Fraction:
    """Cauchy bound: every root satisfies |z| < bound."""
    lc = abs(p.coeffs[-1])
    return 1 + Fraction(max((abs(c) for c in p.coeffs[:-1]), default=0), lc)


def isolate_squarefree(p: IntPolynomial) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals for the real roots of a squarefree p, ascending.

    Each returned pair is either a degenerate interval (q, q) for a rational
    root or an open interval with nonzero endpoint values containing exactly
    one root.
    """
    if p.degree < 1:
        return []
    bound = root_bound(p)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        k = count_roots(p, lo, hi)
        if k == 0:
            continue
        if k == 1:
            if p.sign_at(hi) == 0:
                out.append((hi, hi))
                continue
            if p.sign_at(lo) != 0:
                out.append((lo, hi))
                continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    out.sort(key=lambda iv: iv[0])
    return out


# ---------------------------------------------------------------------------
# sympy-backed algebra


@lru_cache(maxsize=4096)
def factor_irreducible(p: IntPolynomial) -> tuple[IntPolynomial, ...]:
    """Distinct irreducible factors of p over Q (multiplicities dropped)."""
    if p.degree < 1:
        return ()
    _, facs = sympy.factor_list(sympy.Poly(p.to_sympy(), _T, domain="ZZ"))
    out = {IntPolynomial.from_sympy(f.as_expr()) for f, _ in facs}
    return tuple(sorted(out, key=lambda f: (f.degree, f.coeffs)))


@lru_cache(maxsize=4096)
def factor_with_multiplicity(p: IntPolynomial) -> tuple[tuple[IntPolynomial, int], ...]:
    if p.degree < 1:
        return ()
    _, facs = sympy.factor_list(sympy.Poly(p.to_sympy(), _T, domain="ZZ"))
    out = [(IntPolynomial.from_sympy(f.as_expr()), int(e)) for f, e in facs]
    return tuple(sorted(out, key=lambda fe: (fe[0].degree, fe[0].coeffs)))


@lru_cache(maxsize=4096)
def sum_polynomial(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """Polynomial vanishing at every alpha + beta (p(alpha) = q(beta) = 0)."""
    r = sympy.resultant(p.to_sympy(_Y), q.to_sympy(_T - _Y), _Y)
    return IntPolynomial.from_sympy(r)


@lru_cache(maxsize=4096)
def product_polynomial(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """Polynomial vanishing at every alpha * beta, for roots beta != 0."""
    d = q.degree
    homog = sum(sympy.Integer(c) * _T**k * _Y ** (d - k) for k, c in enumerate(q.coeffs))
    r = sympy.resultant(p.to_sympy(_Y), homog, _Y)
    return IntPolynomial.from_sympy(r)


def poly_gcd(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    g = sympy.gcd(p.to_sympy(), q.to_sympy())
    return IntPolynomial.from_sympy(g)


def is_squarefree(p: IntPolynomial) -> bool:
    if p.degree < 1:
        return True
    return poly_gcd(p, p.derivative()).degree == 0


def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    g = poly_gcd(p, p.derivative())
    quo = sympy.quo(p.to_sympy(), g.to_sympy(), _T)
    return IntPolynomial.from_sympy(quo)
