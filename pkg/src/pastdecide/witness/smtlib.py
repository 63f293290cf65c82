"""SMT-LIB2 (QF_NRA) encoding of witness disjuncts."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..exactnum import RealAlgebraic
from ..spectral import ComplexForm, RealForm
from .formulas import WitnessFormula


def rational_literal(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator) if q >= 0 else f"(- {-q.numerator})"
    num = str(q.numerator) if q >= 0 else f"(- {-q.numerator})"
    return f"(/ {num} {q.denominator})"


def _sum(terms: Sequence[str]) -> str:
    if not terms:
        return "0"
    if len(terms) == 1:
        return terms[0]
    return f"(+ {' '.join(terms)})"


def _power(var: str, k: int) -> str:
    if k == 0:
        return "1"
    if k == 1:
        return var
    return f"(* {' '.join([var] * k)})"


def _term(coef: int, var: str, k: int) -> str:
    if k == 0:
        return str(coef)
    pw = _power(var, k)
    return pw if coef == 1 else f"(* {coef} {pw})"


class Encoder:
    """Accumulates declarations and assertions for one script."""

    def __init__(self, n: int):
        self.n = n
        self.decls: list[str] = [f"(declare-fun x{k + 1} () Real)" for k in range(n)]
        self.asserts: list[str] = []
        self._aux: list[tuple[RealAlgebraic, str]] = []
        self._mods = 0

    def coefficient(self, c: RealAlgebraic) -> str:
        if c.is_rational:
            return rational_literal(c.rational)
        for known, name in self._aux:
            if known.poly == c.poly and known == c:
                return name
        name = f"s{len(self._aux) + 1}"
        self._aux.append((c, name))
        self.decls.append(f"(declare-fun {name} () Real)")
        lhs = [_term(c_k, name, k) for k, c_k in enumerate(c.poly.coeffs) if c_k > 0]
        rhs = [_term(-c_k, name, k) for k, c_k in enumerate(c.poly.coeffs) if c_k < 0]
        self.asserts.append(f"(= {_sum(lhs)} {_sum(rhs)})")
        lo, hi = c.interval
        self.asserts.append(f"(<= {rational_literal(lo)} {name})")
        self.asserts.append(f"(<= {name} {rational_literal(hi)})")
        return name

    def linear(self, form: RealForm) -> str:
        terms = [f"(* {self.coefficient(c)} x{k + 1})" for k, c in enumerate(form.coeffs) if not c.is_zero()]
        return _sum(terms)

    def modulus(self, form: ComplexForm) -> str:
        self._mods += 1
        t = f"t{self._mods}"
        self.decls.append(f"(declare-fun {t} () Real)")
        self.asserts.append(f"(>= {t} 0)")
        re, im = self.linear(form.real), self.linear(form.imag)
        squares = [f"(* {e} {e})" for e in (re, im) if e != "0"]
        self.asserts.append(f"(= (* {t} {t}) {_sum(squares)})")
        return t

    def formula_body(self, formula: WitnessFormula) -> list[str]:
        """The assertions specific to the disjunct (not yet wrapped)."""
        parts = []
        for conj in formula.conjuncts:
            lhs = self.linear(conj.positivity.lhs)
            mods = [self.modulus(f) for f in conj.positivity.moduli]
            parts.append(f"(> {lhs} {_sum(mods)})")
            for eq in conj.equalities:
                for form in eq.forms:
                    parts.append(f"(= {self.linear(form)} 0)")
        return parts

    def nonneg(self) -> None:
        for k in range(self.n):
            self.asserts.append(f"(>= x{k + 1} 0)")

    def render(self, extra: Sequence[str] = ()) -> str:
        lines = ["(set-option :produce-models true)", "(set-logic QF_NRA)"]
        lines += self.decls
        lines += [f"(assert {a})" for a in self.asserts]
        lines += [f"(assert {a})" for a in extra]
        lines += ["(check-sat)", "(get-model)", "(exit)"]
        return "\n".join(lines) + "\n"


def emit_smtlib(formula: WitnessFormula, n: int, extra: Sequence[str] = ()) -> str:
    enc = Encoder(n)
    for part in enc.formula_body(formula):
        enc.asserts.append(part)
    if formula.nonneg:
        enc.nonneg()
    return enc.render(extra)


def emit_union(formulas: Sequence[WitnessFormula], n: int, nonneg: bool) -> str:
    """One script asserting the disjunction of all disjuncts."""
    enc = Encoder(n)
    bodies = []
    for f in formulas:
        parts = enc.formula_body(f)
        bodies.append(parts[0] if len(parts) == 1 else f"(and {' '.join(parts)})")
    if bodies:
        enc.asserts.append(bodies[0] if len(bodies) == 1 else f"(or {' '.join(bodies)})")
    else:
        enc.asserts.append("false")
    if nonneg:
        enc.nonneg()
    return enc.render()
