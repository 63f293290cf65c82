"""Turn solver answers into a verdict for a chosen semiring."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

from ..errors import NegativeEntryForNonnegSemiring, SolverError
from ..exactnum import RealAlgebraic
from ..loopmodel import Loop, SemiringTag
from ..spectral import Analysis, analyze, necessary_condition
from .formulas import WitnessFormula, build_witness_formulas
from .membership import Certificate, check_direction, membership_check
from .smtlib import emit_smtlib, emit_union, rational_literal
from .solver import SolverConfig, SolverResult, solve


class Status(enum.Enum):
    TERMINATING = "TERMINATING"
    NONTERMINATING = "NONTERMINATING"
    UNKNOWN = "UNKNOWN"


@dataclass
class Verdict:
    status: Status
    semiring: SemiringTag
    analysis: Analysis
    witness: tuple[RealAlgebraic, ...] | None = None
    certificate: Certificate | None = None
    diagnostics: dict = field(default_factory=dict)
    timings: list[float] = field(default_factory=list)

    def to_json(self, include_timings: bool = False) -> dict:
        diag = dict(self.diagnostics)
        if include_timings:
            diag["solver_seconds"] = [round(t, 6) for t in self.timings]
        return {
            "status": self.status.value,
            "semiring": self.semiring.value,
            "witness": None if self.witness is None else [v.to_json() for v in self.witness],
            "certificate": None if self.certificate is None else self.certificate.to_json(self.analysis),
            "diagnostics": diag,
        }


def scale_to_semiring(x: Sequence, semiring: SemiringTag) -> tuple[Fraction, ...]:
    """Clear denominators of a rational vector (W is closed under positive scaling)."""
    xs = [Fraction(v.rational) if isinstance(v, RealAlgebraic) else Fraction(v) for v in x]
    if semiring.nonneg and any(v < 0 for v in xs):
        raise NegativeEntryForNonnegSemiring(f"negative entry in {[str(v) for v in xs]} for semiring {semiring.value}")
    factor = lcm(*(v.denominator for v in xs)) if xs else 1
    return tuple(v * factor for v in xs)


def _model_vector(result: SolverResult, n: int) -> tuple[RealAlgebraic, ...]:
    # a variable the solver left out of its model is unconstrained; 0 is a valid value
    return tuple(result.model.get(f"x{k + 1}", RealAlgebraic(0)) for k in range(n))


class _Search:
    """Mutable bookkeeping for one decide call."""

    def __init__(self, analysis: Analysis, semiring: SemiringTag, config: SolverConfig):
        self.analysis = analysis
        self.semiring = semiring
        self.config = config
        self.queries: list[dict] = []
        self.timings: list[float] = []
        self.notes: list[str] = []

    def run(self, script: str, label: dict) -> SolverResult | None:
        entry = dict(label)
        try:
            result = solve(script, self.config)
        except SolverError as exc:
            entry["status"] = "error"
            entry["error"] = f"{type(exc).__name__}: {exc}"
            self.queries.append(entry)
            return None
        entry["status"] = result.status
        self.queries.append(entry)
        self.timings.append(result.seconds)
        return result

    def rationalize(self, formula: WitnessFormula, x: tuple[RealAlgebraic, ...]) -> tuple[RealAlgebraic, ...] | None:
        """Pin coordinates to nearby rationals one at a time, re-querying the solver."""
        n = self.analysis.loop.n
        pins: list[str] = []
        current = x
        for k in range(n):
            v = current[k]
            if v.is_rational:
                pins.append(f"(= x{k + 1} {rational_literal(v.rational)})")
                continue
            approx = v.approx(Fraction(1, 2**80))
            for bound in (10, 10**3, 10**6, 10**12, 10**24):
                q = approx.limit_denominator(bound)
                trial = pins + [f"(= x{k + 1} {rational_literal(q)})"]
                res = self.run(emit_smtlib(formula, n, trial), {"pin": f"x{k + 1}", "denominator_bound": bound})
                if res is not None and res.status == "sat":
                    pins = trial
                    current = _model_vector(res, n)
                    break
            else:
                return None
        return current if all(v.is_rational for v in current) else None

    def witness_from(self, formula: WitnessFormula, result: SolverResult):
        """Exact witness and certificate for the semiring, or None."""
        n = self.analysis.loop.n
        x = _model_vector(result, n)
        if self.semiring.rational:
            if not all(v.is_rational for v in x):
                self.notes.append("solver model is irrational; trying rational pinning")
                x = self.rationalize(formula, x)
                if x is None:
                    self.notes.append("no rational point found in a satisfiable disjunct")
                    return None
            if self.semiring.integral:
                x = tuple(RealAlgebraic(v) for v in scale_to_semiring(x, self.semiring))
        if self.semiring.nonneg and any(v.sign() < 0 for v in x):
            self.notes.append("model violates x >= 0")
            return None
        cert = check_direction(x, formula.d, self.analysis) or membership_check(x, self.analysis)
        if cert is None:
            self.notes.append("solver model failed the exact membership check")
            return None
        if not necessary_condition(x, self.analysis):  # pragma: no cover - would be a soundness bug
            self.notes.append("witness fails the necessary dominance condition")
            return None
        return x, cert


def decide(
    loop: Loop,
    semiring: SemiringTag | None = None,
    config: SolverConfig | None = None,
    single_query: bool = False,
    analysis: Analysis | None = None,
) -> Verdict:
    semiring = semiring or loop.semiring
    config = config or SolverConfig()
    analysis = analysis or analyze(loop)
    fs = build_witness_formulas(analysis, semiring.nonneg)
    diag: dict = {
        "disjuncts_raw": fs.raw_count,
        "disjuncts": len(fs.formulas),
        "pruned": list(fs.pruned),
    }
    search = _Search(analysis, semiring, config)

    def finish(status: Status, witness=None, cert=None) -> Verdict:
        diag["queries"] = search.queries
        if search.notes:
            diag["notes"] = search.notes
        return Verdict(status, semiring, analysis, witness, cert, diag, search.timings)

    if not fs.formulas:
        search.notes.append("every disjunct was pruned; the witness set is empty")
        return finish(Status.TERMINATING)

    if single_query:
        res = search.run(emit_union(fs.formulas, loop.n, semiring.nonneg), {"mode": "single-query"})
        if res is None or res.status == "unknown":
            return finish(Status.UNKNOWN)
        if res.status == "unsat":
            return finish(Status.TERMINATING)
        x = _model_vector(res, loop.n)
        cert = membership_check(x, analysis)
        formula = next(
            (f for f in fs.formulas if cert is not None and f.d is cert.d and f.assignment == cert.assignment),
            None,
        )
        if formula is None:
            search.notes.append("union model matched no disjunct exactly")
            return finish(Status.UNKNOWN)
        found = search.witness_from(formula, res)
        if found is None:
            return finish(Status.UNKNOWN)
        return finish(Status.NONTERMINATING, *found)

    undecided = False
    for formula in fs.formulas:
        label = formula.describe(analysis)
        res = search.run(emit_smtlib(formula, loop.n), label)
        if res is None or res.status == "unknown":
            undecided = True
            continue
        if res.status == "unsat":
            continue
        found = search.witness_from(formula, res)
        if found is not None:
            return finish(Status.NONTERMINATING, *found)
        undecided = True
    if undecided:
        search.notes.append("some disjunct is satisfiable or undecided but no witness was certified")
        return finish(Status.UNKNOWN)
    return finish(Status.TERMINATING)
