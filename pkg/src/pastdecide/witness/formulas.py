"""Semialgebraic description of the witness set as a list of disjuncts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..spectral import Analysis, Direction, EqualityCondition, PositivityCondition


@dataclass(frozen=True)
class Conjunct:
    """What one constraint demands inside a disjunct."""

    constraint: int
    group: int
    positivity: PositivityCondition
    equalities: tuple[EqualityCondition, ...]  # one per lex-greater group


@dataclass(frozen=True)
class WitnessFormula:
    d: Direction
    assignment: tuple[int, ...]  # designated group index per constraint
    conjuncts: tuple[Conjunct, ...]
    nonneg: bool

    def describe(self, analysis: Analysis) -> dict:
        keys = [analysis.groups.groups[gi].key for gi in self.assignment]
        return {"d": self.d.value, "assignment": [k.to_json() for k in keys]}


@dataclass(frozen=True)
class FormulaSet:
    formulas: tuple[WitnessFormula, ...]
    raw_count: int
    pruned: tuple[dict, ...]  # why each dropped disjunct was dropped


def build_witness_formulas(analysis: Analysis, nonneg: bool) -> FormulaSet:
    """Enumerate (d, assignment) pairs and drop those that cannot be satisfied.

    A disjunct is dropped when some designated group has no index whose two
    eigenvalues are positive reals (its left side is identically 0 while the
    right side is a sum of moduli), or when that left side cancels to the
    zero form.
    """
    m = analysis.loop.m
    ngroups = len(analysis.groups)
    formulas = []
    pruned = []
    raw = 0
    for d in (Direction.P, Direction.N):
        for assignment in itertools.product(range(ngroups), repeat=m):
            raw += 1
            reason = None
            for c, gi in enumerate(assignment):
                group = analysis.groups.groups[gi]
                if not group.real_indices:
                    reason = f"constraint {c + 1}: designated group has an empty real part"
                    break
                if analysis.positivity(c, gi).lhs.is_zero():
                    reason = f"constraint {c + 1}: real-part sum is identically zero"
                    break
            if reason is not None:
                keys = [analysis.groups.groups[gi].key.to_json() for gi in assignment]
                pruned.append({"d": d.value, "assignment": keys, "reason": reason})
                continue
            conjuncts = []
            for c, gi in enumerate(assignment):
                eqs = tuple(analysis.zero_condition(c, g2) for g2 in analysis.greater_groups(gi, d))
                conjuncts.append(Conjunct(c, gi, analysis.positivity(c, gi), eqs))
            formulas.append(WitnessFormula(d, tuple(assignment), tuple(conjuncts), nonneg))
    return FormulaSet(tuple(formulas), raw, tuple(pruned))
