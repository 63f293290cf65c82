"""Solver-free, exact membership test for the witness set."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..exactnum import RealAlgebraic
from ..loopmodel import as_real_vector
from ..spectral import Analysis, Direction, dominant_group_at


@dataclass(frozen=True)
class Certificate:
    d: Direction
    assignment: tuple[int, ...]  # dominant group per constraint
    margins: tuple[RealAlgebraic, ...]  # real-part sum minus sum of moduli, per constraint

    def to_json(self, analysis: Analysis) -> dict:
        return {
            "d": self.d.value,
            "assignment": [analysis.groups.groups[gi].key.to_json() for gi in self.assignment],
            "margins": [m.to_json() for m in self.margins],
        }


def check_direction(x: Sequence[RealAlgebraic], d: Direction, analysis: Analysis) -> Certificate | None:
    assignment = []
    margins = []
    for c in range(analysis.loop.m):
        gi = dominant_group_at(x, c, d, analysis)
        if gi is None:
            return None
        margin = analysis.positivity(c, gi).margin(x)
        if margin.sign() <= 0:
            return None
        assignment.append(gi)
        margins.append(margin)
    return Certificate(d, tuple(assignment), tuple(margins))


def membership_check(x: Sequence, analysis: Analysis) -> Certificate | None:
    """Certificate for the first direction (P before N) under which x is a witness."""
    xv = as_real_vector(x, analysis.loop.n)
    for d in (Direction.P, Direction.N):
        cert = check_direction(xv, d, analysis)
        if cert is not None:
            return cert
    return None
