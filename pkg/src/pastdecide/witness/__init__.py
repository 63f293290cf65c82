"""Witness sets: formulas, SMT-LIB encoding, solver driver, membership and verdicts."""

from .decide import Status, Verdict, decide, scale_to_semiring
from .formulas import FormulaSet, WitnessFormula, build_witness_formulas
from .membership import Certificate, membership_check
from .smtlib import emit_smtlib, emit_union
from .solver import SolverConfig, SolverResult, solve

__all__ = [
    "Certificate",
    "FormulaSet",
    "SolverConfig",
    "SolverResult",
    "Status",
    "Verdict",
    "WitnessFormula",
    "build_witness_formulas",
    "decide",
    "emit_smtlib",
    "emit_union",
    "membership_check",
    "scale_to_semiring",
    "solve",
]
