"""Loop model, loop-file parsing, exact guard values and a seeded simulator."""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    ParseError,
    ProbabilityOutOfRange,
    SemiringViolation,
)
from .exactnum import ComplexAlgebraic, RealAlgebraic
from .linalg import ExactMatrix, check_commuting_diagonalizable


class SemiringTag(enum.Enum):
    N = "N"
    Z = "Z"
    Qnonneg = "Q+"
    Q = "Q"
    Anonneg = "A+"
    A = "A"

    @classmethod
    def parse(cls, text: str) -> "SemiringTag":
        aliases = {
            "N": cls.N,
            "Z": cls.Z,
            "Q+": cls.Qnonneg,
            "Qnonneg": cls.Qnonneg,
            "Q": cls.Q,
            "A+": cls.Anonneg,
            "Anonneg": cls.Anonneg,
            "A": cls.A,
            "R": cls.A,
        }
        try:
            return aliases[text.strip()]
        except (KeyError, AttributeError):
            raise ParseError(f"unknown semiring {text!r}", "semiring") from None

    @property
    def nonneg(self) -> bool:
        return self in (SemiringTag.N, SemiringTag.Qnonneg, SemiringTag.Anonneg)

    @property
    def integral(self) -> bool:
        return self in (SemiringTag.N, SemiringTag.Z)

    @property
    def rational(self) -> bool:
        return self in (SemiringTag.N, SemiringTag.Z, SemiringTag.Qnonneg, SemiringTag.Q)

    def contains(self, v: RealAlgebraic | ComplexAlgebraic | Fraction | int) -> bool:
        if isinstance(v, ComplexAlgebraic):
            if not v.is_real():
                return False
            v = v.re
        v = RealAlgebraic.coerce(v)
        if self.rational and not v.is_rational:
            return False
        if self.integral and v.rational.denominator != 1:
            return False
        if self.nonneg and v.sign() < 0:
            return False
        return True


@dataclass(frozen=True)
class Loop:
    n: int
    m: int
    C: ExactMatrix
    A: ExactMatrix
    B: ExactMatrix
    p: RealAlgebraic
    semiring: SemiringTag = SemiringTag.A

    def with_semiring(self, semiring: SemiringTag) -> "Loop":
        loop = Loop(self.n, self.m, self.C, self.A, self.B, self.p, semiring)
        _check_semiring(loop)
        return loop

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "p": self.p.to_json(),
            "semiring": self.semiring.value,
            "C": self.C.to_json(),
            "A": self.A.to_json(),
            "B": self.B.to_json(),
        }


_KEYS = {"n", "m", "p", "semiring", "C", "A", "B"}


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    if m is None:
        return None
    return text.count("\n", 0, m.start()) + 1


def _read_matrix(obj, name: str, rows: int | None, cols: int | None, line: int | None, rational: bool) -> ExactMatrix:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ParseError("expected a non-empty list of rows", name, line)
    if rows is not None and len(obj) != rows:
        raise DimensionMismatch(f"line {line}, field {name!r}: expected {rows} rows, got {len(obj)}")
    width = len(obj[0])
    if cols is not None and width != cols:
        raise DimensionMismatch(f"line {line}, field {name!r}: expected {cols} columns, got {width}")
    out = []
    for i, row in enumerate(obj):
        if len(row) != width:
            raise DimensionMismatch(f"line {line}, field {name!r}: row {i + 1} has {len(row)} entries, expected {width}")
        vals = []
        for j, v in enumerate(row):
            val = RealAlgebraic.from_json(v, f"{name}[{i + 1}][{j + 1}]")
            if rational and not val.is_rational:
                raise ParseError("update matrices must have rational entries", f"{name}[{i + 1}][{j + 1}]", line)
            vals.append(val)
        out.append(vals)
    return ExactMatrix.from_rows(out)


def _check_semiring(loop: Loop) -> None:
    for name, M in (("A", loop.A), ("B", loop.B)):
        for i, row in enumerate(M.entries):
            for j, v in enumerate(row):
                if not loop.semiring.contains(v):
                    raise SemiringViolation(
                        f"{name}[{i + 1}][{j + 1}] = {v} is not in semiring {loop.semiring.value}"
                    )


def build_loop(
    C: ExactMatrix,
    A: ExactMatrix,
    B: ExactMatrix,
    p: RealAlgebraic | Fraction | int,
    semiring: SemiringTag = SemiringTag.A,
) -> Loop:
    """Validate and normalize an in-memory loop."""
    p = RealAlgebraic.coerce(p)
    if p.sign() < 0 or p > 1:
        raise ProbabilityOutOfRange(f"p = {p} is outside [0, 1]")
    if not (A.is_square and B.is_square and A.rows == B.rows == C.cols):
        raise DimensionMismatch("C must be m x n and A, B must be n x n")
    if p.is_zero():
        A, p = B, RealAlgebraic(Fraction(1, 2))
    elif p == 1:
        B, p = A, RealAlgebraic(Fraction(1, 2))
    loop = Loop(A.rows, C.rows, C, A, B, p, semiring)
    _check_semiring(loop)
    violation = check_commuting_diagonalizable(A, B)
    if violation is not None:
        raise violation.to_error()
    return loop


def parse_loop(text: str, semiring: SemiringTag | None = None) -> Loop:
    """Parse a JSON loop file.  ``semiring`` overrides the file's tag."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, None, exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    unknown = sorted(set(doc) - _KEYS)
    if unknown:
        raise ParseError("unknown key", unknown[0], _line_of(text, unknown[0]))
    for key in ("C", "A", "B", "p"):
        if key not in doc:
            raise ParseError("missing required key", key)
    dims = {}
    for key in ("n", "m"):
        if key in doc:
            v = doc[key]
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ParseError("must be a positive integer", key, _line_of(text, key))
            dims[key] = v
    n, m = dims.get("n"), dims.get("m")
    A = _read_matrix(doc["A"], "A", n, n, _line_of(text, "A"), True)
    n = A.rows
    if A.cols != n:
        raise DimensionMismatch(f"field 'A': expected a square matrix, got {A.rows}x{A.cols}")
    B = _read_matrix(doc["B"], "B", n, n, _line_of(text, "B"), True)
    C = _read_matrix(doc["C"], "C", m, n, _line_of(text, "C"), False)
    p = RealAlgebraic.from_json(doc["p"], "p")
    if semiring is None:
        raw = doc.get("semiring", "A")
        if not isinstance(raw, str):
            raise ParseError("must be a string", "semiring", _line_of(text, "semiring"))
        semiring = SemiringTag.parse(raw)
    return build_loop(C, A, B, p, semiring)


def load_loop(path: str, semiring: SemiringTag | None = None) -> Loop:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read loop file: {exc.strerror}", path) from exc
    return parse_loop(text, semiring)


# ---------------------------------------------------------------------------
# exact semantics


def _frac_matvec(M: list[list[Fraction]], v: list) -> list:
    return [sum((a * b for a, b in zip(row, v) if a), type(v[0])(0) if v else 0) for row in M]


def _frac_matmul(x: list[list[Fraction]], y: list[list[Fraction]]) -> list[list[Fraction]]:
    cols = list(zip(*y))
    return [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in x]


def _frac_pow(M: list[list[Fraction]], k: int) -> list[list[Fraction]]:
    n = len(M)
    result = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    base = M
    while k:
        if k & 1:
            result = _frac_matmul(result, base)
        k >>= 1
        if k:
            base = _frac_matmul(base, base)
    return result


def as_real_vector(x: Sequence, n: int | None = None) -> tuple[RealAlgebraic, ...]:
    out = []
    for v in x:
        if isinstance(v, ComplexAlgebraic):
            if not v.is_real():
                raise DimensionMismatch("expected a real vector")
            v = v.re
        out.append(RealAlgebraic.coerce(v))
    if n is not None and len(out) != n:
        raise DimensionMismatch(f"vector of length {len(out)}, expected {n}")
    return tuple(out)


def apply_updates(loop: Loop, x: Sequence, j: int, k: int) -> tuple[RealAlgebraic, ...]:
    """A^j B^k x exactly, using matrix powers."""
    xv = as_real_vector(x, loop.n)
    M = _frac_matmul(_frac_pow(loop.A.to_fractions(), j), _frac_pow(loop.B.to_fractions(), k))
    if all(v.is_rational for v in xv):
        res = _frac_matvec(M, [v.rational for v in xv])
        return tuple(RealAlgebraic(v) for v in res)
    out = []
    for row in M:
        acc = RealAlgebraic(0)
        for a, v in zip(row, xv):
            if a:
                acc = acc + v * a
        out.append(acc)
    return tuple(out)


def apply_guard(loop: Loop, y: Sequence[RealAlgebraic]) -> tuple[RealAlgebraic, ...]:
    out = []
    for row in loop.C.entries:
        acc = RealAlgebraic(0)
        for c, v in zip(row, y):
            if c.is_zero() or v.is_zero():
                continue
            acc = acc + c.re * v
        out.append(acc)
    return tuple(out)


def guard_values(loop: Loop, x: Sequence, j: int = 0, k: int = 0) -> tuple[RealAlgebraic, ...]:
    """C A^j B^k x."""
    if j < 0 or k < 0:
        raise ValueError("j and k must be natural")
    return apply_guard(loop, apply_updates(loop, x, j, k))


def closed_form_values(spectral, gamma, x: Sequence, j: int = 0, k: int = 0) -> tuple[RealAlgebraic, ...]:
    """sum_i a_i^j b_i^k gamma_{c,i}(x), which must be real."""
    xv = as_real_vector(x, spectral.n)
    out = []
    for c in range(gamma.m):
        acc = ComplexAlgebraic(0)
        for i in range(spectral.n):
            g = gamma.evaluate(c, i, xv)
            if g.is_zero():
                continue
            acc = acc + spectral.a[i] ** j * spectral.b[i] ** k * g
        if not acc.is_real():  # pragma: no cover - contradicts conjugate pairing
            raise ArithmeticError("closed form produced a non-real guard value")
        out.append(acc.re)
    return tuple(out)


def guard_holds(values: Sequence[RealAlgebraic]) -> bool:
    return all(v.sign() > 0 for v in values)


# ---------------------------------------------------------------------------
# simulation


@dataclass(frozen=True)
class RunStats:
    runs: int
    cap: int
    seed: int
    runtimes: tuple[int, ...] = field(repr=False)
    finished: tuple[bool, ...] = field(repr=False)

    @property
    def terminated(self) -> int:
        return sum(self.finished)

    @property
    def survivors(self) -> int:
        return self.runs - self.terminated

    @property
    def survival_fraction(self) -> Fraction:
        return Fraction(self.survivors, self.runs)

    @property
    def mean_runtime_of_terminated(self) -> Fraction | None:
        done = [t for t, f in zip(self.runtimes, self.finished) if f]
        if not done:
            return None
        return Fraction(sum(done), len(done))

    def to_json(self) -> dict:
        mean = self.mean_runtime_of_terminated
        return {
            "runs": self.runs,
            "cap": self.cap,
            "seed": self.seed,
            "terminated": self.terminated,
            "survivors": self.survivors,
            "survival_fraction": str(self.survival_fraction),
            "mean_runtime_of_terminated": None if mean is None else str(mean),
            "max_runtime": max(self.runtimes),
        }


_CHUNK = 256
_SEED_MASK = (1 << 64) - 1


def _integer_matrix(M: list[list[Fraction]]) -> list[list[int]]:
    den = lcm(*(v.denominator for row in M for v in row))
    return [[int(v * den) for v in row] for row in M]


def _threshold(p: RealAlgebraic) -> int:
    """Branch A is taken iff a uniform 64-bit draw is below this value."""
    if p.is_rational:
        return int(p.rational * 2**64)
    return int(p.approx(Fraction(1, 2**64)) * 2**64)


def simulate(loop: Loop, x: Sequence, runs: int, cap: int, seed: int) -> RunStats:
    """Monte-Carlo runs from a rational start vector.

    Run r draws its branch choices from the Philox stream keyed by
    (seed, r), so results do not depend on run order.  Positive rescaling of
    the state never changes the sign of Cx, so the update matrices and x are
    scaled to integers.
    """
    if runs < 1 or cap < 1:
        raise ValueError("runs and cap must be positive")
    xv = as_real_vector(x, loop.n)
    if not all(v.is_rational for v in xv):
        raise ValueError("simulation needs a rational start vector")
    xr = [v.rational for v in xv]
    xden = lcm(*(v.denominator for v in xr))
    x0 = [int(v * xden) for v in xr]
    a_int = _integer_matrix(loop.A.to_fractions())
    b_int = _integer_matrix(loop.B.to_fractions())
    if loop.C.is_rational():
        c_int = _integer_matrix(loop.C.to_fractions())

        def guard(y: list[int]) -> bool:
            return all(sum(c * v for c, v in zip(row, y)) > 0 for row in c_int)
    else:
        def guard(y: list[int]) -> bool:
            return guard_holds(apply_guard(loop, [RealAlgebraic(v) for v in y]))

    thr = _threshold(loop.p)
    seed &= _SEED_MASK
    runtimes, finished = [], []
    for r in range(runs):
        bits = np.random.Philox(key=np.array([seed, r], dtype=np.uint64))
        y = list(x0)
        steps = 0
        done = False
        choices: list[bool] = []
        while True:
            if not guard(y):
                done = True
                break
            if steps == cap:
                break
            if not choices:
                choices = [int(u) < thr for u in bits.random_raw(_CHUNK)][::-1]
            M = a_int if choices.pop() else b_int
            y = [sum(c * v for c, v in zip(row, y) if c) for row in M]
            steps += 1
        runtimes.append(steps)
        finished.append(done)
    return RunStats(runs, cap, seed, tuple(runtimes), tuple(finished))
