"""Drive an external SMT-LIB2 solver and read back its model."""

from __future__ import annotations

import shlex
import subprocess
import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ModelParseError, SolverError, SolverNotFound, SolverTimeout
from ..exactnum import IntPolynomial, RealAlgebraic, root_by_index

DEFAULT_SOLVER = "z3 -in"
DEFAULT_TIMEOUT = 60


@dataclass(frozen=True)
class SolverConfig:
    command: str = DEFAULT_SOLVER
    timeout: int = DEFAULT_TIMEOUT

    def argv(self) -> list[str]:
        argv = shlex.split(self.command)
        if not argv:
            raise SolverNotFound("empty solver command")
        return argv


@dataclass
class SolverResult:
    status: str  # "sat", "unsat" or "unknown"
    model: dict[str, RealAlgebraic] = field(default_factory=dict)
    seconds: float = 0.0
    detail: str = ""


# ---------------------------------------------------------------------------
# s-expressions


def parse_sexprs(text: str) -> list:
    """All top-level s-expressions; atoms stay strings, quoted strings keep quotes."""
    tokens: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append(ch)
            i += 1
        elif ch == '"':
            j = i + 1
            while j < len(text) and not (text[j] == '"' and text[j - 1] != "\\"):
                j += 1
            tokens.append(text[i:j + 1])
            i = j + 1
        elif ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch == "|":
            j = text.index("|", i + 1)
            tokens.append(text[i + 1:j])
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in '()";':
                j += 1
            tokens.append(text[i:j])
            i = j
    out: list = []
    stack: list[list] = []
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise ModelParseError("unbalanced ')' in solver output")
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
        else:
            (stack[-1] if stack else out).append(tok)
    if stack:
        raise ModelParseError("unbalanced '(' in solver output")
    return out


def _number(atom: str) -> Fraction:
    try:
        return Fraction(atom)
    except ValueError:
        raise ModelParseError(f"not a number: {atom!r}") from None


def _rational_value(expr) -> Fraction:
    if isinstance(expr, str):
        return _number(expr)
    head, *args = expr
    if head == "-" and len(args) == 1:
        return -_rational_value(args[0])
    if head == "-":
        return _rational_value(args[0]) - sum((_rational_value(a) for a in args[1:]), Fraction(0))
    if head == "/" and len(args) == 2:
        return _rational_value(args[0]) / _rational_value(args[1])
    if head == "+":
        return sum((_rational_value(a) for a in args), Fraction(0))
    if head == "*":
        out = Fraction(1)
        for a in args:
            out *= _rational_value(a)
        return out
    raise ModelParseError(f"unsupported model value {expr!r}")


def _poly_value(expr) -> list[Fraction]:
    """Coefficient list (constant first) of a univariate polynomial expression."""
    if isinstance(expr, str):
        try:
            return [_number(expr)]
        except ModelParseError:
            return [Fraction(0), Fraction(1)]  # the bound variable
    head, *args = expr
    if head == "+":
        acc: list[Fraction] = []
        for a in args:
            acc = _padd(acc, _poly_value(a))
        return acc
    if head == "-":
        parts = [_poly_value(a) for a in args]
        if len(parts) == 1:
            return [-c for c in parts[0]]
        acc = parts[0]
        for q in parts[1:]:
            acc = _padd(acc, [-c for c in q])
        return acc
    if head == "*":
        acc = [Fraction(1)]
        for a in args:
            acc = _pmul(acc, _poly_value(a))
        return acc
    if head == "^":
        base = _poly_value(args[0])
        k = int(_rational_value(args[1]))
        acc = [Fraction(1)]
        for _ in range(k):
            acc = _pmul(acc, base)
        return acc
    if head == "/":
        num = _poly_value(args[0])
        den = _rational_value(args[1])
        return [c / den for c in num]
    raise ModelParseError(f"unsupported polynomial term {expr!r}")


def _padd(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    n = max(len(p), len(q))
    return [(p[k] if k < len(p) else 0) + (q[k] if k < len(q) else 0) for k in range(n)]


def _pmul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def model_value(expr) -> RealAlgebraic:
    """Rational literal or (root-obj poly index) to an exact value."""
    if isinstance(expr, list) and expr and expr[0] == "root-obj":
        if len(expr) != 3:
            raise ModelParseError(f"malformed root object {expr!r}")
        poly = IntPolynomial.from_rationals(_poly_value(expr[1]))
        try:
            return root_by_index(poly, int(expr[2]))
        except (IndexError, ValueError) as exc:
            raise ModelParseError(str(exc)) from exc
    return RealAlgebraic(_rational_value(expr))


def parse_model(sexprs: list) -> dict[str, RealAlgebraic]:
    model: dict[str, RealAlgebraic] = {}
    for top in sexprs:
        if not isinstance(top, list):
            continue
        entries = top[1:] if top and top[0] == "model" else top
        for entry in entries:
            if isinstance(entry, list) and len(entry) == 5 and entry[0] == "define-fun":
                _, name, params, sort, value = entry
                if params == [] and sort == "Real":
                    model[name] = model_value(value)
    return model


def parse_output(text: str) -> tuple[str, dict[str, RealAlgebraic]]:
    sexprs = parse_sexprs(text)
    if not sexprs or not isinstance(sexprs[0], str):
        raise ModelParseError(f"no check-sat answer in solver output: {text[:200]!r}")
    status = sexprs[0]
    if status not in ("sat", "unsat", "unknown"):
        raise ModelParseError(f"unexpected solver answer {status!r}")
    model = parse_model(sexprs[1:]) if status == "sat" else {}
    return status, model


def solve(script: str, config: SolverConfig) -> SolverResult:
    """Run the solver on a script given on standard input."""
    start = time.perf_counter()
    try:
        proc = subprocess.run(
            config.argv(),
            input=script,
            capture_output=True,
            text=True,
            timeout=config.timeout,
        )
    except FileNotFoundError as exc:
        raise SolverNotFound(f"solver command not found: {config.command!r}") from exc
    except subprocess.TimeoutExpired as exc:
        raise SolverTimeout(f"solver exceeded {config.timeout} s") from exc
    elapsed = time.perf_counter() - start
    out = proc.stdout
    if not out.strip():
        raise SolverError(f"solver produced no output (exit {proc.returncode}): {proc.stderr.strip()[:200]}")
    status, model = parse_output(out)
    return SolverResult(status, model, elapsed)
