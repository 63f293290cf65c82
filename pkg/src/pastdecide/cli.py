"""Command-line interface: decide, witness, explain and simulate."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .errors import GuardViolatedAtLift, InputError, ParseError, PastError
from .exactnum import RealAlgebraic
from .lifting import lift_witness
from .loopmodel import Loop, SemiringTag, load_loop, simulate
from .spectral import explain_report, explain_text
from .witness import SolverConfig, Status, Verdict, decide
from .witness.solver import DEFAULT_SOLVER, DEFAULT_TIMEOUT

EXIT_TERMINATING = 0
EXIT_NONTERMINATING = 10
EXIT_UNKNOWN = 20
EXIT_INPUT_ERROR = 2

_EXIT_BY_STATUS = {
    Status.TERMINATING: EXIT_TERMINATING,
    Status.NONTERMINATING: EXIT_NONTERMINATING,
    Status.UNKNOWN: EXIT_UNKNOWN,
}


@dataclass(frozen=True)
class CliConfig:
    solver_command: str
    timeout_seconds: int
    single_query: bool
    pretty: bool
    timings: bool

    @property
    def solver(self) -> SolverConfig:
        return SolverConfig(self.solver_command, self.timeout_seconds)


def resolve_config(args: argparse.Namespace, environ=os.environ) -> CliConfig:
    """Flags win over environment variables, which win over built-in defaults."""
    command = args.solver_cmd or environ.get("PAST_SOLVER_CMD") or DEFAULT_SOLVER
    if not command.strip():
        raise ParseError("solver command must be non-empty", "--solver-cmd")
    raw_timeout = args.timeout if args.timeout is not None else environ.get("PAST_TIMEOUT", DEFAULT_TIMEOUT)
    try:
        timeout = int(raw_timeout)
    except (TypeError, ValueError):
        raise ParseError(f"not an integer: {raw_timeout!r}", "timeout") from None
    if timeout < 1:
        raise ParseError("must be at least 1 second", "timeout")
    return CliConfig(
        command,
        timeout,
        getattr(args, "single_query", False),
        getattr(args, "pretty", False),
        getattr(args, "timings", False),
    )


def dump_json(obj) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _load(args: argparse.Namespace) -> Loop:
    semiring = SemiringTag.parse(args.semiring) if args.semiring else None
    return load_loop(args.loop, semiring)


def parse_vector(text: str) -> tuple[RealAlgebraic, ...]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, "--input") from exc
    if not isinstance(doc, list):
        raise ParseError("expected a JSON list", "--input")
    return tuple(RealAlgebraic.from_json(v, "--input") for v in doc)


# ---------------------------------------------------------------------------
# text rendering


def _verdict_text(report: dict) -> str:
    lines = [f"status:   {report['status']}", f"semiring: {report['semiring']}"]
    if report["witness"] is not None:
        lines.append(f"witness:  {report['witness']}")
        cert = report["certificate"]
        lines.append(f"direction {cert['d']}, dominant groups {cert['assignment']}, margins {cert['margins']}")
    lift = report.get("lift")
    if lift is not None:
        lines.append(
            f"lift: epsilon={lift['epsilon']} r={lift['r']} l={lift['l']} j={lift['j']} k={lift['k']}"
        )
        lines.append(f"lifted start y = {lift['y']}, C*y = {lift['guard_at_y']}")
    diag = report["diagnostics"]
    lines.append(f"disjuncts: {diag['disjuncts']} of {diag['disjuncts_raw']} kept, {len(diag['queries'])} queries")
    for note in diag.get("notes", []):
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def _stats_text(report: dict) -> str:
    return "\n".join(f"{k:<28}{report[k]}" for k in sorted(report)) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def _emit_verdict(verdict: Verdict, config: CliConfig, extra: dict | None = None) -> int:
    report = verdict.to_json(include_timings=config.timings)
    if extra:
        report.update(extra)
    sys.stdout.write(_verdict_text(report) if config.pretty else dump_json(report))
    for note in report["diagnostics"].get("notes", []):
        if verdict.status is Status.UNKNOWN:
            print(f"pastdecide: {note}", file=sys.stderr)
    for q in report["diagnostics"].get("queries", []):
        if q.get("status") == "error":
            print(f"pastdecide: solver error: {q['error']}", file=sys.stderr)
    return _EXIT_BY_STATUS[verdict.status]


def cmd_decide(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    loop = _load(args)
    verdict = decide(loop, config=config.solver, single_query=config.single_query)
    return _emit_verdict(verdict, config)


def cmd_witness(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    loop = _load(args)
    verdict = decide(loop, config=config.solver, single_query=config.single_query)
    extra = {}
    if args.lift and verdict.status is Status.NONTERMINATING:
        try:
            extra["lift"] = lift_witness(verdict.analysis, verdict.witness).to_json()
        except GuardViolatedAtLift as exc:
            extra["lift"] = None
            verdict.diagnostics.setdefault("notes", []).append(f"lifting failed: {exc}")
            print(f"pastdecide: lifting failed: {exc}", file=sys.stderr)
    return _emit_verdict(verdict, config, extra)


def cmd_explain(args: argparse.Namespace) -> int:
    from .spectral import analyze

    analysis = analyze(_load(args))
    sys.stdout.write(explain_text(analysis) + "\n" if args.pretty else dump_json(explain_report(analysis)))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    loop = _load(args)
    x = parse_vector(args.input)
    if len(x) != loop.n:
        raise ParseError(f"vector of length {len(x)}, loop has n = {loop.n}", "--input")
    if args.runs < 1:
        raise ParseError("must be at least 1", "--runs")
    if args.cap < 1:
        raise ParseError("must be at least 1", "--cap")
    if not 0 <= args.seed < 2**64:
        raise ParseError("must fit in 64 bits", "--seed")
    report = simulate(loop, x, args.runs, args.cap, args.seed).to_json()
    sys.stdout.write(_stats_text(report) if args.pretty else dump_json(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pastdecide",
        description="Decide positive almost-sure termination of simple randomized linear loops.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("loop", help="loop file (JSON)")
    common.add_argument(
        "--semiring",
        choices=[t.value for t in SemiringTag],
        help="input domain (default: the file's 'semiring' entry, else A)",
    )
    common.add_argument("--pretty", action="store_true", help="human-readable text instead of JSON")

    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--solver-cmd", help=f"SMT-LIB2 solver reading stdin (env PAST_SOLVER_CMD, default {DEFAULT_SOLVER!r})")
    solving.add_argument("--timeout", type=int, help=f"seconds per solver query (env PAST_TIMEOUT, default {DEFAULT_TIMEOUT})")
    solving.add_argument("--single-query", action="store_true", help="send the whole witness formula as one query")
    solving.add_argument("--timings", action="store_true", help="include solver wall-clock times in the report")

    p = sub.add_parser("decide", parents=[common, solving], help="decide termination over a semiring")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("witness", parents=[common, solving], help="decide and print a witness of non-termination")
    p.add_argument("--lift", action="store_true", help="also lift the witness to a start vector y = A^j B^k x")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("explain", parents=[common], help="print eigenvalues, gamma maps and groups")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo runs from a start vector")
    p.add_argument("--input", required=True, help='start vector as JSON, e.g. "[1, 1, 0]" or "[\\"1/2\\"]"')
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--cap", type=int, default=1000, help="step budget per run")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"pastdecide: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except PastError as exc:
        print(f"pastdecide: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
