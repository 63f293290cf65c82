from __future__ import annotations

import argparse
import json
import subprocess
import sys

import pytest

from conftest import analysis_of, fixture_path, requires_z3
from pastdecide.cli import main, resolve_config
from pastdecide.errors import ParseError
from pastdecide.exactnum import RealAlgebraic
from pastdecide.witness import membership_check


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_config_precedence():
    args = argparse.Namespace(solver_cmd=None, timeout=None)
    assert resolve_config(args, {}).solver_command == "z3 -in"
    env = {"PAST_SOLVER_CMD": "cvc5 --lang smt2", "PAST_TIMEOUT": "7"}
    cfg = resolve_config(args, env)
    assert (cfg.solver_command, cfg.timeout_seconds) == ("cvc5 --lang smt2", 7)
    cfg = resolve_config(argparse.Namespace(solver_cmd="yices-smt2", timeout=3), env)
    assert (cfg.solver_command, cfg.timeout_seconds) == ("yices-smt2", 3)
    with pytest.raises(ParseError):
        resolve_config(argparse.Namespace(solver_cmd=None, timeout=0), {})
    with pytest.raises(ParseError):
        resolve_config(args, {"PAST_TIMEOUT": "soon"})


@requires_z3
def test_decide_exit_codes(capsys):
    code, out, _ = run(capsys, "decide", fixture_path("spiral"), "--semiring", "A")
    assert code == 10 and json.loads(out)["status"] == "NONTERMINATING"
    code, out, _ = run(capsys, "decide", fixture_path("zero"))
    assert code == 0 and json.loads(out)["status"] == "TERMINATING"


def test_malformed_file_exits_with_field_diagnostic(capsys):
    code, out, err = run(capsys, "decide", fixture_path("malformed"))
    assert code == 2 and out == ""
    assert "field 'A'" in err and "line 4" in err


def test_missing_file_is_an_input_error(capsys):
    code, _, err = run(capsys, "explain", "/nonexistent/loop.json")
    assert code == 2 and "cannot read" in err


def test_missing_solver_exits_unknown(capsys):
    code, out, err = run(capsys, "decide", fixture_path("spiral"), "--solver-cmd", "no-such-solver-binary")
    assert code == 20 and json.loads(out)["status"] == "UNKNOWN"
    assert "SolverNotFound" in err


@requires_z3
def test_witness_with_lift(capsys):
    code, out, _ = run(capsys, "witness", fixture_path("spiral"), "--lift")
    assert code == 10
    report = json.loads(out)
    x = [RealAlgebraic.from_json(v) for v in report["witness"]]
    assert (x[0] + x[1]).sign() > 0
    assert report["certificate"]["d"] == "p"
    lift = report["lift"]
    assert set(lift) >= {"epsilon", "r", "l", "j", "k", "y"}
    assert all(RealAlgebraic.from_json(v).sign() > 0 for v in lift["guard_at_y"])
    # round trip: the printed witness reproduces the printed margins exactly
    cert = membership_check(x, analysis_of("spiral"))
    assert [m.to_json() for m in cert.margins] == report["certificate"]["margins"]


@requires_z3
def test_witness_over_integers_and_rotation(capsys):
    code, out, _ = run(capsys, "witness", fixture_path("spiral"), "--semiring", "Z")
    assert code == 10
    assert all(RealAlgebraic.from_json(v).rational.denominator == 1 for v in json.loads(out)["witness"])
    code, out, _ = run(capsys, "witness", fixture_path("rotation"), "--lift")
    report = json.loads(out)
    assert code == 0 and report["witness"] is None and "lift" not in report


@requires_z3
def test_pretty_verdict(capsys):
    code, out, _ = run(capsys, "witness", fixture_path("spiral"), "--lift", "--pretty")
    assert code == 10 and out.startswith("status:   NONTERMINATING")
    assert "lift: epsilon=1/2" in out


def test_explain(capsys):
    code, out, _ = run(capsys, "explain", fixture_path("spiral"))
    report = json.loads(out)
    assert code == 0
    assert [g["ratio"] for g in report["groups"]] == ["1/2", "2"]
    assert report["groups"][0]["growth_index_enclosure"] == ["14.142135623730950", "14.142135623730951"]
    code, out, _ = run(capsys, "explain", fixture_path("spiral"), "--pretty")
    assert "growth index" in out


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", fixture_path("neg2"), "--input", "[1]")
    stats = json.loads(out)
    assert code == 0 and stats["mean_runtime_of_terminated"] == "1" and stats["survival_fraction"] == "0"


@pytest.mark.parametrize(
    "vector, message",
    [("[1.5]", "inexact"), ("[1, 2]", "length"), ("{}", "JSON list"), ("[", "--input")],
)
def test_simulate_rejects_bad_vectors(capsys, vector, message):
    code, _, err = run(capsys, "simulate", fixture_path("neg2"), "--input", vector)
    assert code == 2 and message in err


def test_simulate_is_byte_identical_across_processes():
    argv = [sys.executable, "-m", "pastdecide", "simulate", fixture_path("spiral"), "--input", "[1,1,0]", "--seed", "7", "--runs", "200"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and b'"seed": 7' in first
