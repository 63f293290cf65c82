from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from pastdecide.loopmodel import load_loop
from pastdecide.spectral import analyze

FIXTURES = Path(__file__).parent / "fixtures"
LOOP_NAMES = ("spiral", "zero", "neg2", "rotation", "oned")

requires_z3 = pytest.mark.skipif(shutil.which("z3") is None, reason="z3 binary not on PATH")


def fixture_path(name: str) -> str:
    return str(FIXTURES / f"{name}.json")


_ANALYSES: dict = {}


def analysis_of(name: str):
    """Cached analysis for a fixture loop (loops and analyses are immutable in use)."""
    if name not in _ANALYSES:
        _ANALYSES[name] = analyze(load_loop(fixture_path(name)))
    return _ANALYSES[name]


@pytest.fixture(scope="session")
def spiral():
    return analysis_of("spiral")


@pytest.fixture(scope="session")
def oned():
    return analysis_of("oned")


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(number, []).append((ok, detail))
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        for ok, detail in ACCEPTANCE[number]:
            terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
