from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rdomset.balls import Ball  # noqa: E402
from rdomset.graph import Graph  # noqa: E402

# Path v1..v5 and the star u; a, b, c.  Ball ids A..E map to 1..5.
A, B, C, D, E = 1, 2, 3, 4, 5
U = 0

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def p5() -> Graph:
    return Graph.build([1, 2, 3, 4, 5], [(i, i + 1, 1) for i in range(1, 5)])


@pytest.fixture
def p5_balls() -> list[Ball]:
    return [Ball(A, 1, 2), Ball(E, 5, 2)]


@pytest.fixture
def star3() -> Graph:
    return Graph.build([0, 1, 2, 3], [(0, 1, 1), (0, 2, 1), (0, 3, 1)])


@pytest.fixture
def star3_balls() -> list[Ball]:
    return [Ball(A, 1, 1), Ball(B, 2, 1), Ball(C, 3, 1)]
