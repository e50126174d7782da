import math
from contextlib import contextmanager

import pytest

from tsp2opt import Instance, make_tour

ACCEPTANCE_LINES: list[str] = []


class Outcome:
    def __init__(self, detail: str):
        self.detail = detail


@contextmanager
def criterion(label: str, detail: str = ""):
    """Record a PASS/FAIL line for the terminal summary, re-raising failures.

    The yielded object's ``detail`` may be updated inside the block.
    """
    outcome = Outcome(detail)
    try:
        yield outcome
    except BaseException as exc:
        ACCEPTANCE_LINES.append(f"FAIL  {label}: {exc!s:.200}")
        raise
    ACCEPTANCE_LINES.append(f"PASS  {label}{'  ' + outcome.detail if outcome.detail else ''}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def euclidean(points, name="points"):
    rows = [[math.hypot(p[0] - q[0], p[1] - q[1]) for q in points] for p in points]
    return Instance.from_weights(rows, mode="float", name=name)


@pytest.fixture
def crossing_square():
    """Four points visited so that the two diagonals cross."""
    inst = euclidean([(0, 0), (2, 2), (2, 0), (0, 2)], "crossing-square")
    return inst, make_tour(inst, [0, 1, 2, 3])


@pytest.fixture
def unit_square():
    return euclidean([(0, 0), (1, 0), (1, 1), (0, 1)], "unit-square")
