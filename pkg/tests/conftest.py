import numpy as np
import pytest

from helidiag.core import Grid, ScalarField

# criterion number -> (passed, detail); filled by test_acceptance.py
CRITERIA: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str):
    CRITERIA[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def grid2():
    return Grid(2, 32)


@pytest.fixture
def grid3():
    return Grid(3, 16)


def trig(grid, func):
    return ScalarField.from_function(grid, func)
