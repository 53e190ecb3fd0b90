import json
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def prng_bits(n, seed=0):
    """Reference coin flips from numpy's PCG64."""
    return np.random.default_rng(seed).integers(0, 2, n, dtype=np.uint8)


@pytest.fixture(scope="session")
def special_table():
    return json.loads((FIXTURES / "special_functions.json").read_text())


@pytest.fixture(scope="session")
def ais_bounds():
    return json.loads((FIXTURES / "ais31_bounds.json").read_text())


@pytest.fixture(scope="session")
def ideal_stream():
    return prng_bits(1_000_000, seed=2024)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
