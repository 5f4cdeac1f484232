from pathlib import Path

import numpy as np
import pytest

from elroc3 import ThreeClassSample
from elroc3.scenarios import get_scenario, sample_scenario

REPO = Path(__file__).resolve().parents[1]
SYNTHETIC_CSV = REPO / "demos" / "data" / "synthetic_three_group.csv"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def scen1_30():
    return sample_scenario(get_scenario(1), 30, 30, 30, seed=2718)


@pytest.fixture(scope="session")
def scen2_50():
    return sample_scenario(get_scenario(2), 50, 50, 50, seed=31415)


@pytest.fixture
def atoms_sample():
    """Tiny sample whose plug-in thresholds land on class-2 values."""
    return ThreeClassSample.from_arrays([0, 1, 2, 3, 4], [3, 4, 5, 6], [5, 6, 7, 8, 9])


@pytest.fixture(scope="session")
def synthetic_csv():
    assert SYNTHETIC_CSV.exists(), "run demos/00_make_synthetic_data.py"
    return SYNTHETIC_CSV


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Record one PASS/FAIL line per acceptance check; echoed in the terminal summary."""

    def record(label: str, passed: bool, detail: str) -> bool:
        line = f"{label}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
