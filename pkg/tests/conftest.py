import json
from pathlib import Path

import numpy as np
import pytest

from randers_holonomy import ModelVariant

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def oracle():
    return json.loads((DATA / "oracle.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=[0.1, 0.5, 0.9], ids=lambda a: f"a1={a}")
def shen(request):
    return ModelVariant.shen(request.param, 1)


def random_points(rng, n, radius=0.9):
    r = radius * np.sqrt(rng.uniform(0, 1, n))
    th = rng.uniform(0, 2 * np.pi, n)
    return np.array([r * np.cos(th), r * np.sin(th)])


# acceptance lines are collected by tests/test_acceptance.py and echoed at the end of the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
