import numpy as np
import pytest

from taxishare.generate import random_instance
from taxishare.graph import RoadNetwork


@pytest.fixture
def line_net():
    # a -> b -> c with weights 3, 4; walking mirrors driving
    edges = [(0, 1, 3), (1, 2, 4)]
    return RoadNetwork(3, edges, edges + [(1, 0, 3), (2, 1, 4)])


@pytest.fixture(scope="session")
def grid_instance():
    return random_instance(7, "grid", 64, vehicles=4, requests=20)


def grid8(seed=0):
    rng = np.random.default_rng(seed)
    edges = []
    for r in range(8):
        for c in range(8):
            v = r * 8 + c
            if c < 7:
                edges += [(v, v + 1, int(rng.integers(1, 20))), (v + 1, v, int(rng.integers(1, 20)))]
            if r < 7:
                edges += [(v, v + 8, int(rng.integers(1, 20))), (v + 8, v, int(rng.integers(1, 20)))]
    return RoadNetwork(64, edges, edges)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion (shown in the summary)."""
    def emit(criterion, ok, detail):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail})"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
