import numpy as np
import pytest

from wspan.generators import random_graph
from wspan.graph import WeightedGraph


@pytest.fixture
def triangle():
    # a-b 1, b-c 1, a-c 3
    return WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)])


@pytest.fixture
def small_random():
    return random_graph(40, 120, seed=3)


def random_weighted(rng: np.random.Generator, n: int, edges, unit=False) -> WeightedGraph:
    w = np.ones(len(edges)) if unit else 1.0 - rng.random(len(edges))
    return WeightedGraph(n, [(u, v, float(x)) for (u, v), x in zip(edges, w)])


_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one criterion outcome; printed as a PASS/FAIL line at session end."""

    def record(index: int, name: str, ok: bool, detail: str) -> None:
        _ACCEPTANCE[index] = (name, bool(ok), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for idx in sorted(_ACCEPTANCE):
        name, ok, detail = _ACCEPTANCE[idx]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {idx}. {name}: {detail}")
