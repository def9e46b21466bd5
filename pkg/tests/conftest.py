import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from hyperprop import _accel
from hyperprop.hypergraph import Hypergraph

BACKENDS = ["numba", "numpy"]


@pytest.fixture
def n4_example():
    # 0-1 starts it, {0,1,2} adds 2, {1,2,3} adds 3
    return Hypergraph(4, [(0, 1)], [(0, 1, 2), (1, 2, 3)])


@pytest.fixture(params=BACKENDS)
def backend(request):
    with _accel.using(request.param):
        yield request.param


def random_hypergraph(rng: np.random.Generator, n: int, d2: float, d3: float) -> Hypergraph:
    pairs = [e for e in itertools.combinations(range(n), 2) if rng.random() < d2]
    triples = [e for e in itertools.combinations(range(n), 3) if rng.random() < d3]
    return Hypergraph(n, np.array(pairs, np.int32).reshape(-1, 2), np.array(triples, np.int32).reshape(-1, 3))


@st.composite
def hypergraphs(draw, min_n=2, max_n=9):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    triples = list(itertools.combinations(range(n), 3))
    e2 = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    e3 = draw(st.lists(st.sampled_from(triples), unique=True, max_size=min(len(triples), 30))) if triples else []
    return Hypergraph(n, np.array(e2, np.int32).reshape(-1, 2), np.array(e3, np.int32).reshape(-1, 3))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for the terminal summary, then assert."""

    def report(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title} -- {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
