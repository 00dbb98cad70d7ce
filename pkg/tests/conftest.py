import numpy as np
import pytest

from rewire_stability.graph import graph_from_edge_list

_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_criterion():
    """Record one acceptance criterion outcome for the terminal summary."""

    def record(name: str, passed: bool, detail: str = "") -> None:
        _criteria.append((name, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_edges():
    """Edges (0,1) and (2,3) on four nodes; the smallest rewirable graph."""
    return graph_from_edge_list(4, [(0, 1), (2, 3)])


def random_graph(rng, n, p):
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return graph_from_edge_list(n, zip(iu[keep].tolist(), ju[keep].tolist()))
