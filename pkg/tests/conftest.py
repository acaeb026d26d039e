import warnings

import numpy as np
import pytest

from siis.graph import Graph


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(key, text): acceptance criterion checked by a test")


_OUTCOMES = {}


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if hasattr(report, "wasxfail"):
            status = "FAIL (known, xfail)"
        elif report.outcome == "skipped":
            status = "SKIP"
        else:
            status = "PASS" if report.outcome == "passed" else "FAIL"
        detail = dict(report.user_properties).get("detail", "")
        _OUTCOMES[report.nodeid] = (crit, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for crit, status, detail in sorted(_OUTCOMES.values()):
        line = f"criterion {crit}: {status}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))


@pytest.fixture
def chain10():
    n = 10
    return Graph.from_edges(n, np.column_stack([np.arange(n - 1), np.arange(1, n)]))


@pytest.fixture
def two_cliques():
    """Two 5-cliques joined by a single weak edge (4, 5)."""
    edges = [(i, j) for blk in (range(5), range(5, 10))
             for i in blk for j in blk if i < j]
    w = [1.0] * len(edges)
    edges.append((4, 5))
    w.append(0.1)
    return Graph.from_edges(10, edges, w)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def random_graph(rng, n, p=0.3, connected=True):
    """Erdos-Renyi graph with random weights; a spanning path when ``connected``."""
    iu = np.triu_indices(n, 1)
    mask = rng.random(len(iu[0])) < p
    edges = np.column_stack([iu[0][mask], iu[1][mask]])
    if connected:
        perm = rng.permutation(n)
        edges = np.vstack([edges, np.column_stack([perm[:-1], perm[1:]])])
    if not len(edges):
        edges = np.array([[0, 1]])
    return Graph.from_edges(n, edges, rng.uniform(0.1, 1.0, len(edges)))
