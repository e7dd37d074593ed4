import numpy as np
import pytest

from funcpool.data import make_graph


def random_graph(rng, nv, num_labels=3, num_classes=2, p=0.4):
    edges = [(i, j) for i in range(nv) for j in range(i + 1, nv) if rng.random() < p]
    return make_graph(nv, edges, rng.integers(0, num_labels, nv), int(rng.integers(0, num_classes)))


def permute_graph(g, perm):
    """Relabel vertex i of ``g`` as ``perm[i]``."""
    labels = [0] * g.num_vertices
    for i, lab in enumerate(g.vertex_labels):
        labels[perm[i]] = lab
    edges = [(perm[i], perm[j]) for i, j in g.edges]
    return make_graph(g.num_vertices, edges, labels, g.class_label)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def triangle_plus_tail():
    # 0-1-2 triangle with a pendant vertex 3 on 2
    return make_graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)], [0, 1, 2, 1], 1)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in results:
        terminalreporter.write_line(f"{status:<8} {criterion}: {detail}")
