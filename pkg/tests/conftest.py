import itertools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from freeiso.graphkit import DirectedSymGraph  # noqa: E402
from freeiso.metric import validate_metric  # noqa: E402


def und(vs, es):
    return DirectedSymGraph.from_undirected(list(vs), list(es))


def path_graph(n):
    return und(range(n + 1), [(i, i + 1) for i in range(n)])


def cycle_graph(n):
    return und(range(n), [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return und(range(n), itertools.combinations(range(n), 2))


def wheel(n_rim):
    rim = [(i, (i + 1) % n_rim) for i in range(n_rim)]
    return und(range(n_rim + 1), rim + [(n_rim, i) for i in range(n_rim)])


def prism():
    return und(range(6), [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])


BOWTIE = und(range(5), [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
THETA = und(["s", "t", "a", "b", "c"], [("s", "a"), ("a", "t"), ("s", "b"), ("b", "t"), ("s", "c"), ("c", "t")])

GOLDEN = {
    "edge": (path_graph(1), 2),
    "P2": (path_graph(2), 8),
    "P3": (path_graph(3), 48),
    "C3": (cycle_graph(3), 12),
    "C4": (cycle_graph(4), 48),
    "K4": (complete_graph(4), 48),
    "bowtie": (BOWTIE, 288),
    # fixed by tests/oracles.brute_isometry_maps before the piece route was trusted
    "theta": (THETA, 96),
}


def equilateral(n, side=1):
    return validate_metric([[0 if i == j else side for j in range(n)] for i in range(n)])


def collinear3():
    return validate_metric([[0, 1, 2], [1, 0, 1], [2, 1, 0]])


@pytest.fixture
def golden():
    return GOLDEN
