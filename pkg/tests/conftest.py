import itertools

import pytest

from loopcross.lattice import GridGeometry, Subgraph, block, certify_disc, edge
from loopcross.percolation import Config


def plaquettes(x_max: int, y_max: int):
    """Unit-cell edge sets of a doubled-coordinate block."""
    cells = []
    for i in range(0, x_max, 2):
        for j in range(0, y_max, 2):
            q = [(i, j), (i + 2, j), (i + 2, j + 2), (i, j + 2)]
            cells.append(frozenset(edge(q[k], q[(k + 1) % 4]) for k in range(4)))
    return cells


def all_sourceless(sub: Subgraph):
    """Every sourceless config on a rectangular block, via its cycle space."""
    x_max = max(v[0] for v in sub.vertices)
    y_max = max(v[1] for v in sub.vertices)
    cells = plaquettes(x_max, y_max)
    seen = set()
    out = []
    for r in range(len(cells) + 1):
        for combo in itertools.combinations(range(len(cells)), r):
            s = frozenset()
            for c in combo:
                s = s ^ cells[c]
            if s not in seen:
                seen.add(s)
                out.append(Config(sub, s))
    return out


@pytest.fixture(scope="session")
def grid1():
    return GridGeometry(1)


@pytest.fixture(scope="session")
def disc3x3(grid1):
    return certify_disc(block(grid1, 0, 0, 4, 4))


@pytest.fixture(scope="session")
def disc4x4(grid1):
    return certify_disc(block(grid1, 0, 0, 6, 6))


@pytest.fixture(scope="session")
def configs3x3(disc3x3):
    return all_sourceless(disc3x3.graph)


@pytest.fixture(scope="session")
def configs4x4(disc4x4):
    return all_sourceless(disc4x4.graph)
