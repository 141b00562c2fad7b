import numpy as np
import pytest

from loadcap import mesh as msh

ACCEPTANCE_VERDICTS = []


def record_verdict(line: str):
    """Collect a criterion pass/fail line for the end-of-run summary."""
    ACCEPTANCE_VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)


def make_two_tet_mesh() -> msh.Mesh:
    """Two tetrahedra sharing a face; the three faces around node 0 are
    supported, the three around node 4 are loaded."""
    nodes = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]],
                     dtype=float)
    elements = [msh.Element(msh.TETRAHEDRON, (0, 1, 2, 3)),
                msh.Element(msh.TETRAHEDRON, (1, 2, 3, 4))]
    facets = [msh.Facet((0, 1, 2), msh.GAMMA0),
              msh.Facet((0, 1, 3), msh.GAMMA0),
              msh.Facet((0, 2, 3), msh.GAMMA0),
              msh.Facet((1, 2, 4), msh.GAMMAT),
              msh.Facet((1, 3, 4), msh.GAMMAT),
              msh.Facet((2, 3, 4), msh.GAMMAT)]
    return msh.Mesh(3, nodes, elements, facets)


@pytest.fixture
def two_tet_mesh():
    return make_two_tet_mesh()


@pytest.fixture
def unit_bar():
    return msh.generate_bar(1.0, 1.0, 1)


@pytest.fixture
def unit_square():
    return msh.generate_rectangle(1.0, 1.0, 1, 1, "left", "right")
