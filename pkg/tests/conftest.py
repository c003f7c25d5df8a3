import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spinbound import LatticeSpec, build_lattice, from_edge_list


@pytest.fixture
def ring4():
    return build_lattice(LatticeSpec((4,), "periodic"))


@pytest.fixture
def triangle():
    return from_edge_list([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def single_edge():
    return from_edge_list([(0, 1)])


def chain(n):
    return build_lattice(LatticeSpec((n,), "open"))


def ring(n):
    return build_lattice(LatticeSpec((n,), "periodic"))


@pytest.fixture
def chain4():
    return chain(4)
