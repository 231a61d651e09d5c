import os

import pytest

from lattice_core import Ideal, builtin
from quasimodule import canonical
from worked_examples import product_qm

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def n5():
    return builtin("n5")


@pytest.fixture
def m3():
    return builtin("m3")


@pytest.fixture
def fig5():
    return builtin("fig5")


@pytest.fixture(scope="session")
def ex1_qm():
    """N5 x [0,a] over N5."""
    return product_qm("n5", ["1", "a"])


@pytest.fixture(scope="session")
def n5_qm():
    return product_qm("n5", ["1"])


@pytest.fixture(scope="session")
def m3_qm():
    """M3 x [0,a] over M3."""
    return product_qm("m3", ["1", "a"])


@pytest.fixture(scope="session")
def fig5_qm():
    return product_qm("fig5", ["1", "1"])


@pytest.fixture(scope="session")
def trivial_qm():
    L = builtin("n5")
    return canonical(L, [Ideal(L, 1 << L.bottom)])


def labelled(Q, vectors):
    """Carrier bitset of vectors written with element labels."""
    mask = 0
    for labels in vectors:
        mask |= 1 << Q.position(Q.parse_vector(labels))
    return mask
