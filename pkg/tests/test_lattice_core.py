import numpy as np
import pytest
from hypothesis import given, strategies as st

from exceptions import DuplicateLabel, IndexOutOfRange, NotALattice, NotAPoset, NotBounded, UnknownBuiltin
from lattice_core import (
    atoms,
    build_lattice,
    builtin,
    check_lattice_laws,
    cover_pairs,
    is_0_distributive,
    is_boolean,
    is_distributive,
    is_ideal,
    is_modular,
    meet_join,
    principal_ideal,
)
from utilities import mask_of


def test_n5_is_0_distributive_but_not_modular(n5):
    assert n5.n == 5
    assert n5.names[n5.bottom] == "0" and n5.names[n5.top] == "1"
    assert is_0_distributive(n5).holds
    assert not is_modular(n5).holds
    assert not is_distributive(n5).holds


def test_m3_fails_0_distributivity_with_smallest_witness(m3):
    check = is_0_distributive(m3)
    assert not check.holds
    assert tuple(m3.names[x] for x in check.witness) == ("a", "b", "c")
    assert is_modular(m3).holds


def test_fig5_lattice_properties(fig5):
    assert is_0_distributive(fig5).holds
    assert not is_modular(fig5).holds


def test_chain_has_every_property():
    chain = builtin("chain_3")
    assert is_0_distributive(chain).holds
    assert is_modular(chain).holds
    assert is_distributive(chain).holds


def test_meet_join(n5):
    a, b, c = (n5.element(x) for x in "abc")
    assert meet_join(n5, a, b) == (n5.bottom, n5.top)
    assert meet_join(n5, a, c) == (a, c)


def test_cover_pairs_of_n5(n5):
    assert len(cover_pairs(n5)) == 5


def test_boolean_detection(n5):
    assert is_boolean(builtin("boolean_3"))
    assert len(atoms(builtin("boolean_3"))) == 3
    assert not is_boolean(n5)
    assert not is_boolean(builtin("m3"))


def test_principal_ideals(n5):
    ideal = principal_ideal(n5, n5.element("c"))
    assert [n5.names[x] for x in ideal.elements()] == ["0", "a", "c"]
    assert ideal.generator == n5.element("c")


def test_is_ideal(n5):
    assert is_ideal(n5, mask_of(n5.element(x) for x in ("0", "a", "c")))
    # a and b join to 1
    assert not is_ideal(n5, mask_of(n5.element(x) for x in ("0", "a", "b")))
    assert not is_ideal(n5, mask_of([n5.element("a")]))
    assert not is_ideal(n5, 0)


def test_cycle_is_not_a_poset():
    with pytest.raises(NotAPoset):
        build_lattice(["0", "a", "b", "1"], [("0", "a"), ("a", "b"), ("b", "a"), ("b", "1")])


def test_missing_bottom():
    with pytest.raises(NotBounded):
        build_lattice(["x", "y", "1"], [("x", "1"), ("y", "1")])


def test_bowtie_is_not_a_lattice():
    names = ["0", "a", "b", "c", "d", "1"]
    pairs = [("0", "a"), ("0", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "1"), ("d", "1")]
    with pytest.raises(NotALattice):
        build_lattice(names, pairs)


def test_duplicate_and_unknown_labels():
    with pytest.raises(DuplicateLabel):
        build_lattice(["0", "0"], [])
    with pytest.raises(IndexOutOfRange):
        build_lattice(["0", "1"], [("0", "2")])


def test_unknown_builtin():
    with pytest.raises(UnknownBuiltin):
        builtin("hexagon")


def test_tables_are_read_only(n5):
    with pytest.raises(ValueError):
        n5.meet[0, 0] = 1


@given(st.sampled_from(["n5", "m3", "fig5", "chain_1", "chain_4", "boolean_2", "boolean_3"]))
def test_builtins_satisfy_the_lattice_laws(name):
    L = builtin(name)
    assert all(check.holds for check in check_lattice_laws(L).values())
    assert np.array_equal(L.meet, L.meet.T)


@given(st.integers(min_value=0, max_value=4), st.integers(min_value=0, max_value=4),
       st.integers(min_value=0, max_value=4))
def test_distributive_lattices_are_0_distributive(k, i, j):
    L = builtin(f"boolean_{k}")
    assert is_distributive(L).holds
    assert is_0_distributive(L).holds
    x, y = i % L.n, j % L.n
    meet, join = meet_join(L, x, y)
    assert L.leq[meet, x] and L.leq[x, join]
