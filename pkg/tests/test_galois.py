import pytest
from hypothesis import given, settings, strategies as st

from exceptions import NotClosed, NotClosedInput, NotSubquasimodule, NotZeroDistributive
from galois import (
    RawSubset,
    closed_join,
    closed_lattice_iso,
    closed_subquasimodules,
    double_perp,
    factorize_closed,
    is_antitone_involution,
    is_closed,
    is_splitting,
    perp,
    perp_in_factor,
    splitting_subquasimodules,
    sum_set,
)
from quasimodule import factor_qm, lift_elements, product_mask
from subquasi import SubQM, all_subquasimodules
from utilities import mask_of
import worked_examples as golden
from worked_examples import product_qm

from conftest import labelled

EX1 = product_qm("n5", ["1", "a"])


def _elements(Q, labels):
    return mask_of(Q.lattice.element(x) for x in labels)


def test_perp_of_the_bounds(ex1_qm):
    assert perp(ex1_qm, 0) == ex1_qm.full
    assert perp(ex1_qm, ex1_qm.zero_mask) == ex1_qm.full
    assert perp(ex1_qm, ex1_qm.full) == ex1_qm.zero_mask


def test_n5_principal_perps(n5_qm):
    L = n5_qm.lattice
    for x, expected in golden.N5_PERPS.items():
        assert perp(n5_qm, [(L.element(x),)]) == labelled(n5_qm, [(e,) for e in expected])


def _reference(Q):
    return {labelled(Q, vectors): name for vectors, name in golden.ex1_reference_names().items()}


def test_ex1_perp_table(ex1_qm):
    subs = all_subquasimodules(ex1_qm)
    reference = _reference(ex1_qm)
    assert set(reference) == set(subs.masks)
    expected = golden.ex1_perp_table()
    for mask in subs.masks:
        companion = perp(ex1_qm, mask)
        got = (reference[companion], reference[perp(ex1_qm, companion)])
        assert got == expected[reference[mask]]


def test_perp_of_the_unlisted_subquasimodule(ex1_qm):
    extra = labelled(ex1_qm, golden.EX1_ERRATUM)
    assert perp(ex1_qm, extra) == labelled(ex1_qm, [("0", "0"), ("b", "0")])
    assert double_perp(ex1_qm, extra).members == labelled(ex1_qm, golden.EX1_SUBQMS[16])
    assert not is_closed(ex1_qm, extra)


def test_ex1_closed_lattice_is_boolean(ex1_qm):
    reference = _reference(ex1_qm)
    closed = closed_subquasimodules(ex1_qm)
    names = [reference[mask] for mask in closed.base.masks]
    assert names == [f"P{k}" for k in golden.EX1_CLOSED]
    assert len(closed) == 8
    assert closed.is_boolean
    companions = {int(names[i][1:]): int(names[closed.perp_of(i)][1:]) for i in range(8)}
    assert companions == golden.EX1_CLOSED_PERP
    assert is_antitone_involution(closed.base, closed.perp_map)
    subs = all_subquasimodules(ex1_qm)
    assert [subs.name_of(mask) for mask in closed.base.masks] == ["P1", "P2", "P5", "P8", "P12", "P16", "P18", "P21"]


def test_n5_closed_lattice(n5_qm):
    closed = closed_subquasimodules(n5_qm)
    assert list(closed.base.masks) == [labelled(n5_qm, [(e,) for e in s]) for s in golden.N5_CLOSED]
    assert closed.is_boolean


def test_closed_lattice_needs_0_distributive_factors(m3_qm):
    with pytest.raises(NotZeroDistributive) as info:
        closed_subquasimodules(m3_qm)
    assert info.value.position == 0


def test_m3_double_perp_is_a_raw_set(m3_qm):
    companion = labelled(m3_qm, golden.M3_PERP)
    result = double_perp(m3_qm, companion)
    assert isinstance(result, RawSubset)
    assert result.members == companion
    assert result.violation.describe(m3_qm) == "(b,0)+(c,0)=(1,0)"
    with pytest.raises(NotSubquasimodule):
        double_perp(m3_qm, companion, strict=True)


def test_double_perp_of_a_subquasimodule(ex1_qm):
    P3 = labelled(ex1_qm, golden.EX1_SUBQMS[2])
    result = double_perp(ex1_qm, P3)
    assert isinstance(result, SubQM)
    assert result.members == labelled(ex1_qm, golden.EX1_SUBQMS[7])


def test_closed_join(ex1_qm):
    P2, P5, P3 = (SubQM(ex1_qm, labelled(ex1_qm, golden.EX1_SUBQMS[k])) for k in (1, 4, 2))
    assert closed_join(ex1_qm, P2, P5).members == labelled(ex1_qm, golden.EX1_SUBQMS[11])
    with pytest.raises(NotClosedInput):
        closed_join(ex1_qm, P2, P3)


def test_ex1_splitting_equals_closed(ex1_qm):
    closed = closed_subquasimodules(ex1_qm)
    assert [P.members for P in splitting_subquasimodules(ex1_qm)] == list(closed.base.masks)


def test_fig5_closed_but_not_splitting(fig5_qm):
    Q = fig5_qm
    P = product_mask(Q, [_elements(Q, part) for part in golden.FIG5_P])
    assert is_closed(Q, P)
    assert perp(Q, P) == product_mask(Q, [_elements(Q, part) for part in golden.FIG5_PERP])
    assert not is_splitting(Q, SubQM(Q, P))
    missing = Q.position(Q.parse_vector(golden.FIG5_MISSING))
    assert not sum_set(Q, P, perp(Q, P)) >> missing & 1


def test_factorization_of_closed_nodes(ex1_qm):
    for number, (left, right) in golden.EX1_FACTORIZATIONS.items():
        node = labelled(ex1_qm, golden.EX1_SUBQMS[number - 1])
        witness = factorize_closed(ex1_qm, SubQM(ex1_qm, node))
        assert witness.parts == (_elements(ex1_qm, left), _elements(ex1_qm, right))
    P12 = labelled(ex1_qm, golden.EX1_SUBQMS[11])
    assert factorize_closed(ex1_qm, SubQM(ex1_qm, P12)).describe(ex1_qm) == "{0,b} x {0,a}"
    with pytest.raises(NotClosed):
        factorize_closed(ex1_qm, SubQM(ex1_qm, labelled(ex1_qm, golden.EX1_SUBQMS[2])))


def test_perp_in_factor(ex1_qm):
    assert perp_in_factor(ex1_qm, 0, _elements(ex1_qm, ["b"])) == _elements(ex1_qm, ["0", "a", "c"])
    assert perp_in_factor(ex1_qm, 1, _elements(ex1_qm, ["a"])) == _elements(ex1_qm, ["0"])


def test_product_isomorphism(ex1_qm):
    iso = closed_lattice_iso(ex1_qm)
    assert iso.verified
    assert [len(F) for F in iso.factor_lattices] == [4, 2]
    assert len(iso.mapping) == 8


def test_n5_powers_are_boolean():
    for n, size in golden.N5_POWER_SIZES.items():
        closed = closed_subquasimodules(product_qm("n5", ["1"] * n))
        assert len(closed) == size
        assert closed.is_boolean


def test_fig5_factor_is_closed_not_splitting(fig5_qm):
    F = factor_qm(fig5_qm, 0)
    part = lift_elements(F, _elements(fig5_qm, golden.FIG5_P[0]))
    assert is_closed(F, part)
    assert not is_splitting(F, SubQM(F, part))


_subsets = st.integers(min_value=0, max_value=(1 << 10) - 1)


@settings(max_examples=80)
@given(_subsets, _subsets)
def test_galois_connection_laws(A, B):
    perp_a, perp_b = perp(EX1, A), perp(EX1, B)
    assert A & ~perp(EX1, perp_a) == 0
    assert perp(EX1, perp(EX1, perp_a)) == perp_a
    assert perp(EX1, A | B) == perp_a & perp_b
    assert (A & ~perp_b == 0) == (B & ~perp_a == 0)
    assert A & perp_a == A & EX1.zero_mask


@settings(max_examples=40)
@given(_subsets)
def test_closure_is_a_closed_subquasimodule(A):
    closure = double_perp(EX1, A)
    assert isinstance(closure, SubQM)
    assert is_closed(EX1, closure.members)
