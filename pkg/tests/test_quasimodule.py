import pytest
from hypothesis import given, settings, strategies as st

from exceptions import CarrierTooLarge, FactorNotIdeal, IndexOutOfRange, NotInCarrier
from lattice_core import Ideal, principal_ideal
from quasimodule import (
    RawQM,
    add,
    canonical,
    factor_qm,
    inner_product,
    lift_elements,
    orthogonal,
    product_mask,
    project,
    smul,
    standard_basis,
    to_raw,
    verify_axioms,
)
from utilities import mask_of
from worked_examples import product_qm

from conftest import labelled


def test_ex1_carrier(ex1_qm):
    Q = ex1_qm
    assert Q.size == 10
    assert Q.arity == 2
    assert Q.zero == 0
    assert Q.position(Q.parse_vector(("a", "0"))) == 2
    assert Q.label(9) == "(1,a)"


def test_canonical_axioms_hold(ex1_qm, m3_qm, fig5_qm):
    for Q in (ex1_qm, m3_qm, fig5_qm):
        checks = verify_axioms(Q)
        assert all(check.passed for check in checks), [c for c in checks if not c.passed]


def test_broken_addition_table_is_reported(ex1_qm):
    raw = to_raw(ex1_qm)
    table = raw.add.copy()
    table[1, 2] = 0
    checks = {c.axiom: c for c in verify_axioms(RawQM(raw.lattice, table, raw.smul, raw.zero))}
    assert not checks["i.commutative"].passed
    assert checks["i.commutative"].witness == (1, 2)


def test_add_and_scalar_action(m3_qm):
    Q = m3_qm
    b0, c0 = Q.parse_vector(("b", "0")), Q.parse_vector(("c", "0"))
    assert add(Q, b0, c0) == Q.parse_vector(("1", "0"))
    assert smul(Q, Q.lattice.element("b"), Q.parse_vector(("1", "a"))) == b0


def test_orthogonality_and_inner_product(ex1_qm):
    Q = ex1_qm
    assert orthogonal(Q, Q.parse_vector(("0", "a")), Q.parse_vector(("1", "0")))
    assert not orthogonal(Q, Q.parse_vector(("a", "a")), Q.parse_vector(("c", "0")))
    assert inner_product(Q, Q.parse_vector(("a", "a")), Q.parse_vector(("c", "a"))) == Q.lattice.element("a")


def test_standard_basis(ex1_qm):
    L = ex1_qm.lattice
    assert standard_basis(ex1_qm) == [(L.element("1"), L.bottom), (L.bottom, L.element("a"))]


def test_factor_must_be_an_ideal(n5):
    bad = Ideal(n5, mask_of(n5.element(x) for x in ("0", "a", "b")))
    with pytest.raises(FactorNotIdeal):
        canonical(n5, [principal_ideal(n5, n5.top), bad])


def test_factor_from_another_lattice(n5, m3):
    with pytest.raises(FactorNotIdeal):
        canonical(n5, [principal_ideal(m3, m3.top)])


def test_carrier_cap(n5):
    with pytest.raises(CarrierTooLarge):
        canonical(n5, [principal_ideal(n5, n5.top)] * 2, max_carrier=24)


def test_no_factors(n5):
    with pytest.raises(ValueError):
        canonical(n5, [])


def test_vectors_outside_the_carrier(ex1_qm):
    with pytest.raises(NotInCarrier):
        ex1_qm.position((0, ex1_qm.lattice.element("1")))
    with pytest.raises(NotInCarrier):
        ex1_qm.vector(10)


def test_projection_and_product(ex1_qm):
    Q = ex1_qm
    L = Q.lattice
    assert project(Q, Q.full, 1) == mask_of([L.bottom, L.element("a")])
    P12 = labelled(Q, [("0", "0"), ("0", "a"), ("b", "0"), ("b", "a")])
    parts = [project(Q, P12, i) for i in range(2)]
    assert product_mask(Q, parts) == P12
    with pytest.raises(IndexOutOfRange):
        project(Q, P12, 2)


def test_factor_qm(ex1_qm):
    F = factor_qm(ex1_qm, 1)
    assert F.size == 2
    assert lift_elements(F, mask_of([ex1_qm.lattice.bottom])) == F.zero_mask


def test_trivial_quasimodule(trivial_qm):
    assert trivial_qm.size == 1
    assert trivial_qm.full == trivial_qm.zero_mask
    assert all(check.passed for check in verify_axioms(trivial_qm))


_FIG5 = product_qm("fig5", ["1", "1"])


@settings(max_examples=60)
@given(st.integers(min_value=0, max_value=35), st.integers(min_value=0, max_value=35))
def test_orthogonality_is_symmetric_and_matches_perp_masks(x, y):
    Q = _FIG5
    vx, vy = Q.vector(x), Q.vector(y)
    assert orthogonal(Q, vx, vy) == orthogonal(Q, vy, vx)
    assert bool(Q.perp_masks[x] >> y & 1) == orthogonal(Q, vx, vy)


