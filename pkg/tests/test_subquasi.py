import pytest
from hypothesis import given, settings, strategies as st

from exceptions import EnumerationBudgetExceeded
from subquasi import (
    Basis,
    SubQM,
    all_subquasimodules,
    find_bases,
    generate,
    is_basis,
    is_generating,
    is_irredundant,
    is_orthogonal_set,
    is_subquasimodule,
)
from lattice_core import check_lattice_laws
import worked_examples as golden
from worked_examples import product_qm

from conftest import labelled

EX1 = product_qm("n5", ["1", "a"])


def test_ex1_has_the_listed_subquasimodules_and_one_more(ex1_qm):
    subs = all_subquasimodules(ex1_qm)
    assert len(subs) == golden.EX1_SUBQM_COUNT == 21
    extra = labelled(ex1_qm, golden.EX1_ERRATUM)
    listed = [mask for mask in subs.masks if mask != extra]
    assert listed == [labelled(ex1_qm, s) for s in golden.EX1_SUBQMS]
    assert subs.names[:3] == ["P1", "P2", "P3"]
    assert subs.name_of(ex1_qm.full) == "P21"


def test_subquasimodule_missing_from_the_reference_list(ex1_qm):
    extra = labelled(ex1_qm, golden.EX1_ERRATUM)
    assert is_subquasimodule(ex1_qm, extra).holds
    subs = all_subquasimodules(ex1_qm)
    assert subs.name_of(extra) == "P13"
    assert subs.name_of(labelled(ex1_qm, golden.EX1_SUBQMS[11])) == "P12"
    assert subs.name_of(labelled(ex1_qm, golden.EX1_SUBQMS[12])) == "P14"


def test_n5_over_itself(n5_qm):
    subs = all_subquasimodules(n5_qm)
    assert list(subs.masks) == [labelled(n5_qm, [(x,) for x in s]) for s in golden.N5_SUBQMS]


def test_trivial_has_one_node(trivial_qm):
    subs = all_subquasimodules(trivial_qm)
    assert len(subs) == 1
    assert subs.bottom == subs.top == 0


def test_enumeration_budget(ex1_qm):
    with pytest.raises(EnumerationBudgetExceeded):
        all_subquasimodules(ex1_qm, budget=5)


def test_subquasimodule_lattice_is_a_lattice(ex1_qm):
    subs = all_subquasimodules(ex1_qm)
    lattice = subs.to_lattice()
    assert lattice.n == 21
    assert all(check.holds for check in check_lattice_laws(lattice).values())
    assert subs.name(subs.join_idx(1, 4)) == "P12"
    assert subs.name(subs.meet_idx(1, 4)) == "P1"


def test_closure_violation_of_a_sum(m3_qm):
    S = labelled(m3_qm, golden.M3_PERP)
    check = is_subquasimodule(m3_qm, S)
    assert not check.holds
    assert check.violation.kind == "add"
    assert check.violation.describe(m3_qm) == "(b,0)+(c,0)=(1,0)"


def test_missing_zero(ex1_qm):
    check = is_subquasimodule(ex1_qm, labelled(ex1_qm, [("a", "0")]))
    assert check.violation.kind == "zero"


def test_scalar_closure(ex1_qm):
    # a·(1,0) = (a,0) is missing
    check = is_subquasimodule(ex1_qm, labelled(ex1_qm, [("0", "0"), ("1", "0")]))
    assert not check.holds
    assert check.violation.kind == "smul"


def test_generate_empty_set_is_zero(ex1_qm):
    assert generate(ex1_qm, []).members == ex1_qm.zero_mask


def test_generated_subquasimodules(ex1_qm):
    for vectors, number in golden.EX1_GENERATED.items():
        P = generate(ex1_qm, [ex1_qm.parse_vector(v) for v in vectors])
        assert P.members == labelled(ex1_qm, golden.EX1_SUBQMS[number - 1])


def test_orthogonal_bases_of_ex1(ex1_qm):
    whole = SubQM(ex1_qm, ex1_qm.full)
    bases = find_bases(whole, max_size=3)
    found = {b.vectors: b.orthogonal for b in bases}
    for basis in golden.EX1_BASES:
        vectors = tuple(sorted((ex1_qm.parse_vector(v) for v in basis), key=ex1_qm.position))
        assert found[vectors] is True
        assert is_basis(whole, list(vectors))
    assert all(is_basis(whole, list(b.vectors)) for b in bases)
    assert [len(b.vectors) for b in bases] == sorted(len(b.vectors) for b in bases)


def test_bases_of_the_zero_subquasimodule(trivial_qm):
    assert find_bases(SubQM(trivial_qm, trivial_qm.zero_mask)) == [Basis((), True)]


def test_basis_size_must_be_positive(ex1_qm):
    with pytest.raises(ValueError):
        find_bases(SubQM(ex1_qm, ex1_qm.full), max_size=0)


def test_generating_and_irredundant(ex1_qm):
    whole = SubQM(ex1_qm, ex1_qm.full)
    redundant = [ex1_qm.parse_vector(v) for v in (("0", "a"), ("1", "0"), ("b", "0"))]
    assert is_generating(whole, redundant)
    assert not is_irredundant(ex1_qm, redundant)
    assert not is_basis(whole, redundant)


def test_m3_orthogonal_basis(m3_qm):
    B = labelled(m3_qm, golden.M3_BASIS)
    assert is_basis(SubQM(m3_qm, m3_qm.full), B)
    assert is_orthogonal_set(m3_qm, B)


@settings(max_examples=80)
@given(st.integers(min_value=0, max_value=(1 << 10) - 1), st.integers(min_value=0, max_value=(1 << 10) - 1))
def test_generation_is_a_closure_operator(A, B):
    gen_a = generate(EX1, A).members
    gen_ab = generate(EX1, A | B).members
    assert A & ~gen_a == 0
    assert generate(EX1, gen_a).members == gen_a
    assert gen_a & ~gen_ab == 0
    assert is_subquasimodule(EX1, gen_a).holds
