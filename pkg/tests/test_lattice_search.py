import pytest

from lattice_core import builtin, is_0_distributive
from lattice_search import (
    Candidate,
    canonical_order,
    candidates,
    counterexample_search,
    exhaustive_lattices,
    minimize,
    relabel,
)
from verify import SearchConfig, Status, qm_from_description, replay


@pytest.mark.parametrize("size, count", [(2, 1), (3, 1), (4, 2), (5, 5), (6, 15)])
def test_number_of_lattices_up_to_isomorphism(size, count):
    assert len(exhaustive_lattices(size)) == count


def test_canonical_order_is_an_isomorphism_invariant(n5):
    key, order = canonical_order(n5)
    relabelled, index = relabel(n5, order)
    assert canonical_order(relabelled)[0] == key
    assert relabelled.names == ("0", "a", "b", "c", "1")
    assert sorted(index) == list(range(5))


def test_candidates_respect_the_carrier_cap():
    cfg = SearchConfig(max_lattice_size=4, max_factors=2, max_carrier=4)
    pool = candidates(cfg)
    assert pool
    assert all(c.qm().size <= 4 for c in pool)
    assert all(len(c.generators) in (1, 2) for c in pool)


def test_dropping_0_distributivity_finds_the_diamond():
    cfg = SearchConfig(max_lattice_size=5, max_factors=1, drop_hypotheses=("0-distributive",),
                       targets=("prop2",))
    reports = counterexample_search(cfg)
    assert reports
    for report in reports:
        assert report.status == Status.COUNTEREXAMPLE
        Q = qm_from_description(report.witness)
        assert Q.lattice.n == 5
        assert not is_0_distributive(Q.lattice).holds
        assert replay(report)


def test_closed_but_not_splitting_instances_are_found():
    cfg = SearchConfig(max_lattice_size=5, max_factors=1, targets=("closed-not-splitting",))
    reports = counterexample_search(cfg)
    assert reports
    assert all(r.status == Status.COUNTEREXAMPLE for r in reports)
    assert all(replay(r) for r in reports)


def test_small_distributive_lattices_are_sound():
    assert counterexample_search(SearchConfig(max_lattice_size=4, max_factors=1)) == []


def test_minimize_drops_unneeded_factors():
    m3 = builtin("m3")
    big = Candidate("m3", m3, (m3.top, m3.element("a")))
    small, sets = minimize(big, "prop2", "singletons", 0, {})
    assert small.generators == (small.lattice.top,)
    assert sets


def test_search_is_deterministic():
    cfg = SearchConfig(max_lattice_size=5, max_factors=1, drop_hypotheses=("0-distributive",),
                       targets=("prop2", "split.perp"), seed=7)

    def records():
        return [{k: v for k, v in r.to_record().items() if k != "seconds"} for r in counterexample_search(cfg)]

    assert records() == records()


@pytest.mark.parametrize("cfg", [
    SearchConfig(max_lattice_size=1),
    SearchConfig(max_factors=0),
    SearchConfig(drop_hypotheses=("modular",)),
    SearchConfig(targets=("th9",)),
])
def test_invalid_search_settings(cfg):
    with pytest.raises(ValueError):
        counterexample_search(cfg)


def test_closed_but_not_splitting_over_six_element_lattices():
    cfg = SearchConfig(max_lattice_size=6, max_factors=2, targets=("closed-not-splitting",))
    reports = counterexample_search(cfg)
    assert reports
    assert all(r.status == Status.COUNTEREXAMPLE for r in reports)
    assert all(replay(r) for r in reports)
    assert any(qm_from_description(r.witness).lattice.n == 6 for r in reports)
