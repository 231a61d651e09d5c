"""
The orthogonality Galois connection on a canonical quasimodule: A^⊥, the
⊥⊥ closure, closed and splitting subquasimodules, and the product
decomposition of the closed ones.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from exceptions import (
    FactorizationFailed,
    NotClosed,
    NotClosedInput,
    NotSubquasimodule,
    NotZeroDistributive,
)
from lattice_core import is_0_distributive, is_boolean
from logging_config import logger
from quasimodule import CanonicalQM, Subset, as_mask, factor_qm, lift_elements, product_mask, project
from subquasi import (
    ClosureViolation,
    SubQM,
    SubQMLattice,
    adder_for,
    all_subquasimodules,
    is_subquasimodule,
    make_family,
)
from utilities import iter_bits


def perp(Q: CanonicalQM, A: Subset) -> int:
    """A^⊥ = {x : x ⊥ y for every y in A}; perp(∅) is the whole carrier."""
    result = Q.full
    masks = Q.perp_masks
    for y in iter_bits(as_mask(Q, A)):
        result &= masks[y]
    return result


@dataclass(frozen=True)
class RawSubset:
    """A ⊥⊥ set that is not closed under +, tagged with the violation."""
    qm: CanonicalQM
    members: int
    violation: ClosureViolation

    def __repr__(self) -> str:
        return "{" + ", ".join(self.qm.labels(self.members)) + "}"


def factors_0_distributive(Q: CanonicalQM) -> Optional[NotZeroDistributive]:
    """The error for the first factor ideal that is not 0-distributive, else None."""
    for position, factor in enumerate(Q.factors):
        check = is_0_distributive(Q.lattice, members=factor.members)
        if not check.holds:
            return NotZeroDistributive(position, check.witness)
    return None


def require_0_distributive(Q: CanonicalQM) -> None:
    error = factors_0_distributive(Q)
    if error is not None:
        logger.error(str(error))
        raise error


def double_perp(Q: CanonicalQM, A: Subset, strict: bool = False) -> Union[SubQM, RawSubset]:
    """
    A^⊥⊥, the least closed subquasimodule including A.

    Args:
        Q (CanonicalQM): The quasimodule.
        A (Subset): Vectors or a carrier bitset.
        strict (bool): Raise instead of returning a tagged raw set.

    Returns:
        SubQM | RawSubset: A RawSubset only when some factor is not
        0-distributive and A^⊥⊥ is not closed under +.

    Raises:
        NotSubquasimodule: In strict mode, when A^⊥⊥ is not a subquasimodule.
    """
    A = as_mask(Q, A)
    members = perp(Q, perp(Q, A))
    assert A & ~members == 0, "A is not included in A^⊥⊥"
    check = is_subquasimodule(Q, members)
    if check.holds:
        return SubQM(Q, members)
    logger.debug(f"A^⊥⊥ is not a subquasimodule: {check.violation.describe(Q)}")
    if strict:
        raise NotSubquasimodule(check.violation.describe(Q))
    return RawSubset(Q, members, check.violation)


def is_closed(Q: CanonicalQM, S: Subset) -> bool:
    S = as_mask(Q, S)
    return perp(Q, perp(Q, S)) == S


@dataclass(frozen=True, eq=False)
class ClosedLattice:
    """L_C(Q) with the involution P ↦ P^⊥ as node indices."""
    base: SubQMLattice
    perp_map: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.base)

    @property
    def nodes(self) -> Tuple[SubQM, ...]:
        return self.base.nodes

    def perp_of(self, i: int) -> int:
        return self.perp_map[i]

    @cached_property
    def is_boolean(self) -> bool:
        return is_boolean(self.base.to_lattice())


def closed_subquasimodules(Q: CanonicalQM) -> ClosedLattice:
    """
    Compute L_C(Q) as the ∩-closure of the principal perps x^⊥ and Q.

    Every closed set is some A^⊥ = ⋂_{x∈A} x^⊥, so no enumeration of L(Q)
    is needed.

    Raises:
        NotZeroDistributive: If a factor ideal is not 0-distributive.
    """
    require_0_distributive(Q)
    generators = sorted(set(Q.perp_masks))
    nodes = {Q.full}
    queue = [Q.full]
    while queue:
        node = queue.pop()
        for g in generators:
            meet = node & g
            if meet not in nodes:
                nodes.add(meet)
                queue.append(meet)
    base = make_family(Q, nodes, lambda union: perp(Q, perp(Q, union)))
    perp_map = tuple(base.position[perp(Q, mask)] for mask in base.masks)
    logger.info(f"L_C(Q) has {len(base)} closed subquasimodules")
    return ClosedLattice(base, perp_map)


def is_antitone_involution(family: SubQMLattice, mapping: Sequence[int]) -> bool:
    """True iff mapping reverses ⊆ on the family and is its own inverse."""
    leq = family.leq
    k = len(family)
    if any(mapping[mapping[i]] != i for i in range(k)):
        return False
    return all(leq[mapping[j], mapping[i]] for i in range(k) for j in range(k) if leq[i, j])


def closed_join(Q: CanonicalQM, P: SubQM, R: SubQM) -> SubQM:
    """(P ∪ R)^⊥⊥, the join of two closed subquasimodules in L_C(Q)."""
    for S in (P, R):
        if not is_closed(Q, S.members):
            raise NotClosedInput(f"{S!r} is not closed")
    return SubQM(Q, perp(Q, perp(Q, P.members | R.members)))


def sum_set(Q: CanonicalQM, P: Subset, R: Subset) -> int:
    """{x + y : x in P, y in R} as a carrier bitset."""
    P, R = as_mask(Q, P), as_mask(Q, R)
    adder = adder_for(Q)
    right = list(iter_bits(R))
    total = 0
    for x in iter_bits(P):
        plus_x = adder(x)
        for y in right:
            total |= 1 << plus_x(y)
    return total


def is_splitting(Q: CanonicalQM, P: SubQM) -> bool:
    """P + P^⊥ = Q."""
    companion = perp(Q, P.members)
    assert P.members & companion == Q.zero_mask, "P ∩ P^⊥ differs from {0}"
    return sum_set(Q, P.members, companion) == Q.full


def splitting_subquasimodules(Q: CanonicalQM, budget: Optional[int] = None) -> List[SubQM]:
    """L_S(Q) in canonical order, filtered from L(Q)."""
    family = all_subquasimodules(Q, budget)
    found = [P for P in family.nodes if is_splitting(Q, P)]
    logger.info(f"L_S(Q) has {len(found)} of {len(family)} subquasimodules")
    return found


def perp_in_factor(Q: CanonicalQM, i: int, elements: int) -> int:
    """M^⊥ inside the i-th factor ideal, as an element bitset."""
    L = Q.lattice
    factor = Q.factors[i]
    result = factor.members
    for x in iter_bits(elements):
        row = L.meet_rows[x]
        result &= sum(1 << y for y in factor.elements() if row[y] == L.bottom)
    return result


class FactorizationWitness(NamedTuple):
    parts: Tuple[int, ...]
    factors: Tuple[SubQM, ...]

    def describe(self, Q: CanonicalQM) -> str:
        names = Q.lattice.names
        return " x ".join("{" + ",".join(names[e] for e in iter_bits(part)) + "}" for part in self.parts)


def factorize_closed(Q: CanonicalQM, P: SubQM) -> FactorizationWitness:
    """
    Split a closed P into its projections P_i = p_i(P).

    Returns:
        FactorizationWitness: element bitsets P_i and the matching closed
        subquasimodules of the one-factor quasimodules.

    Raises:
        NotZeroDistributive: If a factor is not 0-distributive.
        NotClosed: If P is not closed.
        FactorizationFailed: If a projection is not closed in its factor or
            the product of the projections differs from P.
    """
    require_0_distributive(Q)
    if not is_closed(Q, P.members):
        raise NotClosed(f"{P!r} is not closed")
    parts = tuple(project(Q, P.members, i) for i in range(Q.arity))
    subs = []
    for i, part in enumerate(parts):
        F = factor_qm(Q, i)
        lifted = lift_elements(F, part)
        if not is_closed(F, lifted):
            logger.error(f"Projection {i} of {P!r} is not closed in its factor")
            raise FactorizationFailed(f"projection {i} of {P!r} is not closed")
        subs.append(SubQM(F, lifted))
    if product_mask(Q, parts) != P.members:
        logger.error(f"{P!r} is not the product of its projections")
        raise FactorizationFailed(f"{P!r} is not the product of its projections")
    return FactorizationWitness(parts, tuple(subs))


class ClosedIsomorphism(NamedTuple):
    """(P_1, ..., P_n) ↦ ∏ P_i from ∏ L_C(L_i) to L_C(Q), as node indices."""
    mapping: Dict[Tuple[int, ...], int]
    bijective: bool
    order_preserving: bool
    reflecting: bool
    closed: ClosedLattice
    factor_lattices: Tuple[ClosedLattice, ...]

    @property
    def verified(self) -> bool:
        return self.bijective and self.order_preserving and self.reflecting


def closed_lattice_iso(Q: CanonicalQM) -> ClosedIsomorphism:
    """
    Build and check the product map onto L_C(Q).

    Raises:
        NotZeroDistributive: If a factor is not 0-distributive.
    """
    closed = closed_subquasimodules(Q)
    factor_lattices = tuple(closed_subquasimodules(factor_qm(Q, i)) for i in range(Q.arity))
    factor_parts = [
        [project(F.base.qm, mask, 0) for mask in F.base.masks] for F in factor_lattices
    ]

    mapping: Dict[Tuple[int, ...], int] = {}
    bijective = True
    for combo in product(*(range(len(F)) for F in factor_lattices)):
        mask = product_mask(Q, [factor_parts[i][k] for i, k in enumerate(combo)])
        target = closed.base.position.get(mask)
        if target is None:
            bijective = False
            continue
        mapping[combo] = target
    bijective = bijective and len(set(mapping.values())) == len(closed) == len(mapping)

    preserving = reflecting = True
    leq = closed.base.leq
    for a, i in mapping.items():
        for b, j in mapping.items():
            componentwise = all(F.base.leq[x, y] for F, x, y in zip(factor_lattices, a, b))
            if componentwise and not leq[i, j]:
                preserving = False
            if leq[i, j] and not componentwise:
                reflecting = False
    logger.info(
        f"Product map onto L_C(Q): bijective={bijective}, "
        f"preserving={preserving}, reflecting={reflecting}"
    )
    return ClosedIsomorphism(mapping, bijective, preserving, reflecting, closed, factor_lattices)
