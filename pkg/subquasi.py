"""
Subquasimodules of a canonical quasimodule: generation, membership,
the lattice L(Q), generating sets and bases.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from exceptions import EnumerationBudgetExceeded
from lattice_core import Lattice, covers_of, lattice_from_order
from logging_config import logger
from quasimodule import CanonicalQM, Subset, Vector, as_mask
from utilities import iter_bits, popcount, setting, sort_key


@dataclass(frozen=True, eq=False)
class SubQM:
    qm: CanonicalQM
    members: int

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubQM):
            return NotImplemented
        return self.qm is other.qm and self.members == other.members

    def __hash__(self) -> int:
        return hash(self.members)

    def __contains__(self, vector: Vector) -> bool:
        return bool(self.members >> self.qm.position(vector) & 1)

    def __le__(self, other: "SubQM") -> bool:
        return self.members & ~other.members == 0

    @property
    def size(self) -> int:
        return popcount(self.members)

    def vectors(self) -> List[Vector]:
        return self.qm.vectors(self.members)

    def __repr__(self) -> str:
        return "{" + ", ".join(self.qm.labels(self.members)) + "}"


@dataclass(frozen=True)
class ClosureViolation:
    kind: str
    operands: Tuple[int, ...]
    result: Optional[int] = None

    def describe(self, Q: CanonicalQM) -> str:
        if self.kind == "zero":
            return f"{Q.label(Q.zero)} missing"
        if self.kind == "add":
            x, y = self.operands
            return f"{Q.label(x)}+{Q.label(y)}={Q.label(self.result)}"
        c, x = self.operands
        return f"{Q.lattice.names[c]}·{Q.label(x)}={Q.label(self.result)}"


class ClosureCheck(NamedTuple):
    holds: bool
    violation: Optional[ClosureViolation] = None


def adder_for(Q: CanonicalQM) -> Callable[[int], Callable[[int], int]]:
    if Q.size <= setting("limits", "table_carrier_limit"):
        rows = Q.add_rows
        return lambda v: rows[v].__getitem__
    return lambda v: (lambda u: Q.add_idx(v, u))


def close(Q: CanonicalQM, closed: int, fresh: int) -> int:
    """
    Least subquasimodule containing a subquasimodule `closed` and the bitset `fresh`.

    Only sums involving a newly added vector are formed; `closed` must already
    be closed under + and the scalar action.
    """
    orbits = Q.orbit_masks
    adder = adder_for(Q)
    members = closed
    queue = []
    for v in iter_bits(fresh & ~closed):
        new = orbits[v] & ~members
        members |= new
        queue.extend(iter_bits(new))
    while queue:
        plus_v = adder(queue.pop())
        new = 0
        for u in iter_bits(members):
            w = plus_v(u)
            if not (members | new) >> w & 1:
                new |= orbits[w]
        new &= ~members
        members |= new
        queue.extend(iter_bits(new))
    return members


def generate(Q: CanonicalQM, A: Subset) -> SubQM:
    """⟨A⟩, the smallest subquasimodule including A; ⟨∅⟩ = {0⃗}."""
    return SubQM(Q, close(Q, Q.zero_mask, as_mask(Q, A)))


def is_subquasimodule(Q: CanonicalQM, S: Subset) -> ClosureCheck:
    """
    Check 0⃗ ∈ S, closure under + and under every scalar.

    Returns:
        ClosureCheck: holds, plus the first violation in index order (zero,
        then sums x+y with x <= y, then scalar products c·x).
    """
    S = as_mask(Q, S)
    if not S >> Q.zero & 1:
        return ClosureCheck(False, ClosureViolation("zero", ()))
    members = list(iter_bits(S))
    adder = adder_for(Q)
    for i, x in enumerate(members):
        plus_x = adder(x)
        for y in members[i:]:
            w = plus_x(y)
            if not S >> w & 1:
                return ClosureCheck(False, ClosureViolation("add", (x, y), w))
    for c, row in enumerate(Q.smul_rows):
        for x in members:
            if not S >> row[x] & 1:
                return ClosureCheck(False, ClosureViolation("smul", (c, x), row[x]))
    return ClosureCheck(True)


@dataclass(frozen=True, eq=False)
class SubQMLattice:
    """
    A family of subquasimodules ordered by inclusion, in canonical order
    (by size, then by sorted member positions) and named P1..Pk in that order.

    meet is intersection; join maps the union through `closure`
    (generation for L(Q), ⊥⊥ for L_C(Q)).
    """
    qm: CanonicalQM
    masks: Tuple[int, ...]
    closure: Callable[[int], int]

    @cached_property
    def nodes(self) -> Tuple[SubQM, ...]:
        return tuple(SubQM(self.qm, m) for m in self.masks)

    @cached_property
    def position(self) -> Dict[int, int]:
        return {m: i for i, m in enumerate(self.masks)}

    def __len__(self) -> int:
        return len(self.masks)

    def name(self, i: int) -> str:
        return f"P{i + 1}"

    def name_of(self, mask: int) -> Optional[str]:
        i = self.position.get(mask)
        return None if i is None else self.name(i)

    @property
    def names(self) -> List[str]:
        return [self.name(i) for i in range(len(self))]

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return len(self) - 1

    @cached_property
    def leq(self) -> np.ndarray:
        k = len(self)
        order = np.zeros((k, k), dtype=bool)
        for i, a in enumerate(self.masks):
            for j, b in enumerate(self.masks):
                order[i, j] = a & ~b == 0
        order.flags.writeable = False
        return order

    def meet_idx(self, i: int, j: int) -> int:
        return self.position[self.masks[i] & self.masks[j]]

    def join_idx(self, i: int, j: int) -> int:
        return self.position[self.closure(self.masks[i] | self.masks[j])]

    @cached_property
    def meet(self) -> np.ndarray:
        k = len(self)
        return np.array([[self.meet_idx(i, j) for j in range(k)] for i in range(k)], dtype=np.int64).reshape(k, k)

    @cached_property
    def join(self) -> np.ndarray:
        k = len(self)
        return np.array([[self.join_idx(i, j) for j in range(k)] for i in range(k)], dtype=np.int64).reshape(k, k)

    def covers(self) -> List[Tuple[int, int]]:
        return covers_of(self.leq)

    def to_lattice(self) -> Lattice:
        return lattice_from_order(self.names, self.leq)


def make_family(Q: CanonicalQM, masks, closure: Callable[[int], int]) -> SubQMLattice:
    return SubQMLattice(Q, tuple(sorted(set(masks), key=sort_key)), closure)


def all_subquasimodules(Q: CanonicalQM, budget: Optional[int] = None) -> SubQMLattice:
    """
    Enumerate L(Q).

    Starts from {0⃗} and repeatedly joins every node with the principal
    subquasimodules ⟨v⟩ it does not contain yet; every subquasimodule is
    reached because it is the join of the ⟨v⟩ of its members.

    Args:
        Q (CanonicalQM): The quasimodule.
        budget (int, optional): Maximum number of nodes. Defaults to
            limits.enumeration_budget.

    Returns:
        SubQMLattice: L(Q) in canonical order.

    Raises:
        EnumerationBudgetExceeded: If more than `budget` nodes are found.
    """
    budget = budget if budget is not None else setting("limits", "enumeration_budget")
    principal: Dict[int, int] = {}
    for v in range(Q.size):
        principal.setdefault(close(Q, Q.zero_mask, 1 << v), v)
    generators = [(mask, v) for mask, v in principal.items()]

    nodes = {Q.zero_mask}
    queue = [Q.zero_mask]
    while queue:
        P = queue.pop()
        for mask, v in generators:
            if mask & ~P == 0:
                continue
            J = close(Q, P, 1 << v)
            if J not in nodes:
                nodes.add(J)
                queue.append(J)
                if len(nodes) > budget:
                    logger.error(f"L(Q) enumeration stopped after {budget} nodes")
                    raise EnumerationBudgetExceeded("L(Q)", budget)
    logger.info(f"Enumerated {len(nodes)} subquasimodules of a carrier of {Q.size} vectors")
    return make_family(Q, nodes, lambda union: close(Q, Q.zero_mask, union))


def is_generating(P: SubQM, A: Subset) -> bool:
    """True iff ⟨A⟩ = P."""
    return generate(P.qm, A).members == P.members


def is_irredundant(Q: CanonicalQM, A: Subset) -> bool:
    """True iff no member of A lies in the subquasimodule generated by the others."""
    A = as_mask(Q, A)
    return all(not close(Q, Q.zero_mask, A & ~(1 << x)) >> x & 1 for x in iter_bits(A))


def is_basis(P: SubQM, A: Subset) -> bool:
    """
    True iff A generates P and no proper subset does.

    One-element deletions suffice because generation is monotone.
    """
    Q = P.qm
    A = as_mask(Q, A)
    if not is_generating(P, A):
        return False
    return all(close(Q, Q.zero_mask, A & ~(1 << x)) != P.members for x in iter_bits(A))


class Basis(NamedTuple):
    vectors: Tuple[Vector, ...]
    orthogonal: bool


def is_orthogonal_set(Q: CanonicalQM, A: Subset) -> bool:
    members = list(iter_bits(as_mask(Q, A)))
    return all(Q.perp_masks[x] >> y & 1 for i, x in enumerate(members) for y in members[i + 1:])


def find_bases(P: SubQM, max_size: Optional[int] = None, budget: Optional[int] = None) -> List[Basis]:
    """
    All inclusion-minimal generating sets of P with at most `max_size` vectors.

    Candidate sets grow level by level in lexicographic order of carrier
    positions. Only irredundant, not yet generating sets are extended: every
    subset of a basis is irredundant, and an irredundant generating set is a
    basis.

    Args:
        P (SubQM): The subquasimodule.
        max_size (int, optional): Largest basis size. Defaults to bases.max_size.
        budget (int, optional): Maximum number of candidate sets examined.
            Defaults to limits.enumeration_budget.

    Returns:
        List[Basis]: Bases ordered by size, then lexicographically, each
        flagged orthogonal iff its vectors are pairwise orthogonal.

    Raises:
        ValueError: If max_size < 1.
        EnumerationBudgetExceeded: If the budget runs out.
    """
    Q = P.qm
    max_size = max_size if max_size is not None else setting("bases", "max_size")
    budget = budget if budget is not None else setting("limits", "enumeration_budget")
    if max_size < 1:
        raise ValueError("max_size must be at least 1.")

    target = P.members
    if target == Q.zero_mask:
        return [Basis((), True)]

    candidates = list(iter_bits(target & ~Q.zero_mask))
    found: List[Tuple[int, ...]] = []
    level: List[Tuple[Tuple[int, ...], int]] = [((), Q.zero_mask)]
    examined = 0
    for _ in range(max_size):
        next_level = []
        for chosen, generated in level:
            last = chosen[-1] if chosen else -1
            for v in candidates:
                if v <= last or generated >> v & 1:
                    continue
                examined += 1
                if examined > budget:
                    logger.error(f"Basis search stopped after {budget} candidate sets")
                    raise EnumerationBudgetExceeded("bases", budget)
                extended = chosen + (v,)
                others_ok = all(
                    not close(Q, Q.zero_mask, sum(1 << y for y in extended if y != x)) >> x & 1
                    for x in chosen
                )
                if not others_ok:
                    continue
                spanned = close(Q, generated, 1 << v)
                if spanned == target:
                    found.append(extended)
                else:
                    next_level.append((extended, spanned))
        level = next_level
        if not level:
            break

    logger.info(f"Found {len(found)} bases of size <= {max_size} after {examined} candidate sets")
    return [
        Basis(tuple(Q.carrier[x] for x in chosen), is_orthogonal_set(Q, sum(1 << x for x in chosen)))
        for chosen in found
    ]


def subqm_of(Q: CanonicalQM, S: Subset) -> SubQM:
    """Wrap a bitset known to be a subquasimodule."""
    return SubQM(Q, as_mask(Q, S))
