"""
Canonical quasimodules: finite products of ideals of one scalar lattice L,
with componentwise join as + and componentwise meet with a scalar as ·.

The carrier is enumerated once, row-major over the factor member lists
(each sorted by element index); subsets of the carrier are int bitsets over
carrier positions.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import prod
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from exceptions import (
    CarrierTooLarge,
    FactorNotIdeal,
    FactorNotPrincipal,
    IndexOutOfRange,
    NotInCarrier,
)
from lattice_core import Ideal, Lattice, first_violation, is_ideal
from logging_config import logger
from utilities import full_mask, iter_bits, setting

Vector = Tuple[int, ...]
Subset = Union[int, Iterable[Vector]]


@dataclass(frozen=True, eq=False)
class CanonicalQM:
    lattice: Lattice
    factors: Tuple[Ideal, ...]
    carrier: Tuple[Vector, ...]
    index: Dict[Vector, int]

    @property
    def size(self) -> int:
        return len(self.carrier)

    @property
    def arity(self) -> int:
        return len(self.factors)

    @cached_property
    def zero(self) -> int:
        return self.index[(self.lattice.bottom,) * self.arity]

    @property
    def zero_mask(self) -> int:
        return 1 << self.zero

    @property
    def full(self) -> int:
        return full_mask(self.size)

    def __repr__(self) -> str:
        return f"CanonicalQM({' x '.join(repr(f) for f in self.factors)}, size={self.size})"

    def position(self, vector: Sequence[int]) -> int:
        try:
            return self.index[tuple(vector)]
        except (KeyError, TypeError):
            raise NotInCarrier(vector) from None

    def vector(self, position: int) -> Vector:
        if not 0 <= position < self.size:
            raise NotInCarrier(position)
        return self.carrier[position]

    def vectors(self, mask: int) -> List[Vector]:
        return [self.carrier[i] for i in iter_bits(mask)]

    def parse_vector(self, labels: Sequence[str]) -> Vector:
        """Vector from element labels, e.g. ('a', '0')."""
        vector = tuple(self.lattice.element(label) for label in labels)
        self.position(vector)
        return vector

    def label(self, vector: Union[int, Sequence[int]]) -> str:
        if isinstance(vector, int):
            vector = self.vector(vector)
        return "(" + ",".join(self.lattice.names[x] for x in vector) + ")"

    def labels(self, mask: int) -> List[str]:
        return [self.label(i) for i in iter_bits(mask)]

    # Mixed-radix addressing of carrier positions.

    @cached_property
    def strides(self) -> Tuple[int, ...]:
        strides = []
        step = 1
        for factor in reversed(self.factors):
            strides.append(step)
            step *= factor.size
        return tuple(reversed(strides))

    @cached_property
    def slot(self) -> Tuple[Dict[int, int], ...]:
        """slot[f][e] is the position of element e in the member list of factor f."""
        return tuple({e: k for k, e in enumerate(f.elements())} for f in self.factors)

    @cached_property
    def coords(self) -> np.ndarray:
        return np.array(self.carrier, dtype=np.int64).reshape(self.size, self.arity)

    def _positions_table(self, element_tables: List[np.ndarray]) -> np.ndarray:
        total = np.zeros(element_tables[0].shape, dtype=np.int64)
        for f, table in enumerate(element_tables):
            lookup = np.full(self.lattice.n, -1, dtype=np.int64)
            for e, k in self.slot[f].items():
                lookup[e] = k
            total += lookup[table] * self.strides[f]
        return total

    @cached_property
    def add_rows(self) -> List[List[int]]:
        """add_rows[i][j] is the position of carrier[i] + carrier[j]."""
        limit = setting("limits", "table_carrier_limit")
        if self.size > limit:
            raise CarrierTooLarge(self.size, limit)
        L = self.lattice
        tables = [L.join[self.coords[:, f][:, None], self.coords[:, f][None, :]] for f in range(self.arity)]
        return self._positions_table(tables).tolist()

    @cached_property
    def smul_rows(self) -> List[List[int]]:
        """smul_rows[c][i] is the position of c·carrier[i]."""
        L = self.lattice
        scalars = np.arange(L.n)
        tables = [L.meet[scalars[:, None], self.coords[:, f][None, :]] for f in range(self.arity)]
        return self._positions_table(tables).tolist()

    def add_idx(self, i: int, j: int) -> int:
        if self.size <= setting("limits", "table_carrier_limit"):
            return self.add_rows[i][j]
        join = self.lattice.join_rows
        return self.index[tuple(join[a][b] for a, b in zip(self.carrier[i], self.carrier[j]))]

    @cached_property
    def orbit_masks(self) -> Tuple[int, ...]:
        """orbit_masks[i] is the bitset {c·carrier[i] : c in L}."""
        orbits = [0] * self.size
        for row in self.smul_rows:
            for i, target in enumerate(row):
                orbits[i] |= 1 << target
        return tuple(orbits)

    @cached_property
    def perp_masks(self) -> Tuple[int, ...]:
        """perp_masks[i] is the bitset of vectors orthogonal to carrier[i]."""
        L = self.lattice
        zero_meet = [
            sum(1 << x for x in range(L.n) if L.meet_rows[e][x] == L.bottom)
            for e in range(L.n)
        ]
        return tuple(
            product_mask(self, [zero_meet[e] & f.members for e, f in zip(vector, self.factors)])
            for vector in self.carrier
        )

    @cached_property
    def factor_qms(self) -> Tuple["CanonicalQM", ...]:
        return tuple(canonical(self.lattice, [f]) for f in self.factors)


@dataclass(frozen=True, eq=False)
class RawQM:
    """Quasimodule data given as bare tables, to be checked by verify_axioms."""
    lattice: Lattice
    add: np.ndarray
    smul: np.ndarray
    zero: int

    @property
    def size(self) -> int:
        return int(self.add.shape[0])


class AxiomCheck(NamedTuple):
    axiom: str
    passed: bool
    witness: Optional[Tuple[int, ...]] = None


def canonical(L: Lattice, factors: Sequence[Ideal], max_carrier: Optional[int] = None) -> CanonicalQM:
    """
    Construct the canonical quasimodule ∏ L_i over L.

    Args:
        L (Lattice): Scalar lattice.
        factors (Sequence[Ideal]): Ideals of L, at least one.
        max_carrier (int, optional): Cap on the carrier size. Defaults to
            limits.max_carrier from config.json.

    Returns:
        CanonicalQM: The quasimodule with its carrier enumerated.

    Raises:
        ValueError: If no factor is given.
        FactorNotIdeal: If a factor is not an ideal of L.
        CarrierTooLarge: If the carrier would exceed the cap.
    """
    if not factors:
        raise ValueError("A canonical quasimodule needs at least one factor.")
    for position, factor in enumerate(factors):
        if factor.lattice != L:
            raise FactorNotIdeal(position, "it belongs to a different lattice")
        if not is_ideal(L, factor.members):
            raise FactorNotIdeal(position, f"{factor!r} is not down-closed and join-closed")

    cap = max_carrier if max_carrier is not None else setting("limits", "max_carrier")
    size = prod(f.size for f in factors)
    if size > cap:
        logger.error(f"Carrier of {size} vectors exceeds the cap of {cap}")
        raise CarrierTooLarge(size, cap)

    carrier = tuple(product(*(f.elements() for f in factors)))
    index = {vector: i for i, vector in enumerate(carrier)}
    logger.debug(f"Canonical quasimodule with {len(factors)} factors and {size} vectors")
    return CanonicalQM(L, tuple(factors), carrier, index)


def as_mask(Q: CanonicalQM, A: Subset) -> int:
    """Accept a carrier bitset or an iterable of vectors and return the bitset."""
    if isinstance(A, int):
        if A < 0 or A & ~Q.full:
            raise NotInCarrier(A)
        return A
    mask = 0
    for vector in A:
        mask |= 1 << Q.position(vector)
    return mask


def product_mask(Q: CanonicalQM, parts: Sequence[int]) -> int:
    """Carrier bitset of ∏ M_i for element bitsets M_i (clipped to each factor)."""
    offsets = [0]
    for f, (factor, part) in enumerate(zip(Q.factors, parts)):
        slots = [Q.slot[f][e] * Q.strides[f] for e in iter_bits(part & factor.members)]
        offsets = [o + s for o in offsets for s in slots]
        if not offsets:
            return 0
    mask = 0
    for o in offsets:
        mask |= 1 << o
    return mask


def add(Q: CanonicalQM, x: Vector, y: Vector) -> Vector:
    """Componentwise join."""
    Q.position(x), Q.position(y)
    join = Q.lattice.join_rows
    return tuple(join[a][b] for a, b in zip(x, y))


def smul(Q: CanonicalQM, c: int, x: Vector) -> Vector:
    """Componentwise meet with the scalar c."""
    c = Q.lattice.check_element(c)
    Q.position(x)
    meet = Q.lattice.meet_rows[c]
    return tuple(meet[a] for a in x)


def to_raw(Q: CanonicalQM) -> RawQM:
    return RawQM(Q.lattice, np.array(Q.add_rows, dtype=np.int64), np.array(Q.smul_rows, dtype=np.int64), Q.zero)


def verify_axioms(M: Union[RawQM, CanonicalQM]) -> List[AxiomCheck]:
    """
    Exhaustively check the quasimodule axioms on operation tables.

    Args:
        M (RawQM | CanonicalQM): The structure; a CanonicalQM is tabulated first.

    Returns:
        List[AxiomCheck]: One entry per axiom with the first witness on failure.
    """
    if isinstance(M, CanonicalQM):
        M = to_raw(M)
    L = M.lattice
    m = M.size
    add_t, smul_t = M.add, M.smul
    if add_t.shape != (m, m) or not ((0 <= add_t) & (add_t < m)).all() or not 0 <= M.zero < m:
        return [AxiomCheck("i.closed", False, first_violation((0 <= add_t) & (add_t < m)))]
    if smul_t.shape != (L.n, m) or not ((0 <= smul_t) & (smul_t < m)).all():
        return [AxiomCheck("ii.scalar-action", False, first_violation((0 <= smul_t) & (smul_t < m)))]

    idx = np.arange(m)
    checks = []
    identity = (add_t[M.zero, :] == idx) & (add_t[:, M.zero] == idx)
    checks.append(AxiomCheck("i.identity", bool(identity.all()), first_violation(identity)))
    commutative = add_t == add_t.T
    checks.append(AxiomCheck("i.commutative", bool(commutative.all()), first_violation(commutative)))

    associative_witness = None
    for x in range(m):
        ok = add_t[add_t[x], :] == add_t[x][add_t]
        bad = first_violation(ok)
        if bad is not None:
            associative_witness = (x,) + bad
            break
    checks.append(AxiomCheck("i.associative", associative_witness is None, associative_witness))

    scalars = np.arange(L.n)
    compatible = smul_t[scalars[:, None, None], smul_t[None, :, :]] == smul_t[L.meet]
    checks.append(AxiomCheck("iii.compatibility", bool(compatible.all()), first_violation(compatible)))
    zero_scalar = smul_t[L.bottom] == M.zero
    checks.append(AxiomCheck("iv.zero-scalar", bool(zero_scalar.all()), first_violation(zero_scalar)))
    unit_scalar = smul_t[L.top] == idx
    checks.append(AxiomCheck("iv.unit-scalar", bool(unit_scalar.all()), first_violation(unit_scalar)))
    return checks


def inner_product(Q: CanonicalQM, x: Vector, y: Vector) -> int:
    """⋁_i (x_i ∧ y_i), joined in L."""
    Q.position(x), Q.position(y)
    L = Q.lattice
    total = L.bottom
    for a, b in zip(x, y):
        total = L.join_rows[total][L.meet_rows[a][b]]
    return total


def orthogonal(Q: CanonicalQM, x: Vector, y: Vector) -> bool:
    """x ⊥ y iff every componentwise meet is bottom (equivalently ⟨x,y⟩ = 0)."""
    L = Q.lattice
    Q.position(x), Q.position(y)
    componentwise = all(L.meet_rows[a][b] == L.bottom for a, b in zip(x, y))
    assert componentwise == (inner_product(Q, x, y) == L.bottom)
    return componentwise


def standard_basis(Q: CanonicalQM) -> List[Vector]:
    """
    Vectors b_i with q_i in position i and bottom elsewhere, for Q = ∏ [0, q_i].

    Raises:
        FactorNotPrincipal: If some factor is not of the form [0, q].
    """
    basis = []
    for i, factor in enumerate(Q.factors):
        q = factor.generator
        if q is None:
            raise FactorNotPrincipal(i)
        vector = [Q.lattice.bottom] * Q.arity
        vector[i] = q
        basis.append(tuple(vector))
    return basis


def project(Q: CanonicalQM, S: Subset, i: int) -> int:
    """Element bitset {x_i : x in S}."""
    if not 0 <= i < Q.arity:
        raise IndexOutOfRange(f"Factor index {i} outside 0..{Q.arity - 1}")
    elements = 0
    for v in iter_bits(as_mask(Q, S)):
        elements |= 1 << Q.carrier[v][i]
    return elements


def factor_qm(Q: CanonicalQM, i: int) -> CanonicalQM:
    """The one-factor canonical quasimodule on L_i over L."""
    if not 0 <= i < Q.arity:
        raise IndexOutOfRange(f"Factor index {i} outside 0..{Q.arity - 1}")
    return Q.factor_qms[i]


def lift_elements(F: CanonicalQM, elements: int) -> int:
    """Carrier bitset of a one-factor quasimodule for an element bitset."""
    return product_mask(F, [elements])
