"""
Finite bounded lattices.

Elements are dense indices 0..n-1 with a label per index. The order relation
and both operation tables are read-only numpy arrays materialised at
construction; subsets of elements are int bitsets (see utilities).
"""

from dataclasses import dataclass
from functools import cached_property
import re
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from exceptions import (
    DuplicateLabel,
    IndexOutOfRange,
    NotALattice,
    NotAPoset,
    NotBounded,
    UnknownBuiltin,
)
from logging_config import logger
from utilities import full_mask, iter_bits

Pair = Tuple[str, str]


class PropertyCheck(NamedTuple):
    holds: bool
    witness: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True, eq=False)
class Lattice:
    """
    Immutable finite bounded lattice.

    Conventions:
        - leq[x, y] is True iff x <= y
        - meet[x, y] / join[x, y] hold the index of x∧y / x∨y
    """
    names: Tuple[str, ...]
    leq: np.ndarray
    meet: np.ndarray
    join: np.ndarray
    bottom: int
    top: int

    @property
    def n(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"Lattice({' '.join(self.names)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return (
            self.names == other.names
            and np.array_equal(self.leq, other.leq)
            and np.array_equal(self.meet, other.meet)
            and np.array_equal(self.join, other.join)
            and self.bottom == other.bottom
            and self.top == other.top
        )

    def __hash__(self) -> int:
        return hash((self.names, self.leq.tobytes()))

    @cached_property
    def index_of(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def element(self, label: str) -> int:
        try:
            return self.index_of[label]
        except KeyError:
            raise IndexOutOfRange(f"Unknown element '{label}'") from None

    def check_element(self, x: int) -> int:
        if not isinstance(x, (int, np.integer)) or not 0 <= x < self.n:
            raise IndexOutOfRange(f"Element index {x!r} outside 0..{self.n - 1}")
        return int(x)

    def label(self, x: int) -> str:
        return self.names[self.check_element(x)]

    @cached_property
    def meet_rows(self) -> List[List[int]]:
        # Python lists for the enumeration loops
        return self.meet.tolist()

    @cached_property
    def join_rows(self) -> List[List[int]]:
        return self.join.tolist()

    @cached_property
    def down_masks(self) -> Tuple[int, ...]:
        """down_masks[x] is the bitset of all y <= x."""
        return tuple(_column_mask(self.leq[:, x]) for x in range(self.n))

    @cached_property
    def up_masks(self) -> Tuple[int, ...]:
        return tuple(_column_mask(self.leq[x, :]) for x in range(self.n))

    @property
    def universe(self) -> int:
        return full_mask(self.n)


def _column_mask(column: np.ndarray) -> int:
    mask = 0
    for i in np.flatnonzero(column):
        mask |= 1 << int(i)
    return mask


def first_violation(ok: np.ndarray) -> Optional[Tuple[int, ...]]:
    """Lexicographically smallest index tuple where `ok` is False (C order)."""
    bad = np.argwhere(~ok)
    if len(bad) == 0:
        return None
    return tuple(int(v) for v in bad[0])


def _transitive_closure(rel: np.ndarray) -> np.ndarray:
    closure = rel.copy()
    np.fill_diagonal(closure, True)
    for k in range(len(closure)):
        closure |= closure[:, k, None] & closure[None, k, :]
    return closure


def _bound_table(order: np.ndarray, names: Tuple[str, ...], operation: str) -> np.ndarray:
    """
    Least upper bounds with respect to `order` (pass the transpose for meets).

    The bound of i and j exists iff some k has exactly the common upper set
    of i and j as its own upper set.
    """
    n = len(names)
    bound_id = {order[k].tobytes(): k for k in range(n)}
    table = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i, n):
            common = (order[i] & order[j]).tobytes()
            if common not in bound_id:
                raise NotALattice(names[i], names[j], operation)
            table[i, j] = table[j, i] = bound_id[common]
    return table


def lattice_from_order(names: Sequence[str], leq: np.ndarray) -> Lattice:
    """
    Build a Lattice from an order matrix (any relation whose reflexive-transitive
    closure is the intended order).

    Args:
        names (Sequence[str]): Element labels, index i labelled names[i].
        leq (np.ndarray): n×n boolean relation.

    Returns:
        Lattice: The validated lattice.

    Raises:
        DuplicateLabel: If two elements share a label.
        NotAPoset: If the closure is not antisymmetric.
        NotBounded: If there is no least or no greatest element.
        NotALattice: If some pair lacks a unique meet or join.
    """
    names = tuple(names)
    seen = set()
    for name in names:
        if name in seen:
            raise DuplicateLabel(name)
        seen.add(name)
    n = len(names)
    if n == 0:
        raise NotBounded("bottom")

    order = _transitive_closure(np.array(leq, dtype=bool))
    both = order & order.T
    np.fill_diagonal(both, False)
    pair = first_violation(~both)
    if pair is not None:
        raise NotAPoset(names[pair[0]], names[pair[1]])

    bottoms = np.flatnonzero(order.all(axis=1))
    if len(bottoms) == 0:
        raise NotBounded("bottom")
    tops = np.flatnonzero(order.all(axis=0))
    if len(tops) == 0:
        raise NotBounded("top")

    join = _bound_table(order, names, "join")
    meet = _bound_table(order.T.copy(), names, "meet")
    for array in (order, join, meet):
        array.flags.writeable = False

    lattice = Lattice(names, order, meet, join, int(bottoms[0]), int(tops[0]))
    failed = {law: check for law, check in check_lattice_laws(lattice).items() if not check.holds}
    if failed:
        law, check = next(iter(failed.items()))
        x, y = check.witness[0], check.witness[-1]
        raise NotALattice(names[x], names[y], f"{law} law")
    logger.debug(f"Built lattice with {n} elements: {' '.join(names)}")
    return lattice


def build_lattice(names: Sequence[str], leq_pairs: Iterable[Pair]) -> Lattice:
    """
    Build a lattice from labels and generating order pairs (covers suffice).

    Args:
        names (Sequence[str]): Distinct element labels.
        leq_pairs (Iterable[Tuple[str, str]]): Pairs (x, y) meaning x <= y.

    Returns:
        Lattice: The validated lattice with materialised meet/join tables.

    Raises:
        IndexOutOfRange: If a pair mentions an unknown label.
        NotAPoset, NotBounded, NotALattice, DuplicateLabel: See lattice_from_order.
    """
    names = tuple(names)
    position = {name: i for i, name in enumerate(names)}
    rel = np.zeros((len(names), len(names)), dtype=bool)
    for x, y in leq_pairs:
        for label in (x, y):
            if label not in position:
                raise IndexOutOfRange(f"Unknown element '{label}' in order pair ({x}, {y})")
        rel[position[x], position[y]] = True
    return lattice_from_order(names, rel)


def check_lattice_laws(L: Lattice) -> Dict[str, PropertyCheck]:
    """Exhaustively check the lattice identities on the materialised tables."""
    n = L.n
    m, j = L.meet, L.join
    idx = np.arange(n)
    checks = {
        "meet-commutative": m == m.T,
        "join-commutative": j == j.T,
        "meet-idempotent": m[idx, idx] == idx,
        "join-idempotent": j[idx, idx] == idx,
        "meet-associative": m[m] == m[idx[:, None, None], m[None, :, :]],
        "join-associative": j[j] == j[idx[:, None, None], j[None, :, :]],
        "absorption-meet": m[idx[:, None], j] == idx[:, None],
        "absorption-join": j[idx[:, None], m] == idx[:, None],
        "order-meet": L.leq == (m == idx[:, None]),
        "order-join": L.leq == (j == idx[None, :]),
        "bottom": L.leq[L.bottom],
        "top": L.leq[:, L.top],
    }
    return {law: PropertyCheck(bool(ok.all()), first_violation(ok)) for law, ok in checks.items()}


def meet_join(L: Lattice, x: int, y: int) -> Tuple[int, int]:
    """Return (x∧y, x∨y)."""
    x, y = L.check_element(x), L.check_element(y)
    return int(L.meet[x, y]), int(L.join[x, y])


def is_0_distributive(L: Lattice, members: Optional[int] = None) -> PropertyCheck:
    """
    Check x∧z = y∧z = 0 ⇒ (x∨y)∧z = 0.

    Args:
        L (Lattice): The lattice.
        members (int, optional): Restrict x, y, z to this bitset (a sublattice
            containing bottom, e.g. a factor ideal). Defaults to all of L.

    Returns:
        PropertyCheck: holds, plus the smallest violating (x, y, z) otherwise.
    """
    elements = np.array(list(iter_bits(L.universe if members is None else members)), dtype=np.int64)
    zero = L.meet[np.ix_(elements, elements)] == L.bottom
    joins = L.join[np.ix_(elements, elements)]
    meets_with_z = L.meet[joins[:, :, None], elements[None, None, :]]
    ok = ~(zero[:, None, :] & zero[None, :, :] & (meets_with_z != L.bottom))
    witness = first_violation(ok)
    if witness is None:
        return PropertyCheck(True)
    return PropertyCheck(False, tuple(int(elements[w]) for w in witness))


def is_distributive(L: Lattice) -> PropertyCheck:
    """Check x∧(y∨z) = (x∧y)∨(x∧z) for all triples."""
    m, j = L.meet, L.join
    idx = np.arange(L.n)
    lhs = m[idx[:, None, None], j[None, :, :]]
    rhs = j[m[:, :, None], m[:, None, :]]
    witness = first_violation(lhs == rhs)
    return PropertyCheck(witness is None, witness)


def is_modular(L: Lattice) -> PropertyCheck:
    """Check x <= z ⇒ x∨(y∧z) = (x∨y)∧z for all triples."""
    m, j = L.meet, L.join
    idx = np.arange(L.n)
    lhs = j[idx[:, None, None], m[None, :, :]]
    rhs = m[j[:, :, None], idx[None, None, :]]
    ok = ~L.leq[:, None, :] | (lhs == rhs)
    witness = first_violation(ok)
    return PropertyCheck(witness is None, witness)


@dataclass(frozen=True)
class Ideal:
    lattice: Lattice
    members: int

    def elements(self) -> List[int]:
        return list(iter_bits(self.members))

    def __contains__(self, x: int) -> bool:
        return bool(self.members >> x & 1)

    @property
    def size(self) -> int:
        return len(self.elements())

    @property
    def generator(self) -> Optional[int]:
        """q with members = [0,q], or None when the set is not principal."""
        top = self.lattice.bottom
        for x in self.elements():
            top = self.lattice.join_rows[top][x]
        return top if self.lattice.down_masks[top] == self.members else None

    def __repr__(self) -> str:
        labels = ",".join(self.lattice.names[x] for x in self.elements())
        return f"Ideal({{{labels}}})"


def principal_ideal(L: Lattice, q: int) -> Ideal:
    """Return [0, q] = {x : x <= q}."""
    return Ideal(L, L.down_masks[L.check_element(q)])


def is_ideal(L: Lattice, members: int) -> bool:
    """True iff the bitset is non-empty, down-closed and join-closed."""
    if members <= 0 or members & ~L.universe:
        return False
    elements = list(iter_bits(members))
    for x in elements:
        if L.down_masks[x] & ~members:
            return False
    for i, x in enumerate(elements):
        row = L.join_rows[x]
        for y in elements[i + 1:]:
            if not members >> row[y] & 1:
                return False
    return True


def covers_of(leq: np.ndarray) -> List[Tuple[int, int]]:
    """Covering pairs of an order matrix, in index order."""
    strict = np.array(leq, dtype=bool)
    np.fill_diagonal(strict, False)
    covers = strict & ~np.matmul(strict, strict)
    return [(int(x), int(y)) for x, y in np.argwhere(covers)]


def cover_pairs(L: Lattice) -> List[Tuple[int, int]]:
    """Covering pairs (x, y), y covers x, in index order."""
    return covers_of(L.leq)


def atoms(L: Lattice) -> List[int]:
    return [y for x, y in cover_pairs(L) if x == L.bottom]


def is_boolean(L: Lattice) -> bool:
    """A finite lattice is Boolean iff it is distributive with 2^(#atoms) elements."""
    return is_distributive(L).holds and L.n == 2 ** len(atoms(L))


_FIGURE_COVERS = {
    "n5": (("0", "a", "b", "c", "1"),
           [("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")]),
    "m3": (("0", "a", "b", "c", "1"),
           [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")]),
    "fig5": (("0", "a", "b", "c", "d", "1"),
             [("0", "a"), ("0", "b"), ("a", "c"), ("c", "d"), ("b", "d"), ("d", "1")]),
}

BUILTIN_NAMES = ("n5", "m3", "fig5", "chain_k", "boolean_k")

_ATOM_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _boolean_label(subset: int, k: int) -> str:
    if subset == 0:
        return "0"
    if subset == full_mask(k):
        return "1"
    return "".join(_ATOM_LETTERS[i] for i in iter_bits(subset))


def builtin_covers(name: str) -> Tuple[Tuple[str, ...], List[Pair]]:
    """
    Labels and cover pairs of a built-in lattice.

    Args:
        name (str): One of n5, m3, fig5, chain_k (k >= 1), boolean_k (0 <= k <= 26).

    Returns:
        Tuple[Tuple[str, ...], List[Tuple[str, str]]]: Labels and cover pairs.

    Raises:
        UnknownBuiltin: If the name is not recognised.
    """
    key = name.strip().lower()
    if key in _FIGURE_COVERS:
        names, covers = _FIGURE_COVERS[key]
        return names, list(covers)
    match = re.fullmatch(r"(chain|boolean)_(\d+)", key)
    if match is None:
        raise UnknownBuiltin(name)
    family, k = match.group(1), int(match.group(2))
    if family == "chain":
        if k < 1:
            raise UnknownBuiltin(name)
        names = tuple(str(i) for i in range(k))
        return names, [(names[i], names[i + 1]) for i in range(k - 1)]
    if k > len(_ATOM_LETTERS):
        raise UnknownBuiltin(name)
    names = tuple(_boolean_label(s, k) for s in range(2 ** k))
    covers = [(names[s], names[s | 1 << i]) for s in range(2 ** k) for i in range(k) if not s >> i & 1]
    return names, covers


def builtin(name: str) -> Lattice:
    """Return a built-in lattice, labelled as in the figures where applicable."""
    names, covers = builtin_covers(name)
    return build_lattice(names, covers)
