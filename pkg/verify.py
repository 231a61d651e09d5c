"""
Theorem-verification harness.

Every theorem clause is a predicate over named carrier subsets. `check_all`
runs each predicate over a family of subsets (exhaustive on small carriers,
sampled with a fixed seed otherwise) and reports the first violation as a
self-contained witness: lattice text, factor element lists and the subsets.
`replay` rebuilds the quasimodule from such a witness and re-evaluates the
same predicate.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations, product
import json
import time
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from exceptions import (
    CarrierTooLarge,
    EnumerationBudgetExceeded,
    FactorizationFailed,
    NotALattice,
    NotZeroDistributive,
    QuasiLatError,
    UnknownInstance,
)
from file_processing import dump_lattice, parse_lattice_text
from galois import (
    RawSubset,
    closed_lattice_iso,
    closed_subquasimodules,
    double_perp,
    factorize_closed,
    factors_0_distributive,
    is_antitone_involution,
    is_closed,
    is_splitting,
    perp,
    perp_in_factor,
    splitting_subquasimodules,
    sum_set,
)
from lattice_core import Ideal, check_lattice_laws, is_0_distributive, is_modular
from logging_config import logger
from quasimodule import (
    CanonicalQM,
    as_mask,
    canonical,
    factor_qm,
    lift_elements,
    product_mask,
    project,
    standard_basis,
    verify_axioms,
)
from subquasi import (
    SubQM,
    SubQMLattice,
    all_subquasimodules,
    close,
    find_bases,
    generate,
    is_basis,
    is_orthogonal_set,
    is_subquasimodule,
)
from utilities import iter_bits, mask_of, popcount, setting
import worked_examples as golden


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    HYPOTHESIS_NOT_MET = "hypothesis-not-met"
    COUNTEREXAMPLE = "counterexample"
    BUDGET_EXCEEDED = "budget-exceeded"


REPORT_COLUMNS = ["theorem", "status", "instance", "scope", "seconds", "witness", "detail"]


@dataclass
class TheoremReport:
    theorem: str
    status: Status
    instance: str
    scope: str = ""
    seconds: float = 0.0
    witness: Optional[Dict[str, Any]] = None
    detail: str = ""

    @property
    def failed(self) -> bool:
        return self.status == Status.FAIL

    def to_record(self) -> Dict[str, Any]:
        return {
            "theorem": self.theorem,
            "status": self.status.value,
            "instance": self.instance,
            "scope": self.scope,
            "seconds": round(self.seconds, 4),
            "witness": json.dumps(self.witness, sort_keys=True) if self.witness else "",
            "detail": self.detail,
        }


@dataclass(frozen=True)
class SearchConfig:
    max_lattice_size: int = 5
    max_factors: int = 2
    max_carrier: int = 64
    seed: int = 0
    drop_hypotheses: Tuple[str, ...] = ()
    targets: Tuple[str, ...] = ()

    @property
    def effective_targets(self) -> Tuple[str, ...]:
        if self.targets:
            return self.targets
        if "0-distributive" in self.drop_hypotheses:
            return ("prop2", "th2.vi", "split.perp")
        return ("soundness",)


# Witness encoding

def describe_qm(Q: CanonicalQM) -> Dict[str, Any]:
    names = Q.lattice.names
    return {
        "lattice": dump_lattice(Q.lattice),
        "factors": [[names[e] for e in f.elements()] for f in Q.factors],
    }


def qm_from_description(description: Dict[str, Any]) -> CanonicalQM:
    L = parse_lattice_text(description["lattice"], source="<witness>")
    factors = [Ideal(L, mask_of(L.element(x) for x in labels)) for labels in description["factors"]]
    return canonical(L, factors)


def _encode_sets(Q: CanonicalQM, sets: Dict[str, Any]) -> Dict[str, Any]:
    names = Q.lattice.names
    encoded = {}
    for key, value in sets.items():
        if key == "parts":
            encoded[key] = [[names[e] for e in iter_bits(part)] for part in value]
        else:
            encoded[key] = [[names[x] for x in vector] for vector in Q.vectors(value)]
    return encoded


def _decode_sets(Q: CanonicalQM, encoded: Dict[str, Any]) -> Dict[str, Any]:
    L = Q.lattice
    sets = {}
    for key, value in encoded.items():
        if key == "parts":
            sets[key] = tuple(mask_of(L.element(x) for x in labels) for labels in value)
        else:
            sets[key] = as_mask(Q, [Q.parse_vector(labels) for labels in value])
    return sets


def make_witness(Q: CanonicalQM, clause: str, sets: Dict[str, Any], **extra: Any) -> Dict[str, Any]:
    witness = {"clause": clause, **describe_qm(Q), "sets": _encode_sets(Q, sets)}
    witness.update(extra)
    return witness


def _subs_budget() -> int:
    return min(setting("limits", "enumeration_budget"), setting("verify", "enumeration_budget"))


# Memoised views of one quasimodule

class Context:
    """Caches perps, generated subquasimodules and derived families of one Q."""

    def __init__(self, Q: CanonicalQM, seed: Optional[int] = None):
        self.Q = Q
        self.seed = seed if seed is not None else setting("verify", "seed")
        self._perp: Dict[int, int] = {}
        self._gen: Dict[int, int] = {Q.zero_mask: Q.zero_mask, 0: Q.zero_mask}
        self._subqm: Dict[int, bool] = {}
        self._splits: Dict[int, bool] = {}

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def perp(self, mask: int) -> int:
        result = self._perp.get(mask)
        if result is None:
            result = self._perp[mask] = perp(self.Q, mask)
        return result

    def dperp(self, mask: int) -> int:
        return self.perp(self.perp(mask))

    def gen(self, mask: int) -> int:
        """⟨mask⟩, built bit by bit so that prefixes are shared."""
        if mask in self._gen:
            return self._gen[mask]
        generated, prefix = self.Q.zero_mask, 0
        for bit in iter_bits(mask):
            prefix |= 1 << bit
            known = self._gen.get(prefix)
            if known is None:
                known = self._gen[prefix] = close(self.Q, generated, 1 << bit)
            generated = known
        return generated

    def is_subqm(self, mask: int) -> bool:
        result = self._subqm.get(mask)
        if result is None:
            result = self._subqm[mask] = is_subquasimodule(self.Q, mask).holds
        return result

    def splits(self, mask: int) -> bool:
        result = self._splits.get(mask)
        if result is None:
            result = self._splits[mask] = sum_set(self.Q, mask, self.perp(mask)) == self.Q.full
        return result

    @cached_property
    def zero_distributive_error(self) -> Optional[NotZeroDistributive]:
        return factors_0_distributive(self.Q)

    @cached_property
    def _subs_outcome(self) -> Tuple[Optional[SubQMLattice], Optional[EnumerationBudgetExceeded]]:
        try:
            return all_subquasimodules(self.Q, _subs_budget()), None
        except EnumerationBudgetExceeded as e:
            return None, e

    @property
    def subs(self) -> SubQMLattice:
        """L(Q), enumerated at most once; an over-budget enumeration is re-raised on every access."""
        subs, error = self._subs_outcome
        if error is not None:
            raise error
        return subs

    @property
    def subs_over_budget(self) -> bool:
        return self._subs_outcome[1] is not None

    @cached_property
    def closed(self):
        return closed_subquasimodules(self.Q)

    @cached_property
    def closed_masks(self) -> frozenset:
        return frozenset(self.closed.base.masks)

    @cached_property
    def factor_qms(self) -> Tuple[CanonicalQM, ...]:
        return tuple(factor_qm(self.Q, i) for i in range(self.Q.arity))

    @cached_property
    def factor_node_parts(self) -> Tuple[Tuple[int, ...], ...]:
        """Element bitsets of every subquasimodule of each factor quasimodule."""
        return tuple(
            tuple(project(F, mask, 0) for mask in all_subquasimodules(F, _subs_budget()).masks) for F in self.factor_qms
        )

    @cached_property
    def ip_matrix(self) -> np.ndarray:
        """Inner products ⟨x, z⟩ for every x and every z (or every basis vector z on big carriers)."""
        Q, L = self.Q, self.Q.lattice
        coords = Q.coords
        if Q.size <= setting("limits", "table_carrier_limit"):
            others = coords
        else:
            others = np.array(standard_basis(Q), dtype=np.int64).reshape(Q.arity, Q.arity)
        ip = np.full((Q.size, len(others)), L.bottom, dtype=np.int64)
        for f in range(Q.arity):
            ip = L.join[ip, L.meet[coords[:, f][:, None], others[:, f][None, :]]]
        return ip

    # Families of named subsets, each with a scope label.

    def _random_subset(self, rng: np.random.Generator) -> int:
        density = rng.random()
        return mask_of(np.flatnonzero(rng.random(self.Q.size) < density).tolist()) & self.Q.full

    @cached_property
    def subsets(self) -> Tuple[List[int], str]:
        Q = self.Q
        m = Q.size
        if m <= setting("verify", "exhaustive_subset_limit"):
            perps = [Q.full] * (1 << m)
            masks = Q.perp_masks
            for S in range(1, 1 << m):
                low = S & -S
                perps[S] = perps[S ^ low] & masks[low.bit_length() - 1]
            self._perp.update(enumerate(perps))
            return list(range(1 << m)), f"all {1 << m} subsets"
        count = setting("verify", "sampled_subsets")
        rng = self.rng(1)
        sampled = [self._random_subset(rng) for _ in range(count)]
        scope = f"{count} sampled subsets (seed {self.seed})"
        nodes = []
        if not self.subs_over_budget:
            nodes = list(self.subs.masks)
            scope = f"{len(nodes)} subquasimodules + " + scope
        return list(dict.fromkeys(nodes + [0] + sampled)), scope

    def _pairs(self, items: Sequence[int], salt: int, what: str) -> Tuple[List[Tuple[int, int]], str]:
        cap = setting("verify", "sampled_pairs")
        if len(items) ** 2 <= cap:
            return [(a, b) for a in items for b in items], f"all {len(items) ** 2} pairs of {what}"
        rng = self.rng(salt)
        left = rng.integers(0, len(items), size=cap)
        right = rng.integers(0, len(items), size=cap)
        return [(items[i], items[j]) for i, j in zip(left, right)], f"{cap} sampled pairs of {what} (seed {self.seed})"

    def family(self, kind: str) -> Tuple[Iterable[Dict[str, Any]], str]:
        if kind == "none":
            return [{}], "exhaustive"
        if kind == "subsets":
            masks, scope = self.subsets
            return ({"A": A} for A in masks), scope
        if kind == "nonempty":
            masks, scope = self.subsets
            return ({"A": A} for A in masks if A), scope + ", A non-empty"
        if kind in ("pairs", "nested_pairs"):
            masks, scope = self.subsets
            pairs, pair_scope = self._pairs(masks, 2, "subsets")
            if kind == "pairs":
                return ({"A": A, "B": B} for A, B in pairs), pair_scope
            return ({"A": A, "B": A | B} for A, B in pairs), pair_scope + " as (A, A∪B)"
        if kind == "singletons":
            return ({"A": 1 << v} for v in range(self.Q.size)), f"all {self.Q.size} singletons"
        if kind == "closed":
            masks = self.closed.base.masks
            return ({"P": P} for P in masks), f"all {len(masks)} closed subquasimodules"
        if kind == "subqms":
            return ({"P": P} for P in self.subs.masks), f"all {len(self.subs)} subquasimodules"
        if kind == "subqm_pairs":
            pairs, scope = self._pairs(list(self.subs.masks), 3, "subquasimodules")
            return ({"P": P, "R": R} for P, R in pairs), scope
        if kind == "closed_pairs":
            pairs, scope = self._pairs(list(self.closed.base.masks), 4, "closed subquasimodules")
            return ({"P": P, "R": R} for P, R in pairs), scope
        if kind == "orthogonal":
            return self._orthogonal_family()
        if kind == "parts":
            return self._parts_family()
        if kind == "small_subsets":
            return self._small_subsets_family()
        raise ValueError(f"Unknown subset family '{kind}'")

    def _orthogonal_family(self) -> Tuple[Iterable[Dict[str, Any]], str]:
        Q = self.Q
        rng = self.rng(5)
        nonzero = [v for v in range(Q.size) if v != Q.zero]
        sets = set()
        for _ in range(setting("verify", "sampled_subsets")):
            chosen = 0
            for v in rng.permutation(nonzero).tolist():
                if chosen & ~Q.perp_masks[v] == 0:
                    chosen |= 1 << v
                if popcount(chosen) >= 5:
                    break
            sets.add(chosen)
        cases = [{"C": C, "B": B} for C in sorted(sets) for B in _submasks(C)]
        return cases, f"{len(sets)} sampled orthogonal sets C with every B ⊆ C (seed {self.seed})"

    def _parts_family(self) -> Tuple[Iterable[Dict[str, Any]], str]:
        nodes = self.factor_node_parts
        total = int(np.prod([len(n) for n in nodes]))
        cap = setting("verify", "family_sample")
        rng = self.rng(6)
        if total <= cap:
            combos = list(product(*nodes))
            scope = f"all {total} products of factor subquasimodules"
        else:
            picks = [rng.integers(0, len(n), size=cap) for n in nodes]
            combos = [tuple(n[p[k]] for n, p in zip(nodes, picks)) for k in range(cap)]
            scope = f"{cap} sampled products of factor subquasimodules (seed {self.seed})"
        extra = setting("verify", "sampled_subsets") // 5
        for _ in range(extra):
            combos.append(tuple(
                mask_of(e for e in f.elements() if rng.random() < 0.5) for f in self.Q.factors
            ))
        return ({"parts": parts} for parts in combos), scope + f" + {extra} random element-set products"

    def _small_subsets_family(self) -> Tuple[Iterable[Dict[str, Any]], str]:
        m = self.Q.size
        total = sum(_binomial(m, k) for k in range(4))
        if total <= setting("verify", "family_sample") or m <= setting("verify", "exhaustive_small_subsets_carrier"):
            masks = (mask_of(c) for k in range(4) for c in combinations(range(m), k))
            return ({"A": A} for A in masks), f"all {total} subsets of size <= 3"
        cap = setting("verify", "family_sample")
        rng = self.rng(7)
        masks = [0] + [mask_of(rng.choice(m, size=int(rng.integers(1, 4)), replace=False).tolist()) for _ in range(cap)]
        return ({"A": A} for A in masks), f"{cap} sampled subsets of size <= 3 (seed {self.seed})"


def _submasks(mask: int) -> List[int]:
    subs = []
    sub = mask
    while True:
        subs.append(sub)
        if sub == 0:
            return sorted(subs)
        sub = (sub - 1) & mask


def _binomial(n: int, k: int) -> int:
    if k > n:
        return 0
    result = 1
    for i in range(k):
        result = result * (n - i) // (i + 1)
    return result


# Clause predicates: True means the clause holds on the given subsets.

def _axioms(ctx: Context) -> bool:
    return all(check.passed for check in verify_axioms(ctx.Q))


def _separation(ctx: Context) -> bool:
    return len(np.unique(ctx.ip_matrix, axis=0)) == ctx.Q.size


def _inner_product(ctx: Context) -> bool:
    Q, L = ctx.Q, ctx.Q.lattice
    if Q.size > setting("limits", "table_carrier_limit"):
        return True
    coords = Q.coords
    componentwise = np.ones((Q.size, Q.size), dtype=bool)
    for f in range(Q.arity):
        componentwise &= L.meet[coords[:, f][:, None], coords[:, f][None, :]] == L.bottom
    if not np.array_equal(componentwise, ctx.ip_matrix == L.bottom):
        return False
    return all(
        Q.perp_masks[x] == mask_of(np.flatnonzero(componentwise[x]).tolist()) for x in range(Q.size)
    )


def _standard_basis(ctx: Context) -> bool:
    Q = ctx.Q
    bottom = Q.lattice.bottom
    basis = [(k, b) for k, b in enumerate(standard_basis(Q)) if b[k] != bottom]
    B = as_mask(Q, [b for _, b in basis])
    if not is_basis(SubQM(Q, Q.full), B):
        return False
    for k, b in basis:
        expected = mask_of(p for p, v in enumerate(Q.carrier) if v[k] == bottom)
        if ctx.gen(B & ~(1 << Q.position(b))) != expected:
            return False
    return True


def _rem1_i(ctx: Context, A: int) -> bool:
    return A & ~ctx.dperp(A) == 0


def _rem1_ii(ctx: Context, A: int, B: int) -> bool:
    return A & ~B != 0 or ctx.perp(B) & ~ctx.perp(A) == 0


def _rem1_iii(ctx: Context, A: int) -> bool:
    return ctx.perp(ctx.dperp(A)) == ctx.perp(A)


def _rem1_iv(ctx: Context, A: int, B: int) -> bool:
    return (A & ~ctx.perp(B) == 0) == (B & ~ctx.perp(A) == 0)


def _lem4_i(ctx: Context, A: int, B: int) -> bool:
    return ctx.perp(A) & ctx.perp(B) == ctx.perp(A | B) and ctx.perp(0) == ctx.Q.full


def _lem4_ii(ctx: Context, A: int, B: int) -> bool:
    return ctx.dperp(A & B) & ~(ctx.dperp(A) & ctx.dperp(B)) == 0


def _lem4_iii(ctx: Context) -> bool:
    return ctx.perp(ctx.Q.full) == ctx.Q.zero_mask


def _lem4_iv(ctx: Context, A: int) -> bool:
    return A & ctx.perp(A) == A & ctx.Q.zero_mask


def _lem4_v(ctx: Context) -> bool:
    return ctx.perp(ctx.Q.zero_mask) == ctx.Q.full


def _prop2(ctx: Context, A: int) -> bool:
    return ctx.is_subqm(ctx.perp(A))


def _th2_i(ctx: Context, A: int) -> bool:
    return ctx.perp(A) in ctx.closed_masks


def _least_closed_over(ctx: Context, mask: int) -> int:
    least = ctx.Q.full
    for N in ctx.closed.base.masks:
        if mask & ~N == 0:
            least &= N
    return least


def _th2_ii(ctx: Context, A: int) -> bool:
    D = ctx.dperp(A)
    return D in ctx.closed_masks and A & ~D == 0 and D == _least_closed_over(ctx, A)


def _th2_iii(ctx: Context, P: int, R: int) -> bool:
    return ctx.dperp(P | R) == _least_closed_over(ctx, P | R)


def _th2_iv(ctx: Context) -> bool:
    return is_antitone_involution(ctx.closed.base, ctx.closed.perp_map)


def _th2_v(ctx: Context) -> bool:
    family = ctx.closed.base
    try:
        lattice = family.to_lattice()
    except NotALattice:
        return False
    if not all(check.holds for check in check_lattice_laws(lattice).values()):
        return False
    # meet in L_C(Q) is intersection
    masks = family.masks
    for i, P in enumerate(masks):
        for j in range(i, len(masks)):
            k = family.position.get(P & masks[j])
            if k is None or lattice.meet[i, j] != k:
                return False
    return True


def _th2_vi(ctx: Context, A: int) -> bool:
    return ctx.perp(A) == ctx.perp(ctx.gen(A))


def _th2_vii(ctx: Context, C: int, B: int) -> bool:
    if B & ~C or not is_orthogonal_set(ctx.Q, C):
        return True
    return ctx.gen(C & ~B) & ~ctx.perp(ctx.gen(B)) == 0


def _lem6_i(ctx: Context, P: int) -> bool:
    for i, F in enumerate(ctx.factor_qms):
        if not is_subquasimodule(F, lift_elements(F, project(ctx.Q, P, i))).holds:
            return False
    return True


def _lem6_ii(ctx: Context, parts: Tuple[int, ...]) -> bool:
    whole = ctx.is_subqm(product_mask(ctx.Q, parts))
    each = all(is_subquasimodule(F, lift_elements(F, part)).holds for F, part in zip(ctx.factor_qms, parts))
    return whole == each


def _lem1(ctx: Context, A: int) -> bool:
    Q = ctx.Q
    parts = [perp_in_factor(Q, i, project(Q, A, i)) for i in range(Q.arity)]
    return ctx.perp(A) == product_mask(Q, parts)


def _th3(ctx: Context, P: int) -> bool:
    Q = ctx.Q
    closed = P in ctx.closed_masks
    parts = [project(Q, P, i) for i in range(Q.arity)]
    factorizable = product_mask(Q, parts) == P and all(
        is_closed(F, lift_elements(F, part)) for F, part in zip(ctx.factor_qms, parts)
    )
    if closed:
        try:
            factorize_closed(Q, SubQM(Q, P))
        except FactorizationFailed:
            return False
    return closed == factorizable


def _cor1(ctx: Context) -> bool:
    return closed_lattice_iso(ctx.Q).verified


def _split_closed(ctx: Context, P: int) -> bool:
    return not ctx.splits(P) or P in ctx.closed_masks


def _split_perp(ctx: Context, P: int) -> bool:
    return not ctx.splits(P) or (ctx.is_subqm(ctx.perp(P)) and ctx.splits(ctx.perp(P)))


def _split_antitone(ctx: Context, P: int, R: int) -> bool:
    if not (ctx.splits(P) and ctx.splits(R)):
        return True
    if ctx.perp(P) not in ctx.closed_masks or ctx.perp(R) not in ctx.closed_masks:
        return False
    return P & ~R != 0 or ctx.perp(R) & ~ctx.perp(P) == 0


def _split_product(ctx: Context, parts: Tuple[int, ...]) -> bool:
    whole_mask = product_mask(ctx.Q, parts)
    whole = ctx.is_subqm(whole_mask) and ctx.splits(whole_mask)
    each = True
    for F, part in zip(ctx.factor_qms, parts):
        lifted = lift_elements(F, part)
        if not (is_subquasimodule(F, lifted).holds and is_splitting(F, SubQM(F, lifted))):
            each = False
            break
    return whole == each


def _oracle_subs(ctx: Context) -> bool:
    Q = ctx.Q
    if Q.size <= setting("verify", "exhaustive_subset_limit"):
        brute = {S for S in range(1 << Q.size) if ctx.is_subqm(S)}
        return brute == set(ctx.subs.masks)
    nodes = set(ctx.subs.masks)
    if not all(ctx.is_subqm(P) for P in nodes):
        return False
    return all(ctx.gen(mask_of([v])) in nodes for v in range(Q.size))


def _oracle_closed(ctx: Context) -> bool:
    brute = {P for P in ctx.subs.masks if ctx.dperp(P) == P}
    return brute == set(ctx.closed_masks)


def _oracle_generate(ctx: Context, A: int) -> bool:
    least = ctx.Q.full
    for P in ctx.subs.masks:
        if A & ~P == 0:
            least &= P
    return ctx.gen(A) == least == generate(ctx.Q, A).members


def _closed_splits(ctx: Context, P: int) -> bool:
    return P not in ctx.closed_masks or ctx.splits(P)


def _hom_hypothesis(ctx: Context, **members: int) -> bool:
    masks = list(members.values())
    meet = ctx.Q.full
    closed_meet = ctx.Q.full
    for P in masks:
        meet &= P
        closed_meet &= ctx.dperp(P)
    return ctx.dperp(meet) == closed_meet


def _hom_conclusion(ctx: Context, **members: int) -> bool:
    Q = ctx.Q
    masks = list(members.values())
    union = closed_union = 0
    for P in masks:
        union |= P
        closed_union |= ctx.dperp(P)
        if ctx.dperp(ctx.perp(P)) != ctx.perp(ctx.dperp(P)):
            return False
    join = ctx.gen(union)
    if ctx.dperp(join) != ctx.dperp(closed_union):
        return False
    if not _hom_hypothesis(ctx, **members):
        return False
    return ctx.dperp(Q.zero_mask) == Q.zero_mask and ctx.dperp(Q.full) == Q.full


PREDICATES: Dict[str, Callable[..., bool]] = {
    "qm.axioms": _axioms,
    "sep": _separation,
    "ip": _inner_product,
    "th1": _standard_basis,
    "rem1.i": _rem1_i,
    "rem1.ii": _rem1_ii,
    "rem1.iii": _rem1_iii,
    "rem1.iv": _rem1_iv,
    "lem4.i": _lem4_i,
    "lem4.ii": _lem4_ii,
    "lem4.iii": _lem4_iii,
    "lem4.iv": _lem4_iv,
    "lem4.v": _lem4_v,
    "prop2": _prop2,
    "th2.i": _th2_i,
    "th2.ii": _th2_ii,
    "th2.iii": _th2_iii,
    "th2.iv": _th2_iv,
    "th2.v": _th2_v,
    "th2.vi": _th2_vi,
    "th2.vii": _th2_vii,
    "lem6.i": _lem6_i,
    "lem6.ii": _lem6_ii,
    "lem1": _lem1,
    "th3": _th3,
    "cor1": _cor1,
    "split.sub_closed": _split_closed,
    "split.perp": _split_perp,
    "split.antitone": _split_antitone,
    "split.product": _split_product,
    "oracle.subs": _oracle_subs,
    "oracle.closed": _oracle_closed,
    "oracle.generate": _oracle_generate,
    "search.closed-splits": _closed_splits,
    "hom.hypothesis": _hom_hypothesis,
    "hom.conclusion": _hom_conclusion,
}


@dataclass(frozen=True)
class Clause:
    theorem: str
    family: str
    needs_0_distributive: bool = False
    description: str = ""


CLAUSES: Tuple[Clause, ...] = (
    Clause("qm.axioms", "none", description="quasimodule axioms of the canonical construction"),
    Clause("sep", "none", description="x·z = y·z for all z implies x = y"),
    Clause("ip", "none", description="x ⊥ y iff every componentwise meet is 0"),
    Clause("th1", "none", description="standard basis of ∏[0,q_i]"),
    Clause("rem1.i", "subsets", description="A ⊆ A^⊥⊥"),
    Clause("rem1.ii", "nested_pairs", description="A ⊆ B ⇒ B^⊥ ⊆ A^⊥"),
    Clause("rem1.iii", "subsets", description="A^⊥⊥⊥ = A^⊥"),
    Clause("rem1.iv", "pairs", description="A ⊆ B^⊥ ⇔ B ⊆ A^⊥"),
    Clause("lem4.i", "pairs", description="A^⊥ ∩ B^⊥ = (A ∪ B)^⊥"),
    Clause("lem4.ii", "pairs", description="(A ∩ B)^⊥⊥ ⊆ A^⊥⊥ ∩ B^⊥⊥"),
    Clause("lem4.iii", "none", description="Q^⊥ = {0}"),
    Clause("lem4.iv", "nonempty", description="A ∩ A^⊥ ⊆ {0}, with equality iff 0 ∈ A"),
    Clause("lem4.v", "none", description="{0}^⊥ = Q"),
    Clause("prop2", "subsets", True, "A^⊥ is a subquasimodule"),
    Clause("th2.i", "subsets", True, "L_C(Q) = {D^⊥}"),
    Clause("th2.ii", "subsets", True, "A^⊥⊥ is the least closed subquasimodule over A"),
    Clause("th2.iii", "closed_pairs", True, "closed join is (P ∪ R)^⊥⊥"),
    Clause("th2.iv", "none", True, "⊥ is an antitone involution on L_C(Q)"),
    Clause("th2.v", "none", True, "L_C(Q) is a lattice with meet = ∩"),
    Clause("th2.vi", "subsets", True, "A^⊥ = ⟨A⟩^⊥"),
    Clause("th2.vii", "orthogonal", True, "⟨C∖B⟩ ⊆ ⟨B⟩^⊥ for orthogonal C"),
    Clause("lem6.i", "subqms", description="projections of a subquasimodule are subquasimodules"),
    Clause("lem6.ii", "parts", description="∏ M_i ∈ L(Q) ⇔ every M_i ∈ L(L_i)"),
    Clause("lem1", "subsets", description="P^⊥ = ∏ p_i(P)^⊥"),
    Clause("th3", "subqms", True, "closed ⇔ product of closed projections"),
    Clause("cor1", "none", True, "L_C(Q) ≅ ∏ L_C(L_i)"),
    Clause("split.sub_closed", "subqms", True, "L_S(Q) ⊆ L_C(Q)"),
    Clause("split.perp", "subqms", True, "P splitting ⇒ P^⊥ splitting"),
    Clause("split.antitone", "subqm_pairs", True, "⊥ is antitone from L_S(Q) to L_C(Q)"),
    Clause("split.product", "parts", description="∏ M_i splitting ⇔ every M_i splitting"),
    Clause("oracle.subs", "none", description="L(Q) equals the subset filter"),
    Clause("oracle.closed", "none", True, "L_C(Q) equals the closed filter of L(Q)"),
    Clause("oracle.generate", "small_subsets", description="⟨A⟩ equals the meet of its upper bounds in L(Q)"),
)


def violation_detail(ctx: Context, clause: str, sets: Dict[str, Any]) -> str:
    Q = ctx.Q
    if clause == "prop2":
        violation = is_subquasimodule(Q, ctx.perp(sets["A"])).violation
        return f"A^⊥ is not a subquasimodule: {violation.describe(Q)}"
    shown = ", ".join(
        f"{key}={{{','.join(Q.labels(value))}}}" for key, value in sets.items() if key != "parts"
    )
    return f"violated for {shown}" if shown else "violated"


def run_clause(ctx: Context, clause: Clause, instance: str) -> TheoremReport:
    """Evaluate one clause over its family and report the first violation."""
    start = time.perf_counter()
    error = ctx.zero_distributive_error if clause.needs_0_distributive else None
    if error is not None and clause.theorem != "prop2":
        return TheoremReport(clause.theorem, Status.HYPOTHESIS_NOT_MET, instance, "not run",
                             time.perf_counter() - start, None, str(error))
    predicate = PREDICATES[clause.theorem]
    try:
        cases, scope = ctx.family(clause.family)
        for sets in cases:
            if predicate(ctx, **sets):
                continue
            detail = violation_detail(ctx, clause.theorem, sets)
            status = Status.FAIL if error is None else Status.HYPOTHESIS_NOT_MET
            if status == Status.FAIL:
                logger.error(f"{instance}: {clause.theorem} fails: {detail}")
            return TheoremReport(clause.theorem, status, instance, scope, time.perf_counter() - start,
                                 make_witness(ctx.Q, clause.theorem, sets, violation=detail), detail)
    except (EnumerationBudgetExceeded, CarrierTooLarge) as e:
        logger.warning(f"{instance}: {clause.theorem} skipped: {e}")
        return TheoremReport(clause.theorem, Status.BUDGET_EXCEEDED, instance, "budget",
                             time.perf_counter() - start, None, str(e))
    if error is not None:
        return TheoremReport(clause.theorem, Status.HYPOTHESIS_NOT_MET, instance, scope,
                             time.perf_counter() - start, None, f"{error}; no violation found")
    return TheoremReport(clause.theorem, Status.PASS, instance, scope, time.perf_counter() - start,
                         None, clause.description)


def check_all(Q: CanonicalQM, instance: str = "Q", seed: Optional[int] = None) -> List[TheoremReport]:
    """
    Run every theorem clause on one quasimodule.

    Clauses whose hypothesis (0-distributive factors) fails are reported
    hypothesis-not-met; the subquasimodule property of A^⊥ is still searched
    for a violation so that the counterexample can be shown.

    Args:
        Q (CanonicalQM): The quasimodule.
        instance (str): Name stamped into every report.
        seed (int, optional): Sampling seed; defaults to verify.seed.

    Returns:
        List[TheoremReport]: One report per clause, the homomorphism report last.
    """
    ctx = Context(Q, seed)
    logger.info(f"Checking {len(CLAUSES) + 1} clauses on {instance} ({Q.size} vectors)")
    reports = [run_clause(ctx, clause, instance) for clause in CLAUSES]
    start = time.perf_counter()
    if ctx.zero_distributive_error is not None:
        reports.append(TheoremReport("hom", Status.HYPOTHESIS_NOT_MET, instance, "not run",
                                     0.0, None, str(ctx.zero_distributive_error)))
    else:
        try:
            reports.append(check_homomorphism(Q, instance, ctx))
        except (EnumerationBudgetExceeded, CarrierTooLarge) as e:
            reports.append(TheoremReport("hom", Status.BUDGET_EXCEEDED, instance, "budget",
                                         time.perf_counter() - start, None, str(e)))
    failed = sum(r.failed for r in reports)
    logger.info(f"{instance}: {len(reports) - failed} of {len(reports)} clauses without failure")
    return reports


def _families(ctx: Context) -> Tuple[List[Tuple[int, ...]], str]:
    nodes = list(ctx.subs.masks)
    largest = setting("verify", "max_family_size")
    cap = setting("verify", "family_sample")
    rng = ctx.rng(8)
    families = []
    for size in range(3, largest + 1):
        if _binomial(len(nodes), size) <= cap:
            families.extend(combinations(nodes, size))
        else:
            for _ in range(cap):
                picks = sorted(rng.choice(len(nodes), size=size, replace=False).tolist())
                families.append(tuple(nodes[p] for p in picks))
    return families, f"families of size 3..{largest} (exhaustive up to {cap} per size)"


def check_homomorphism(Q: CanonicalQM, instance: str = "Q", ctx: Optional[Context] = None) -> TheoremReport:
    """
    Test whether ⊥⊥ maps L(Q) homomorphically onto L_C(Q).

    The pairwise hypothesis (P∩R)^⊥⊥ = P^⊥⊥ ∩ R^⊥⊥ is checked first; when it
    fails the witness is reported and no conclusion is claimed. Otherwise the
    preservation of joins, meets, ⊥ and both bounds is checked on pairs, and
    on larger families when the family hypothesis also holds.

    Raises:
        NotZeroDistributive: If a factor is not 0-distributive.
    """
    start = time.perf_counter()
    ctx = ctx or Context(Q)
    if ctx.zero_distributive_error is not None:
        logger.error(str(ctx.zero_distributive_error))
        raise ctx.zero_distributive_error

    def named(sets: Dict[str, int]) -> str:
        return ", ".join(ctx.subs.name_of(mask) or "?" for mask in sets.values())

    pair_cases, pair_scope = ctx.family("subqm_pairs")
    pair_cases = list(pair_cases)
    for sets in pair_cases:
        if not _hom_hypothesis(ctx, **sets):
            detail = f"(P∩R)^⊥⊥ ≠ P^⊥⊥ ∩ R^⊥⊥ for {named(sets)}; homomorphism not claimed"
            return TheoremReport("hom", Status.HYPOTHESIS_NOT_MET, instance, pair_scope,
                                 time.perf_counter() - start,
                                 make_witness(Q, "hom.hypothesis", sets, violation=detail), detail)
    for sets in pair_cases:
        if not _hom_conclusion(ctx, **sets):
            detail = f"⊥⊥ does not preserve the operations on {named(sets)}"
            logger.error(f"{instance}: {detail}")
            return TheoremReport("hom", Status.FAIL, instance, pair_scope, time.perf_counter() - start,
                                 make_witness(Q, "hom.conclusion", sets, violation=detail), detail)

    families, family_scope = _families(ctx)
    scope = f"{pair_scope}; {family_scope}"
    for family in families:
        sets = {f"P{k + 1}": mask for k, mask in enumerate(family)}
        if not _hom_hypothesis(ctx, **sets):
            detail = (f"pairwise homomorphism holds; family hypothesis fails for {named(sets)}; "
                      f"complete homomorphism not claimed")
            return TheoremReport("hom", Status.PASS, instance, scope, time.perf_counter() - start,
                                 make_witness(Q, "hom.hypothesis", sets, violation=detail), detail)
        if not _hom_conclusion(ctx, **sets):
            detail = f"⊥⊥ does not preserve the operations on the family {named(sets)}"
            logger.error(f"{instance}: {detail}")
            return TheoremReport("hom", Status.FAIL, instance, scope, time.perf_counter() - start,
                                 make_witness(Q, "hom.conclusion", sets, violation=detail), detail)
    return TheoremReport("hom", Status.PASS, instance, scope, time.perf_counter() - start, None,
                         "hypotheses hold and ⊥⊥ is a homomorphism onto L_C(Q)")


def replay(report: TheoremReport) -> bool:
    """
    Re-run the witness of a report and confirm the violation.

    Returns:
        bool: True iff the recorded violation is reproduced.

    Raises:
        ValueError: If the report carries no witness.
    """
    witness = report.witness
    if not witness:
        raise ValueError(f"Report '{report.theorem}' has no witness to replay")
    if witness["clause"] == "golden":
        again = reproduce_instance(witness["instance"])
        return any(r.theorem == report.theorem and r.status == Status.FAIL for r in again)
    Q = qm_from_description(witness)
    sets = _decode_sets(Q, witness["sets"])
    return not PREDICATES[witness["clause"]](Context(Q), **sets)


def _check_description(item: Tuple[str, Dict[str, Any]]) -> List[TheoremReport]:
    name, description = item
    return check_all(qm_from_description(description), name)


def verify_instances(instances: Sequence[Tuple[str, CanonicalQM]], workers: Optional[int] = None) -> List[TheoremReport]:
    """Run check_all on several instances; reports come back in instance order."""
    workers = workers if workers is not None else setting("search", "workers")
    if workers <= 1 or len(instances) <= 1:
        reports = []
        for name, Q in instances:
            reports.extend(check_all(Q, name))
        return reports
    items = [(name, describe_qm(Q)) for name, Q in instances]
    logger.info(f"Verifying {len(items)} instances with {workers} worker processes")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [report for chunk in pool.map(_check_description, items) for report in chunk]


# Worked instances

def _golden_report(theorem: str, instance: str, ok: bool, detail: str, start: float) -> TheoremReport:
    if ok:
        return TheoremReport(theorem, Status.PASS, instance, "exact", time.perf_counter() - start, None, detail)
    logger.error(f"{instance}: {theorem} differs from the reference: {detail}")
    return TheoremReport(theorem, Status.FAIL, instance, "exact", time.perf_counter() - start,
                         {"clause": "golden", "instance": instance}, detail)


def _labelled(Q: CanonicalQM, vectors) -> int:
    return as_mask(Q, [Q.parse_vector(v) for v in vectors])


def _element_mask(Q: CanonicalQM, labels) -> int:
    return mask_of(Q.lattice.element(x) for x in labels)


def _reproduce_ex2() -> List[TheoremReport]:
    reports = []
    start = time.perf_counter()
    Q = golden.product_qm("n5", ["1"])
    L = Q.lattice
    zd, mod = is_0_distributive(L), is_modular(L)
    reports.append(_golden_report("ex2.0-distributive", "ex2", zd.holds and not mod.holds,
                                  f"0-distributive: {zd.holds}, modular: {mod.holds}", start))

    start = time.perf_counter()
    diffs = []
    for x, expected in golden.N5_PERPS.items():
        got = perp(Q, [(L.element(x),)])
        if got != _labelled(Q, [(e,) for e in expected]):
            diffs.append(f"{x}^⊥ = {{{','.join(Q.labels(got))}}}")
    reports.append(_golden_report("ex2.perps", "ex2", not diffs, "; ".join(diffs) or "x^⊥ for x in a,b,c,1", start))

    start = time.perf_counter()
    subs = all_subquasimodules(Q)
    expected = [_labelled(Q, [(e,) for e in s]) for s in golden.N5_SUBQMS]
    reports.append(_golden_report("ex2.subs", "ex2", list(subs.masks) == expected,
                                  f"{len(subs)} subquasimodules", start))

    start = time.perf_counter()
    closed = closed_subquasimodules(Q)
    expected = [_labelled(Q, [(e,) for e in s]) for s in golden.N5_CLOSED]
    ok = list(closed.base.masks) == expected and closed.is_boolean
    reports.append(_golden_report("ex2.closed", "ex2", ok, f"{len(closed)} closed, Boolean: {closed.is_boolean}", start))

    start = time.perf_counter()
    bases = find_bases(SubQM(Q, Q.full), max_size=2)
    one = (L.element("1"),)
    reports.append(_golden_report("ex2.bases", "ex2", any(b.vectors == (one,) for b in bases),
                                  f"{len(bases)} bases of size <= 2", start))
    return reports


def _reproduce_m3() -> List[TheoremReport]:
    reports = []
    start = time.perf_counter()
    Q = golden.product_qm("m3", ["1", "a"])
    L = Q.lattice
    check = is_0_distributive(L)
    expected_witness = tuple(L.element(x) for x in golden.M3_WITNESS)
    ok = not check.holds and check.witness == expected_witness and is_modular(L).holds
    shown = tuple(L.names[x] for x in check.witness) if check.witness else None
    reports.append(_golden_report("m3.0-distributive", "m3", ok, f"witness {shown}", start))

    start = time.perf_counter()
    P = _labelled(Q, golden.M3_P)
    companion = perp(Q, P)
    closure = is_subquasimodule(Q, companion)
    x, y, total = (Q.position(Q.parse_vector(v)) for v in golden.M3_SUM_VIOLATION)
    ok = (
        is_subquasimodule(Q, P).holds
        and companion == _labelled(Q, golden.M3_PERP)
        and not closure.holds
        and closure.violation.kind == "add"
        and closure.violation.operands == (x, y)
        and closure.violation.result == total
        and isinstance(double_perp(Q, companion), RawSubset)
    )
    detail = closure.violation.describe(Q) if closure.violation else "P^⊥ is a subquasimodule"
    reports.append(_golden_report("m3.perp-not-subqm", "m3", ok, detail, start))

    start = time.perf_counter()
    B = _labelled(Q, golden.M3_BASIS)
    diffs = []
    if not (is_basis(SubQM(Q, Q.full), B) and is_orthogonal_set(Q, B)):
        diffs.append("B is not an orthogonal basis")
    for pair, (left, right) in golden.M3_GENERATED.items():
        got = generate(Q, [Q.parse_vector(v) for v in pair]).members
        if got != product_mask(Q, [_element_mask(Q, left), _element_mask(Q, right)]):
            diffs.append(f"⟨{pair}⟩ = {{{','.join(Q.labels(got))}}}")
    reports.append(_golden_report("m3.basis", "m3", not diffs, "; ".join(diffs) or "orthogonal basis of size 3", start))
    return reports


def _reproduce_ex1() -> List[TheoremReport]:
    reports = []
    Q = golden.product_qm("n5", ["1", "a"])
    reference = {_labelled(Q, vectors): name for vectors, name in golden.ex1_reference_names().items()}

    def named(mask: int) -> str:
        return reference.get(mask, "?")

    def node(number: int) -> int:
        return _labelled(Q, golden.EX1_SUBQMS[number - 1])

    start = time.perf_counter()
    subs = all_subquasimodules(Q)
    listed = [mask for mask in subs.masks if named(mask) != golden.EX1_ERRATUM_NAME]
    ok = (
        len(subs) == golden.EX1_SUBQM_COUNT
        and set(subs.masks) == set(reference)
        and listed == [node(k) for k in range(1, len(golden.EX1_SUBQMS) + 1)]
    )
    reports.append(_golden_report("ex1.subs", "ex1", ok,
                                  f"{len(subs)} subquasimodules ({golden.EX1_ERRATUM_NAME} beyond the reference list)",
                                  start))

    start = time.perf_counter()
    expected = golden.ex1_perp_table()
    diffs = []
    for mask in subs.masks:
        name = named(mask)
        got = (named(perp(Q, mask)), named(perp(Q, perp(Q, mask))))
        if got != expected.get(name):
            diffs.append(f"{subs.name_of(mask)} ({name}): {got[0]}, {got[1]}")
    reports.append(_golden_report("ex1.perp-table", "ex1", not diffs,
                                  "; ".join(diffs) or f"{len(subs)} columns match by reference name", start))

    start = time.perf_counter()
    closed = closed_subquasimodules(Q)
    names = [named(mask) for mask in closed.base.masks]
    closed_perp = {names[i]: names[j] for i, j in enumerate(closed.perp_map)}
    ok = (
        names == [f"P{k}" for k in golden.EX1_CLOSED]
        and closed_perp == {f"P{k}": f"P{v}" for k, v in golden.EX1_CLOSED_PERP.items()}
    )
    reports.append(_golden_report("ex1.closed", "ex1", ok, f"L_C(Q) = {{{','.join(names)}}}", start))

    start = time.perf_counter()
    reports.append(_golden_report("ex1.boolean", "ex1", len(closed) == 8 and closed.is_boolean,
                                  f"{len(closed)} nodes, Boolean: {closed.is_boolean}", start))

    start = time.perf_counter()
    whole = SubQM(Q, Q.full)
    found = {b.vectors: b.orthogonal for b in find_bases(whole, max_size=3)}
    diffs = []
    for basis in golden.EX1_BASES:
        vectors = tuple(sorted((Q.parse_vector(v) for v in basis), key=Q.position))
        if not (is_basis(whole, list(vectors)) and found.get(vectors)):
            diffs.append(f"{basis} is not an orthogonal basis")
    for vectors, number in golden.EX1_GENERATED.items():
        got = generate(Q, [Q.parse_vector(v) for v in vectors]).members
        if got != node(number):
            diffs.append(f"⟨{vectors}⟩ is {named(got)}, not P{number}")
    reports.append(_golden_report("ex1.bases", "ex1", not diffs, "; ".join(diffs) or "two orthogonal bases", start))

    start = time.perf_counter()
    splitting = [P.members for P in splitting_subquasimodules(Q)]
    reports.append(_golden_report("ex1.splitting", "ex1", splitting == list(closed.base.masks),
                                  f"{len(splitting)} splitting subquasimodules", start))

    start = time.perf_counter()
    diffs = []
    for number, (left, right) in golden.EX1_FACTORIZATIONS.items():
        witness = factorize_closed(Q, SubQM(Q, node(number)))
        if witness.parts != (_element_mask(Q, left), _element_mask(Q, right)):
            diffs.append(f"P{number} = {witness.describe(Q)}")
    reports.append(_golden_report("ex1.factorization", "ex1", not diffs, "; ".join(diffs) or "P12, P17", start))
    return reports


def _reproduce_fig5() -> List[TheoremReport]:
    reports = []
    Q = golden.product_qm("fig5", ["1", "1"])
    L = Q.lattice

    start = time.perf_counter()
    zd, mod = is_0_distributive(L), is_modular(L)
    reports.append(_golden_report("fig5.properties", "fig5", zd.holds and not mod.holds,
                                  f"0-distributive: {zd.holds}, modular: {mod.holds}", start))

    start = time.perf_counter()
    P = product_mask(Q, [_element_mask(Q, part) for part in golden.FIG5_P])
    expected_perp = product_mask(Q, [_element_mask(Q, part) for part in golden.FIG5_PERP])
    ok = is_subquasimodule(Q, P).holds and is_closed(Q, P) and perp(Q, P) == expected_perp
    reports.append(_golden_report("fig5.closed", "fig5", ok, "P = [0,b]×[0,c] is closed", start))

    start = time.perf_counter()
    missing = Q.position(Q.parse_vector(golden.FIG5_MISSING))
    sums = sum_set(Q, P, perp(Q, P))
    ok = not is_splitting(Q, SubQM(Q, P)) and not sums >> missing & 1
    reports.append(_golden_report("fig5.not-splitting", "fig5", ok,
                                  f"{Q.label(missing)} ∉ P + P^⊥", start))

    start = time.perf_counter()
    F = factor_qm(Q, 0)
    part = lift_elements(F, _element_mask(Q, golden.FIG5_P[0]))
    ok = is_closed(F, part) and not is_splitting(F, SubQM(F, part))
    reports.append(_golden_report("fig5.factor", "fig5", ok, "[0,b] is closed, not splitting in L", start))
    return reports


def _reproduce_n5_power() -> List[TheoremReport]:
    reports = []
    for n, size in golden.N5_POWER_SIZES.items():
        start = time.perf_counter()
        Q = golden.product_qm("n5", ["1"] * n)
        iso = closed_lattice_iso(Q)
        ok = len(iso.closed) == size and iso.closed.is_boolean and iso.verified
        reports.append(_golden_report(f"n5-power.{n}", "n5-power", ok,
                                      f"|L_C(N5^{n})| = {len(iso.closed)}, Boolean: {iso.closed.is_boolean}", start))
    return reports


_REPRODUCERS = {
    "ex2": _reproduce_ex2,
    "m3": _reproduce_m3,
    "ex1": _reproduce_ex1,
    "fig5": _reproduce_fig5,
    "n5-power": _reproduce_n5_power,
}


def reproduce_instance(instance: str) -> List[TheoremReport]:
    """
    Recompute a worked instance and diff it against the stored reference data.

    Args:
        instance (str): One of ex2, m3, ex1, fig5, n5-power.

    Returns:
        List[TheoremReport]: One report per reference fact; any difference fails.

    Raises:
        UnknownInstance: If the name is not known.
    """
    reproducer = _REPRODUCERS.get(instance)
    if reproducer is None:
        raise UnknownInstance(instance, golden.INSTANCES)
    logger.info(f"Reproducing worked instance '{instance}'")
    try:
        return reproducer()
    except QuasiLatError as e:
        logger.error(f"Worked instance '{instance}' raised: {e}")
        return [TheoremReport(f"{instance}.run", Status.FAIL, instance, "exact", 0.0,
                              {"clause": "golden", "instance": instance}, str(e))]
