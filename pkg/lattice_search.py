"""
Counterexample search over small bounded lattices.

Lattices are enumerated exhaustively up to `search.exhaustive_lattice_size`
elements (every partial order on the middle elements, up to isomorphism) and
sampled with a seeded generator beyond that. Each lattice yields canonical
quasimodules with one or two principal factors; each quasimodule is searched
for a violation of the requested clause, and every finding is shrunk by
greedy element and factor removal while the violation persists.
"""

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, permutations
import string
import time
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from exceptions import CarrierTooLarge, EnumerationBudgetExceeded, NotZeroDistributive, QuasiLatError
from galois import factors_0_distributive
from lattice_core import Lattice, lattice_from_order, principal_ideal
from logging_config import logger
from quasimodule import CanonicalQM, canonical
from utilities import popcount, setting
from verify import (
    PREDICATES,
    Context,
    SearchConfig,
    Status,
    TheoremReport,
    make_witness,
    verify_instances,
    violation_detail,
)

HYPOTHESES = ("0-distributive",)


class SearchTarget(NamedTuple):
    clause: str
    family: str
    assumes_0_distributive: bool
    # Findings are reported as counterexamples, never as failures.
    expected: bool = False


TARGETS: Dict[str, SearchTarget] = {
    "prop2": SearchTarget("prop2", "singletons", True),
    "th2.vi": SearchTarget("th2.vi", "small_subsets", True),
    "split.perp": SearchTarget("split.perp", "subqms", True),
    "closed-not-splitting": SearchTarget("search.closed-splits", "closed", False, expected=True),
}
SOUNDNESS = "soundness"

_MIDDLE_LABELS = string.ascii_lowercase


@dataclass(frozen=True)
class Candidate:
    """A lattice with the generators q of the factors [0, q]."""
    name: str
    lattice: Lattice
    generators: Tuple[int, ...]

    @property
    def label(self) -> str:
        names = self.lattice.names
        return f"{self.name}[{','.join(names[q] for q in self.generators)}]"

    def qm(self, max_carrier: Optional[int] = None) -> CanonicalQM:
        L = self.lattice
        return canonical(L, [principal_ideal(L, q) for q in self.generators], max_carrier=max_carrier)


def _middle(L: Lattice) -> List[int]:
    return [x for x in range(L.n) if x not in (L.bottom, L.top)]


def canonical_order(L: Lattice) -> Tuple[bytes, Tuple[int, ...]]:
    """
    Isomorphism-invariant key of a lattice and the element order realising it.

    The key is the smallest order matrix over all orderings bottom, middle
    permutation, top. Lattices with more than eight middle elements keep
    their own order.
    """
    middle = _middle(L)
    if len(middle) > 8:
        order = tuple([L.bottom] + middle + [L.top])
        return L.leq[np.ix_(order, order)].tobytes(), order
    best = None
    for perm in permutations(middle):
        order = (L.bottom,) + perm + (L.top,)
        key = L.leq[np.ix_(order, order)].tobytes()
        if best is None or key < best[0]:
            best = (key, order)
    return best


def relabel(L: Lattice, order: Tuple[int, ...]) -> Tuple[Lattice, Dict[int, int]]:
    """Rebuild L along `order` with labels 0, a, b, ..., 1 and return the index map."""
    leq = L.leq[np.ix_(order, order)]
    return lattice_from_order(_labels(len(order)), leq), {old: new for new, old in enumerate(order)}


def _natural_orders(k: int) -> Iterator[np.ndarray]:
    """Transitively closed relations on 0..k-1 using only pairs i < j."""
    pairs = list(combinations(range(k), 2))
    for chosen in range(1 << len(pairs)):
        rel = np.eye(k, dtype=bool)
        for bit, (i, j) in enumerate(pairs):
            if chosen >> bit & 1:
                rel[i, j] = True
        if np.array_equal((rel.astype(np.int64) @ rel.astype(np.int64)) > 0, rel):
            yield rel


def _bounded(middle: np.ndarray) -> np.ndarray:
    k = middle.shape[0]
    leq = np.eye(k + 2, dtype=bool)
    leq[0, :] = True
    leq[:, k + 1] = True
    leq[1:k + 1, 1:k + 1] = middle
    return leq


def _labels(n: int) -> List[str]:
    return ["0"] + list(_MIDDLE_LABELS[:n - 2]) + ["1"]


def exhaustive_lattices(size: int) -> List[Lattice]:
    """Every lattice with `size` >= 2 elements up to isomorphism, canonically labelled."""
    found: Dict[bytes, Lattice] = {}
    for middle in _natural_orders(size - 2):
        try:
            L = lattice_from_order(_labels(size), _bounded(middle))
        except QuasiLatError:
            continue
        key, order = canonical_order(L)
        if key not in found:
            found[key] = relabel(L, order)[0]
    logger.debug(f"{len(found)} lattices with {size} elements")
    return [found[key] for key in sorted(found)]


def random_lattices(size: int, count: int, rng: np.random.Generator) -> List[Lattice]:
    """
    Sample lattices by random covers on a shelled element order.

    Element j is put above one random earlier middle element with probability
    0.8 and above each other earlier one with probability 0.2; bottom and top
    are added, and samples that are not lattices are discarded.
    """
    found: Dict[bytes, Lattice] = {}
    for _ in range(count):
        rel = np.eye(size, dtype=bool)
        rel[0, :] = True
        rel[:, size - 1] = True
        for j in range(2, size - 1):
            rel[int(rng.integers(1, j)), j] = rng.random() < 0.8
            extra = rng.random(j - 1) < 0.2
            rel[1:j, j] |= extra
        try:
            L = lattice_from_order(_labels(size), rel)
        except QuasiLatError:
            continue
        key, order = canonical_order(L)
        if key not in found:
            found[key] = relabel(L, order)[0]
    return [found[key] for key in sorted(found)]


def candidate_lattices(cfg: SearchConfig) -> List[Tuple[str, Lattice]]:
    exhaustive = min(cfg.max_lattice_size, setting("search", "exhaustive_lattice_size"))
    named = []
    for size in range(2, exhaustive + 1):
        named.extend((f"L{size}.{k + 1}", L) for k, L in enumerate(exhaustive_lattices(size)))
    rng = np.random.default_rng(cfg.seed)
    for size in range(exhaustive + 1, cfg.max_lattice_size + 1):
        sampled = random_lattices(size, setting("search", "random_lattices"), rng)
        named.extend((f"R{size}.{k + 1}", L) for k, L in enumerate(sampled))
    logger.info(
        f"{len(named)} candidate lattices of 2..{cfg.max_lattice_size} elements "
        f"(exhaustive up to {exhaustive}, seed {cfg.seed})"
    )
    return named


def candidates(cfg: SearchConfig) -> List[Candidate]:
    """One- and two-factor principal instances whose carrier fits cfg.max_carrier."""
    found = []
    for name, L in candidate_lattices(cfg):
        generators = [q for q in range(L.n) if q != L.bottom]
        sizes = {q: popcount(L.down_masks[q]) for q in generators}
        for arity in range(1, cfg.max_factors + 1):
            for combo in combinations_with_replacement(generators, arity):
                if int(np.prod([sizes[q] for q in combo])) <= cfg.max_carrier:
                    found.append(Candidate(name, L, combo))
    return found


def find_violation(Q: CanonicalQM, clause: str, family: str, seed: int) -> Optional[Dict[str, Any]]:
    """The first subsets of `family` on which `clause` fails, or None."""
    ctx = Context(Q, seed)
    predicate = PREDICATES[clause]
    try:
        cases, _ = ctx.family(family)
        for sets in cases:
            if not predicate(ctx, **sets):
                return sets
    except NotZeroDistributive:
        return None
    except (EnumerationBudgetExceeded, CarrierTooLarge) as e:
        logger.warning(f"Skipped a {Q.size}-vector instance: {e}")
    return None


def _reductions(candidate: Candidate) -> Iterator[Candidate]:
    if len(candidate.generators) > 1:
        for k in range(len(candidate.generators)):
            yield Candidate(candidate.name, candidate.lattice, candidate.generators[:k] + candidate.generators[k + 1:])
    L = candidate.lattice
    for e in _middle(L):
        if e in candidate.generators:
            continue
        keep = [x for x in range(L.n) if x != e]
        try:
            reduced = lattice_from_order([L.names[x] for x in keep], L.leq[np.ix_(keep, keep)])
        except QuasiLatError:
            continue
        position = {x: i for i, x in enumerate(keep)}
        yield Candidate(candidate.name, reduced, tuple(position[q] for q in candidate.generators))


def minimize(candidate: Candidate, clause: str, family: str, seed: int,
             sets: Dict[str, Any]) -> Tuple[Candidate, Dict[str, Any]]:
    """Greedily drop factors and lattice elements while the violation persists."""
    current = candidate
    shrunk = True
    while shrunk:
        shrunk = False
        for reduced in _reductions(current):
            try:
                Q = reduced.qm()
            except QuasiLatError:
                continue
            found = find_violation(Q, clause, family, seed)
            if found is not None:
                current, sets, shrunk = reduced, found, True
                break
    _, order = canonical_order(current.lattice)
    relabelled, index = relabel(current.lattice, order)
    result = Candidate(f"{candidate.name}/min", relabelled, tuple(index[q] for q in current.generators))
    # The sets are carrier positions, so they are searched again on the relabelled copy.
    found = find_violation(result.qm(), clause, family, seed)
    if found is None:
        return Candidate(result.name, current.lattice, current.generators), sets
    return result, found


def _search_target(cfg: SearchConfig, target: str, pool: List[Candidate], scope: str) -> List[TheoremReport]:
    goal = TARGETS[target]
    clause, family = goal.clause, goal.family
    dropped = goal.assumes_0_distributive and "0-distributive" in cfg.drop_hypotheses
    reports: List[TheoremReport] = []
    seen = set()
    for candidate in pool:
        start = time.perf_counter()
        Q = candidate.qm()
        # A dropped hypothesis is searched only where it fails.
        if (factors_0_distributive(Q) is None) == dropped:
            continue
        sets = find_violation(Q, clause, family, cfg.seed)
        if sets is None:
            continue
        small, sets = minimize(candidate, clause, family, cfg.seed, sets)
        key = (canonical_order(small.lattice)[0], small.generators)
        if key in seen:
            continue
        seen.add(key)
        Q = small.qm()
        detail = violation_detail(Context(Q, cfg.seed), clause, sets)
        if dropped or goal.expected:
            status = Status.COUNTEREXAMPLE
            logger.info(f"{target}: counterexample on {small.label} (from {candidate.label}): {detail}")
        else:
            status = Status.FAIL
            logger.error(f"{small.label}: {clause} fails with its hypotheses met: {detail}")
        witness = make_witness(Q, clause, sets, violation=detail, found_in=candidate.label)
        reports.append(TheoremReport(target, status, small.label, scope,
                                     time.perf_counter() - start, witness, detail))
    return reports


def counterexample_search(cfg: SearchConfig) -> List[TheoremReport]:
    """
    Search small lattices for violations of the requested targets.

    Args:
        cfg (SearchConfig): Lattice size, factor and carrier limits, seed,
            dropped hypotheses and targets (see SearchConfig.effective_targets).

    Returns:
        List[TheoremReport]: One report per distinct minimised finding; an
        empty list means nothing was found within the limits. Violations of a
        clause whose hypothesis was deliberately dropped, and closed but not
        splitting instances, are counterexamples; anything else is a failure.

    Raises:
        ValueError: On non-positive limits, an unknown hypothesis or target.
    """
    if cfg.max_lattice_size < 2 or cfg.max_factors < 1 or cfg.max_carrier < 1:
        raise ValueError("Search limits must be positive (lattice size >= 2).")
    for hypothesis in cfg.drop_hypotheses:
        if hypothesis not in HYPOTHESES:
            raise ValueError(f"Unknown hypothesis '{hypothesis}'; known: {', '.join(HYPOTHESES)}")
    targets = cfg.effective_targets
    for target in targets:
        if target not in TARGETS and target != SOUNDNESS:
            raise ValueError(f"Unknown search target '{target}'; known: {', '.join([*TARGETS, SOUNDNESS])}")

    pool = candidates(cfg)
    scope = (f"{len(pool)} instances on lattices of <= {cfg.max_lattice_size} elements, "
             f"<= {cfg.max_factors} factors, carrier <= {cfg.max_carrier}, seed {cfg.seed}")
    logger.info(f"Searching {', '.join(targets)} over {scope}")

    reports: List[TheoremReport] = []
    for target in targets:
        if target == SOUNDNESS:
            instances = [(c.label, c.qm()) for c in pool]
            reports.extend(r for r in verify_instances(instances) if r.failed)
        else:
            reports.extend(_search_target(cfg, target, pool, scope))
    logger.info(f"Search finished with {len(reports)} findings")
    return reports
