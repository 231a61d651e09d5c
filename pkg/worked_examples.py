"""
Reference instances and their known results, diffed exactly by
`verify.reproduce_instance` and by the test suite.

Vectors are written with element labels, e.g. ("b", "0") for (b,0).
"""

from typing import Dict, FrozenSet, List, Tuple

from lattice_core import builtin, principal_ideal
from quasimodule import CanonicalQM, canonical

INSTANCES = ("ex2", "m3", "ex1", "fig5", "n5-power")


def product_qm(lattice_name: str, generators: List[str]) -> CanonicalQM:
    """∏ [0, q] over a built-in lattice, one factor per generator label."""
    L = builtin(lattice_name)
    return canonical(L, [principal_ideal(L, L.element(q)) for q in generators])


# N5 as a quasimodule over itself

N5_SUBQMS = [["0"], ["0", "a"], ["0", "b"], ["0", "a", "c"], ["0", "a", "b", "c", "1"]]

N5_PERPS = {
    "a": ["0", "b"],
    "b": ["0", "a", "c"],
    "c": ["0", "b"],
    "1": ["0"],
}

N5_CLOSED = [["0"], ["0", "b"], ["0", "a", "c"], ["0", "a", "b", "c", "1"]]


# N5 x [0,a] over N5

EX1_SUBQMS: List[List[Tuple[str, str]]] = [
    [("0", "0")],
    [("0", "0"), ("0", "a")],
    [("0", "0"), ("a", "0")],
    [("0", "0"), ("a", "a")],
    [("0", "0"), ("b", "0")],
    [("0", "0"), ("0", "a"), ("a", "a")],
    [("0", "0"), ("a", "0"), ("a", "a")],
    [("0", "0"), ("a", "0"), ("c", "0")],
    [("0", "0"), ("a", "a"), ("c", "a")],
    [("0", "0"), ("0", "a"), ("a", "0"), ("a", "a")],
    [("0", "0"), ("0", "a"), ("a", "a"), ("c", "a")],
    [("0", "0"), ("0", "a"), ("b", "0"), ("b", "a")],
    [("0", "0"), ("0", "a"), ("a", "0"), ("a", "a"), ("c", "a")],
    [("0", "0"), ("a", "0"), ("a", "a"), ("c", "0"), ("c", "a")],
    [("0", "0"), ("a", "0"), ("b", "0"), ("c", "0"), ("1", "0")],
    [("0", "0"), ("a", "a"), ("b", "0"), ("c", "a"), ("1", "a")],
    [("0", "0"), ("0", "a"), ("a", "0"), ("a", "a"), ("c", "0"), ("c", "a")],
    [("0", "0"), ("0", "a"), ("a", "a"), ("b", "0"), ("b", "a"), ("c", "a"), ("1", "a")],
    [("0", "0"), ("a", "0"), ("a", "a"), ("b", "0"), ("c", "0"), ("c", "a"), ("1", "0"), ("1", "a")],
    [("0", "0"), ("0", "a"), ("a", "0"), ("a", "a"), ("b", "0"), ("b", "a"),
     ("c", "0"), ("c", "a"), ("1", "0"), ("1", "a")],
]

# Node numbers (1-based) of P^⊥ and P^⊥⊥ for P1..P20.
EX1_PERP = [20, 15, 12, 5, 17, 5, 5, 12, 5, 5, 5, 8, 5, 5, 2, 1, 5, 1, 1, 1]
EX1_DOUBLE_PERP = [1, 2, 8, 17, 5, 17, 17, 8, 17, 17, 17, 12, 17, 17, 15, 20, 17, 20, 20, 20]

# The reference list above misses one subquasimodule. It is closed under
# + and every scalar, and in canonical order it falls between P12 and P13,
# so canonical numbers from P13 on are one higher than the reference names.
EX1_ERRATUM: List[Tuple[str, str]] = [("0", "0"), ("a", "0"), ("a", "a"), ("c", "a")]
EX1_ERRATUM_NAME = "E1"
EX1_ERRATUM_PERP = ("P5", "P17")
EX1_SUBQM_COUNT = len(EX1_SUBQMS) + 1


def ex1_reference_names() -> Dict[FrozenSet[Tuple[str, str]], str]:
    """Reference name of every subquasimodule of N5 x [0,a], keyed by its vector set."""
    names = {frozenset(s): f"P{k}" for k, s in enumerate(EX1_SUBQMS, start=1)}
    names[frozenset(EX1_ERRATUM)] = EX1_ERRATUM_NAME
    return names


def ex1_perp_table() -> Dict[str, Tuple[str, str]]:
    """(P^⊥, P^⊥⊥) by reference name, the erratum included."""
    table = {f"P{k}": (f"P{p}", f"P{d}")
             for k, (p, d) in enumerate(zip(EX1_PERP, EX1_DOUBLE_PERP), start=1)}
    table[EX1_ERRATUM_NAME] = EX1_ERRATUM_PERP
    return table


# Reference names of the closed nodes and their companions.
EX1_CLOSED = [1, 2, 5, 8, 12, 15, 17, 20]
EX1_CLOSED_PERP = {1: 20, 2: 15, 5: 17, 8: 12, 12: 8, 15: 2, 17: 5, 20: 1}

EX1_BASES = [
    [("0", "a"), ("1", "0")],
    [("0", "a"), ("b", "0"), ("c", "0")],
]

# Generated subquasimodules listed alongside the two bases.
EX1_GENERATED: Dict[Tuple[Tuple[str, str], ...], int] = {
    (("0", "a"), ("1", "0")): 20,
    (("0", "a"),): 2,
    (("1", "0"),): 15,
    (("0", "a"), ("b", "0"), ("c", "0")): 20,
    (("0", "a"), ("b", "0")): 12,
    (("0", "a"), ("c", "0")): 8,
    (("b", "0"), ("c", "0")): 15,
}

# Projections of closed nodes onto the two factors.
EX1_FACTORIZATIONS = {
    12: (["0", "b"], ["0", "a"]),
    17: (["0", "a", "c"], ["0", "a"]),
}


# M3 x [0,a] over M3

M3_WITNESS = ("a", "b", "c")
M3_P = [("0", "0"), ("0", "a"), ("a", "0"), ("a", "a")]
M3_PERP = [("0", "0"), ("b", "0"), ("c", "0")]
M3_SUM_VIOLATION = (("b", "0"), ("c", "0"), ("1", "0"))
M3_BASIS = [("0", "a"), ("a", "0"), ("b", "0")]

# ⟨pair⟩ for the two-element subsets of M3_BASIS, as products of element sets.
M3_GENERATED = {
    (("0", "a"), ("a", "0")): (["0", "a"], ["0", "a"]),
    (("0", "a"), ("b", "0")): (["0", "b"], ["0", "a"]),
    (("a", "0"), ("b", "0")): (["0", "a", "b", "c", "1"], ["0"]),
}


# L x L over the six-element lattice

FIG5_P = (["0", "b"], ["0", "a", "c"])
FIG5_PERP = (["0", "a", "c"], ["0", "b"])
FIG5_MISSING = ("1", "1")


# Powers of N5

N5_POWER_SIZES = {1: 4, 2: 16}


