"""
Text output: pandas tables for the CLI, the P / P^⊥ / P^⊥⊥ table, the CSV
theorem report and Hasse diagrams in DOT.
"""

import os
from typing import Callable, List, Optional, Sequence

import networkx as nx
import numpy as np
import pandas as pd
import pydot

from lattice_core import Lattice, check_lattice_laws, is_0_distributive, is_boolean, is_distributive, is_modular
from logging_config import logger
from quasimodule import CanonicalQM
from subquasi import Basis, SubQM, SubQMLattice
from verify import REPORT_COLUMNS, TheoremReport

PERP_BLOCK = 10


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def _witness(L: Lattice, witness) -> str:
    if not witness:
        return ""
    return "(" + ",".join(L.names[x] for x in witness) + ")"


def lattice_check_table(L: Lattice) -> pd.DataFrame:
    """Lattice laws and the order properties, each with its smallest witness."""
    laws = check_lattice_laws(L)
    broken = next((law for law, check in laws.items() if not check.holds), None)
    rows = [("lattice", broken is None, "" if broken is None else broken)]
    for name, check in (
        ("0-distributive", is_0_distributive(L)),
        ("modular", is_modular(L)),
        ("distributive", is_distributive(L)),
    ):
        rows.append((name, check.holds, _witness(L, check.witness)))
    rows.append(("Boolean", is_boolean(L), ""))
    return pd.DataFrame(
        [(name, _yes_no(holds), witness) for name, holds, witness in rows],
        columns=["property", "holds", "witness"],
    )


def format_lattice_check(L: Lattice) -> str:
    header = (
        f"elements: {' '.join(L.names)}\n"
        f"bottom: {L.names[L.bottom]}, top: {L.names[L.top]}\n"
    )
    return header + lattice_check_table(L).to_string(index=False) + "\n"


def members_text(Q: CanonicalQM, mask: int) -> str:
    return "{" + ", ".join(Q.labels(mask)) + "}"


def subqm_table(family: SubQMLattice, names: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """One row per node: name, size, members."""
    Q = family.qm
    names = list(names) if names is not None else family.names
    return pd.DataFrame(
        {
            "name": names,
            "size": [node.size for node in family.nodes],
            "members": [members_text(Q, mask) for mask in family.masks],
        }
    )


def nodes_table(Q: CanonicalQM, nodes: Sequence[SubQM], namer: Callable[[int], Optional[str]],
                perp_of: Optional[Callable[[int], int]] = None) -> pd.DataFrame:
    """Rows for an arbitrary list of subquasimodules named through `namer`, optionally with P^⊥."""
    data = {
        "name": [namer(P.members) or "-" for P in nodes],
        "size": [P.size for P in nodes],
        "members": [members_text(Q, P.members) for P in nodes],
    }
    if perp_of is not None:
        data["perp"] = [namer(perp_of(P.members)) or members_text(Q, perp_of(P.members)) for P in nodes]
    return pd.DataFrame(data)


def bases_table(bases: Sequence[Basis], Q: CanonicalQM) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "size": [len(b.vectors) for b in bases],
            "basis": ["{" + ", ".join(Q.label(v) for v in b.vectors) + "}" for b in bases],
            "orthogonal": [_yes_no(b.orthogonal) for b in bases],
        },
        columns=["size", "basis", "orthogonal"],
    )


def perp_table(family: SubQMLattice, perp: Callable[[int], int], columns: Optional[Sequence[int]] = None,
               block: int = PERP_BLOCK) -> str:
    """
    The three-row table P / P^⊥ / P^⊥⊥ in blocks of `block` columns.

    Args:
        family (SubQMLattice): Supplies the column names P1..Pk.
        perp (Callable[[int], int]): Bitset to its orthogonal companion.
        columns (Sequence[int], optional): Node indices to show; all by default.
        block (int): Columns per block.

    Returns:
        str: The blocks separated by blank lines. Sets that are not nodes of
        the family are printed as braces with their members.
    """
    Q = family.qm
    columns = list(range(len(family))) if columns is None else list(columns)

    def cell(mask: int) -> str:
        return family.name_of(mask) or members_text(Q, mask)

    blocks = []
    for start in range(0, len(columns), block):
        chunk = columns[start:start + block]
        frame = pd.DataFrame(
            [
                [family.name(i) for i in chunk],
                [cell(perp(family.masks[i])) for i in chunk],
                [cell(perp(perp(family.masks[i]))) for i in chunk],
            ],
            index=["P", "P^⊥", "P^⊥⊥"],
        )
        blocks.append(frame.to_string(header=False))
    return "\n\n".join(blocks) + "\n"


def reports_frame(reports: Sequence[TheoremReport]) -> pd.DataFrame:
    return pd.DataFrame([r.to_record() for r in reports], columns=REPORT_COLUMNS)


def reports_table(reports: Sequence[TheoremReport]) -> str:
    """Human-readable report; timings and witnesses stay out of standard output."""
    if not reports:
        return "no findings\n"
    frame = reports_frame(reports).drop(columns=["seconds", "witness"])
    return frame.to_string(index=False) + "\n"


def write_report(reports: Sequence[TheoremReport], output_path: str) -> str:
    """
    Write the structured report as CSV.

    Raises:
        OSError: If the file cannot be written.
    """
    folder = os.path.dirname(output_path)
    try:
        if folder:
            os.makedirs(folder, exist_ok=True)
        reports_frame(reports).to_csv(output_path, index=False)
    except Exception as e:
        logger.error(f"Error writing report: '{output_path}'. Error: {e}")
        raise OSError(f"Failed to write report: '{output_path}'.") from e
    logger.info(f"Wrote {len(reports)} report rows to '{output_path}'")
    return output_path


def structured(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False)


def hasse_graph(names: Sequence[str], leq: np.ndarray) -> nx.DiGraph:
    """Cover relation of an order matrix as a DiGraph on node indices."""
    graph = nx.DiGraph()
    graph.add_nodes_from((i, {"label": name}) for i, name in enumerate(names))
    k = len(names)
    graph.add_edges_from((i, j) for i in range(k) for j in range(k) if i != j and leq[i, j])
    reduced = nx.transitive_reduction(graph)
    reduced.add_nodes_from(graph.nodes(data=True))
    return reduced


def hasse_dot(names: Sequence[str], leq: np.ndarray) -> str:
    """DOT text of the Hasse diagram, bottom up, nodes and edges in index order."""
    graph = hasse_graph(names, leq)
    dot = pydot.Dot("hasse", graph_type="digraph", rankdir="BT")
    for i in sorted(graph.nodes):
        dot.add_node(pydot.Node(f"n{i}", label=graph.nodes[i]["label"]))
    for i, j in sorted(graph.edges):
        dot.add_edge(pydot.Edge(f"n{i}", f"n{j}"))
    return dot.to_string()


def lattice_dot(L: Lattice) -> str:
    return hasse_dot(L.names, L.leq)


def family_dot(family: SubQMLattice, names: Optional[List[str]] = None) -> str:
    return hasse_dot(names if names is not None else family.names, family.leq)
