import pandas as pd

from galois import closed_subquasimodules, perp
from rendering import (
    family_dot,
    format_lattice_check,
    hasse_graph,
    lattice_check_table,
    lattice_dot,
    perp_table,
    reports_table,
    subqm_table,
    write_report,
)
from subquasi import all_subquasimodules
from verify import REPORT_COLUMNS, Status, TheoremReport


def test_lattice_check_table(n5, m3):
    table = lattice_check_table(n5).set_index("property")["holds"].to_dict()
    assert table == {"lattice": "yes", "0-distributive": "yes", "modular": "no",
                     "distributive": "no", "Boolean": "no"}
    m3_rows = lattice_check_table(m3).set_index("property")
    assert m3_rows.loc["0-distributive", "witness"] == "(a,b,c)"


def test_format_lattice_check_header(fig5):
    text = format_lattice_check(fig5)
    assert text.startswith("elements: 0 a b c d 1\nbottom: 0, top: 1\n")


def test_subqm_table(ex1_qm):
    table = subqm_table(all_subquasimodules(ex1_qm))
    assert list(table.columns) == ["name", "size", "members"]
    assert table.iloc[0].tolist() == ["P1", 1, "{(0,0)}"]
    assert table.iloc[-1]["size"] == 10


def test_perp_table_blocks(ex1_qm):
    subs = all_subquasimodules(ex1_qm)
    text = perp_table(subs, lambda mask: perp(ex1_qm, mask))
    blocks = text.rstrip("\n").split("\n\n")
    assert len(blocks) == 3
    first = blocks[0].splitlines()
    assert first[0].split()[:3] == ["P", "P1", "P2"]
    assert first[1].split()[:3] == ["P^⊥", "P21", "P16"]
    assert first[2].split()[:3] == ["P^⊥⊥", "P1", "P2"]


def test_hasse_diagrams(n5, ex1_qm):
    assert hasse_graph(n5.names, n5.leq).number_of_edges() == 5
    dot = lattice_dot(n5)
    assert "rankdir=BT" in dot
    assert dot.count("->") == 5
    closed = closed_subquasimodules(ex1_qm)
    assert family_dot(closed.base).count("->") == 12


def test_reports_table_hides_timings():
    reports = [TheoremReport("prop2", Status.PASS, "ex1", "all 1024 subsets", 0.25, None, "A^⊥ is a subquasimodule")]
    text = reports_table(reports)
    assert "prop2" in text and "0.25" not in text
    assert reports_table([]) == "no findings\n"


def test_write_report(tmp_path):
    reports = [
        TheoremReport("prop2", Status.HYPOTHESIS_NOT_MET, "m3", "all subsets", 0.1, {"clause": "prop2"}, "x"),
        TheoremReport("th1", Status.PASS, "m3", "exhaustive", 0.0, None, "standard basis"),
    ]
    path = write_report(reports, str(tmp_path / "out" / "report.csv"))
    frame = pd.read_csv(path, keep_default_na=False)
    assert list(frame.columns) == REPORT_COLUMNS
    assert frame["status"].tolist() == ["hypothesis-not-met", "pass"]
    assert frame["witness"].tolist() == ['{"clause": "prop2"}', ""]
