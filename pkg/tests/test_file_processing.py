import os

import pytest

from exceptions import NotALattice, ParseError
from file_processing import (
    dump_lattice,
    dump_qm,
    load_data_folder,
    parse_lattice_text,
    parse_qm_text,
    read_any,
    read_lattice_file,
    read_qm_file,
)
from lattice_core import Lattice, builtin
from quasimodule import CanonicalQM


def test_read_lattice_file_matches_the_builtin(data_dir):
    L = read_lattice_file(os.path.join(data_dir, "n5.lat"))
    assert L == builtin("n5")


def test_builtin_reference():
    assert read_lattice_file("builtin:m3") == builtin("m3")


def test_dumped_lattice_parses_back(fig5):
    assert parse_lattice_text(dump_lattice(fig5)) == fig5


def test_read_qm_file_resolves_the_lattice_next_to_it(data_dir, ex1_qm):
    Q = read_qm_file(os.path.join(data_dir, "ex1.qm"))
    assert Q.size == 10
    assert Q.carrier == ex1_qm.carrier


def test_dump_qm_writes_principal_factors(ex1_qm):
    text = dump_qm(ex1_qm, "builtin:n5")
    assert text.splitlines() == ["lattice: builtin:n5", "factor: principal 1", "factor: principal a"]
    assert parse_qm_text(text).size == 10


def test_set_factor():
    Q = parse_qm_text("lattice: builtin:n5\nfactor: set 0 a c\n")
    assert Q.size == 3


@pytest.mark.parametrize("text, line_no", [
    ("elements: 0 1\n0 < 1\n", 2),
    ("0 <= 1\n", 1),
    ("elements: 0 1\n0 <= 2\n", 2),
    ("elements: 0 1\nelements: 0 1\n", 2),
    ("# nothing\n", 0),
])
def test_lattice_parse_errors_carry_line_numbers(text, line_no):
    with pytest.raises(ParseError) as info:
        parse_lattice_text(text, source="bad.lat")
    assert info.value.line_no == line_no
    assert str(info.value).startswith(f"bad.lat:{line_no}:")


@pytest.mark.parametrize("text, line_no", [
    ("factor: principal 1\n", 1),
    ("lattice: builtin:n5\nfactor: principal a b\n", 2),
    ("lattice: builtin:n5\nfactor: cone 1\n", 2),
    ("lattice: builtin:n5\nfactor: principal z\n", 2),
    ("lattice: builtin:n5\ncolour: red\n", 2),
    ("lattice: builtin:n5\n", 0),
])
def test_qm_parse_errors(text, line_no):
    with pytest.raises(ParseError) as info:
        parse_qm_text(text)
    assert info.value.line_no == line_no


def test_non_lattice_order_is_rejected():
    text = "elements: 0 a b c d 1\n0 <= a\n0 <= b\na <= c\na <= d\nb <= c\nb <= d\nc <= 1\nd <= 1\n"
    with pytest.raises(NotALattice):
        parse_lattice_text(text)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_qm_file(str(tmp_path / "absent.qm"))


def test_unsupported_extension(tmp_path):
    path = tmp_path / "notes.txt"
    path.write_text("elements: 0 1\n")
    with pytest.raises(ParseError):
        read_any(str(path))


def test_load_data_folder(data_dir):
    loaded = dict(load_data_folder(data_dir))
    assert len(loaded) == 9
    assert isinstance(loaded["chain3.lat"], Lattice)
    assert isinstance(loaded["trivial.qm"], CanonicalQM)
    assert loaded["trivial.qm"].size == 1


def test_load_data_folder_skips_bad_files(tmp_path):
    (tmp_path / "good.lat").write_text("elements: 0 1\n0 <= 1\n")
    (tmp_path / "bad.lat").write_text("elements: 0 1\n0 << 1\n")
    (tmp_path / "readme.md").write_text("notes\n")
    assert [name for name, _ in load_data_folder(str(tmp_path))] == ["good.lat"]


def test_missing_data_folder(tmp_path):
    assert load_data_folder(str(tmp_path / "nowhere")) == []
