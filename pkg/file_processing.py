"""
Readers and writers for the lattice (.lat) and quasimodule (.qm) text formats.

Lattice file:
    # comment
    elements: 0 a b c 1
    0 <= a
    a <= c
    ...

Quasimodule file:
    lattice: n5.lat            (relative to the .qm file) or builtin:NAME
    factor: principal 1
    factor: set 0 a
"""

import os
import re
from typing import List, Optional, Sequence, Tuple

from exceptions import IndexOutOfRange, ParseError, QuasiLatError
from lattice_core import Ideal, Lattice, build_lattice, builtin, cover_pairs, principal_ideal
from logging_config import logger
from quasimodule import CanonicalQM, canonical
from utilities import mask_of

BUILTIN_PREFIX = "builtin:"

_ORDER_LINE = re.compile(r"^(\S+)\s*<=\s*(\S+)$")


def _content_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line_no, line


def parse_lattice_text(text: str, source: str = "<text>") -> Lattice:
    """Parse the lattice format.

    Args:
        text (str): File content.
        source (str): Name used in error messages.

    Returns:
        Lattice: The validated lattice.

    Raises:
        ParseError: On a malformed line, an unknown label or a missing or
            repeated header.
    """
    names: Optional[Tuple[str, ...]] = None
    pairs: List[Tuple[str, str]] = []
    for line_no, line in _content_lines(text):
        if line.lower().startswith("elements:"):
            if names is not None:
                raise ParseError(source, line_no, "repeated 'elements:' header")
            names = tuple(line.split(":", 1)[1].split())
            if not names:
                raise ParseError(source, line_no, "empty element list")
            continue
        match = _ORDER_LINE.match(line)
        if match is None:
            raise ParseError(source, line_no, f"expected 'x <= y', got '{line}'")
        if names is None:
            raise ParseError(source, line_no, "order pair before the 'elements:' header")
        for label in match.groups():
            if label not in names:
                raise ParseError(source, line_no, f"unknown element '{label}'")
        pairs.append((match.group(1), match.group(2)))
    if names is None:
        raise ParseError(source, 0, "missing 'elements:' header")
    return build_lattice(names, pairs)


def dump_lattice(L: Lattice) -> str:
    """Lattice text with the cover pairs in index order."""
    lines = ["elements: " + " ".join(L.names)]
    lines.extend(f"{L.names[x]} <= {L.names[y]}" for x, y in cover_pairs(L))
    return "\n".join(lines) + "\n"


def read_text_file(file_path: str) -> str:
    """Reads a UTF-8 text file.

    Raises:
        FileNotFoundError: If the specified file does not exist.
        OSError: If the file cannot be read.
    """
    if not os.path.isfile(file_path):
        raise FileNotFoundError(f"The specified file does not exist: {file_path}")
    try:
        with open(file_path, 'r', encoding='utf-8') as file:
            return file.read()
    except Exception as e:
        logger.error(f"Error reading file: '{file_path}'. Error: {e}")
        raise OSError(f"Failed to read file: '{file_path}'.") from e


def read_lattice_file(path: str) -> Lattice:
    """Load a lattice from a .lat file or a builtin:NAME reference."""
    if path.startswith(BUILTIN_PREFIX):
        return builtin(path[len(BUILTIN_PREFIX):])
    logger.info(f"Reading lattice file: '{path}'")
    return parse_lattice_text(read_text_file(path), source=path)


def _parse_factor(L: Lattice, words: Sequence[str], source: str, line_no: int) -> Ideal:
    if not words:
        raise ParseError(source, line_no, "empty factor line")
    kind, labels = words[0].lower(), words[1:]
    try:
        elements = [L.element(label) for label in labels]
    except IndexOutOfRange as e:
        raise ParseError(source, line_no, str(e)) from e
    if kind == "principal":
        if len(elements) != 1:
            raise ParseError(source, line_no, "'principal' takes exactly one element")
        return principal_ideal(L, elements[0])
    if kind == "set":
        if not elements:
            raise ParseError(source, line_no, "'set' needs at least one element")
        return Ideal(L, mask_of(elements))
    raise ParseError(source, line_no, f"unknown factor kind '{words[0]}'")


def parse_qm_text(text: str, source: str = "<text>", base_dir: str = ".") -> CanonicalQM:
    """Parse the quasimodule format and build the canonical quasimodule.

    Args:
        text (str): File content.
        source (str): Name used in error messages.
        base_dir (str): Directory that relative lattice paths are resolved against.

    Returns:
        CanonicalQM: The quasimodule.

    Raises:
        ParseError: On malformed lines, a missing lattice line or no factors.
        FactorNotIdeal, CarrierTooLarge: From the construction.
    """
    L: Optional[Lattice] = None
    factors: List[Ideal] = []
    for line_no, line in _content_lines(text):
        key, sep, value = line.partition(":")
        key = key.strip().lower()
        if not sep:
            raise ParseError(source, line_no, f"expected 'key: value', got '{line}'")
        if key == "lattice":
            if L is not None:
                raise ParseError(source, line_no, "repeated 'lattice:' line")
            ref = value.strip()
            if not ref.startswith(BUILTIN_PREFIX):
                ref = os.path.join(base_dir, ref)
            try:
                L = read_lattice_file(ref)
            except (QuasiLatError, FileNotFoundError) as e:
                logger.error(f"{source}:{line_no}: cannot load lattice '{ref}': {e}")
                raise
        elif key == "factor":
            if L is None:
                raise ParseError(source, line_no, "factor before the 'lattice:' line")
            factors.append(_parse_factor(L, value.split(), source, line_no))
        else:
            raise ParseError(source, line_no, f"unknown key '{key}'")
    if L is None:
        raise ParseError(source, 0, "missing 'lattice:' line")
    if not factors:
        raise ParseError(source, 0, "no 'factor:' lines")
    return canonical(L, factors)


def read_qm_file(path: str) -> CanonicalQM:
    """Load a quasimodule from a .qm file."""
    logger.info(f"Reading quasimodule file: '{path}'")
    text = read_text_file(path)
    return parse_qm_text(text, source=path, base_dir=os.path.dirname(os.path.abspath(path)))


def dump_qm(Q: CanonicalQM, lattice_ref: str) -> str:
    """Quasimodule text; principal factors are written as 'principal q'."""
    lines = [f"lattice: {lattice_ref}"]
    for factor in Q.factors:
        q = factor.generator
        if q is not None:
            lines.append(f"factor: principal {Q.lattice.names[q]}")
        else:
            lines.append("factor: set " + " ".join(Q.lattice.names[e] for e in factor.elements()))
    return "\n".join(lines) + "\n"


def read_any(path: str):
    """Dispatch on the file extension, as the data folder loader does."""
    if path.startswith(BUILTIN_PREFIX) or path.lower().endswith('.lat'):
        return read_lattice_file(path)
    if path.lower().endswith('.qm'):
        return read_qm_file(path)
    logger.warning(f"Unsupported file type: {path}")
    raise ParseError(path, 0, "unsupported file type (expected .lat or .qm)")


def load_data_folder(data_folder: str) -> List[Tuple[str, object]]:
    """Load every .lat and .qm file of a folder, skipping the ones that fail."""
    if not os.path.exists(data_folder):
        logger.error(f"Data folder does not exist: {data_folder}")
        return []
    loaded = []
    for filename in sorted(os.listdir(data_folder)):
        file_path = os.path.join(data_folder, filename)
        if not filename.lower().endswith(('.lat', '.qm')):
            logger.warning(f"Unsupported file type: {filename}")
            continue
        try:
            loaded.append((filename, read_any(file_path)))
        except (QuasiLatError, OSError) as e:
            logger.error(f"Error processing {filename}: {e}")
    logger.info(f"Loaded {len(loaded)} files from '{data_folder}'.")
    return loaded
