import argparse
import json
import os
import sys
from typing import Callable, List, Optional

from dotenv import load_dotenv

from exceptions import EnumerationBudgetExceeded, QuasiLatError
from file_processing import load_data_folder, read_any, read_lattice_file, read_qm_file
from galois import ClosedLattice, closed_subquasimodules, is_closed, perp, splitting_subquasimodules
from lattice_core import Lattice
from lattice_search import counterexample_search
from logging_config import logger, set_log_level
from quasimodule import CanonicalQM
from rendering import (
    bases_table,
    family_dot,
    format_lattice_check,
    lattice_dot,
    nodes_table,
    perp_table,
    reports_frame,
    reports_table,
    structured,
    subqm_table,
    write_report,
)
from subquasi import SubQM, all_subquasimodules, find_bases
import utilities
from utilities import DEFAULTS, setting
from verify import SearchConfig, Status, TheoremReport, check_all, reproduce_instance, verify_instances
import worked_examples

# Load environment variables
load_dotenv()

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2

QM_ACTIONS = ("subs", "closed", "splitting", "perp-table", "bases", "verify")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasilat",
        description="Finite lattices, canonical quasimodules and their closed subquasimodules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    lattice = sub.add_parser("lattice", help="Lattice checks")
    lattice_sub = lattice.add_subparsers(dest="action", required=True)
    check = lattice_sub.add_parser("check", help="Validate a lattice and report its properties")
    check.add_argument("file", help="A .lat file or builtin:NAME")

    qm = sub.add_parser("qm", help="Quasimodule computations")
    qm.add_argument("action", choices=QM_ACTIONS)
    qm.add_argument("file", help="A .qm file")
    qm.add_argument("--max-basis-size", type=int, default=None)
    qm.add_argument("--budget", type=int, default=None, help="Enumeration budget")
    qm.add_argument("--format", choices=("table", "structured"), default="table")
    qm.add_argument("--closed", action="store_true", help="perp-table: only closed columns")

    export = sub.add_parser("export", help="Export diagrams")
    export_sub = export.add_subparsers(dest="action", required=True)
    dot = export_sub.add_parser("dot", help="Hasse diagram in DOT")
    dot.add_argument("file", help="A .lat, .qm file or builtin:NAME")
    dot.add_argument("--which", choices=("lattice", "subs", "closed"), default="lattice")
    dot.add_argument("-o", "--output", default=None)
    dot.add_argument("--budget", type=int, default=None)

    verify = sub.add_parser("verify", help="Theorem verification and counterexample search")
    mode = verify.add_mutually_exclusive_group()
    mode.add_argument("--instance", choices=worked_examples.INSTANCES + ("all",), default=None)
    mode.add_argument("--search", action="store_true")
    verify.add_argument("--max-size", type=int, default=None, help="Largest lattice in the search")
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--drop", action="append", default=[], help="Hypothesis to drop, e.g. 0-distributive")
    verify.add_argument("--find", action="append", default=[], help="Search target, e.g. closed-not-splitting")
    verify.add_argument("--workers", type=int, default=None)
    verify.add_argument("--format", choices=("table", "structured"), default="table")
    verify.add_argument("--report", default=None, help="CSV report path")
    return parser


def apply_overrides(args: argparse.Namespace) -> None:
    utilities.override("limits", "enumeration_budget", getattr(args, "budget", None))
    utilities.override("bases", "max_size", getattr(args, "max_basis_size", None))
    utilities.override("verify", "seed", getattr(args, "seed", None))
    utilities.override("search", "max_lattice_size", getattr(args, "max_size", None))
    utilities.override("search", "workers", getattr(args, "workers", None))


def effective_config() -> dict:
    return {section: {key: setting(section, key) for key in keys} for section, keys in DEFAULTS.items()}


def _emit(text: str, output: Optional[str] = None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8") as handle:
        handle.write(text)
    logger.info(f"Wrote '{output}'")


def cmd_lattice_check(path: str) -> int:
    L = read_lattice_file(path)
    _emit(format_lattice_check(L))
    return EXIT_OK


def _closed_namer(Q: CanonicalQM, closed: ClosedLattice) -> Callable[[int], Optional[str]]:
    """
    Names for closed nodes: their P-number in L(Q), or C1..Ck in L_C(Q)
    order when L(Q) cannot be enumerated within budget.
    """
    try:
        return all_subquasimodules(Q).name_of
    except EnumerationBudgetExceeded as e:
        logger.warning(f"Closed nodes are named C1..C{len(closed)} in L_C(Q) order: {e}")

    def closed_name(mask: int) -> Optional[str]:
        i = closed.base.position.get(mask)
        return None if i is None else f"C{i + 1}"

    return closed_name


def cmd_qm(action: str, path: str, output_format: str, closed_only: bool = False) -> int:
    Q = read_qm_file(path)
    if action == "verify":
        reports = check_all(Q, os.path.basename(path))
        _emit(structured(reports_frame(reports)) if output_format == "structured" else reports_table(reports))
        return EXIT_FAILED if any(r.failed for r in reports) else EXIT_OK

    if action == "subs":
        frame = subqm_table(all_subquasimodules(Q))
    elif action == "closed":
        closed = closed_subquasimodules(Q)
        frame = nodes_table(Q, closed.nodes, _closed_namer(Q, closed), perp_of=lambda mask: perp(Q, mask))
    elif action == "splitting":
        subs = all_subquasimodules(Q)
        frame = nodes_table(Q, splitting_subquasimodules(Q), subs.name_of, perp_of=lambda mask: perp(Q, mask))
    elif action == "perp-table":
        subs = all_subquasimodules(Q)
        columns = [i for i, mask in enumerate(subs.masks) if is_closed(Q, mask)] if closed_only else None
        _emit(perp_table(subs, lambda mask: perp(Q, mask), columns))
        return EXIT_OK
    else:
        bases = find_bases(SubQM(Q, Q.full))
        frame = bases_table(bases, Q)

    _emit(structured(frame) if output_format == "structured" else frame.to_string(index=False) + "\n")
    return EXIT_OK


def cmd_export_dot(path: str, which: str, output: Optional[str]) -> int:
    loaded = read_any(path)
    if which == "lattice":
        L: Lattice = loaded if isinstance(loaded, Lattice) else loaded.lattice
        _emit(lattice_dot(L), output)
        return EXIT_OK
    if isinstance(loaded, Lattice):
        raise QuasiLatError(f"--which {which} needs a quasimodule (.qm) file")
    Q = loaded
    if which == "subs":
        _emit(family_dot(all_subquasimodules(Q)), output)
        return EXIT_OK
    closed = closed_subquasimodules(Q)
    namer = _closed_namer(Q, closed)
    names = [namer(mask) for mask in closed.base.masks]
    _emit(family_dot(closed.base, names), output)
    return EXIT_OK


def _verify_data_folder() -> List[TheoremReport]:
    instances = [
        (name, loaded) for name, loaded in load_data_folder(setting("settings", "data_folder"))
        if isinstance(loaded, CanonicalQM)
    ]
    return verify_instances(instances)


def cmd_verify(args: argparse.Namespace) -> int:
    if args.search:
        cfg = SearchConfig(
            max_lattice_size=setting("search", "max_lattice_size"),
            max_factors=setting("search", "max_factors"),
            max_carrier=setting("search", "max_carrier"),
            seed=setting("verify", "seed"),
            drop_hypotheses=tuple(args.drop),
            targets=tuple(args.find),
        )
        reports = counterexample_search(cfg)
    elif args.instance is not None and args.instance != "all":
        reports = reproduce_instance(args.instance)
    else:
        reports = []
        for name in worked_examples.INSTANCES:
            reports.extend(reproduce_instance(name))
        if args.instance is None:
            reports.extend(_verify_data_folder())

    report_path = args.report or os.path.join(
        setting("settings", "output_folder"), setting("settings", "report_filename")
    )
    write_report(reports, report_path)
    _emit(structured(reports_frame(reports)) if args.format == "structured" else reports_table(reports))
    failed = sum(r.status == Status.FAIL for r in reports)
    logger.info(f"{len(reports)} reports, {failed} failed")
    return EXIT_FAILED if failed else EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main function to run the application.

    Returns:
        int: 0 on success, 1 when a verification fails, 2 on an input error.
    """
    set_log_level(os.getenv("QUASILAT_LOG_LEVEL", "INFO"))
    args = build_parser().parse_args(argv)
    apply_overrides(args)
    logger.info(f"Effective configuration: {json.dumps(effective_config(), sort_keys=True)}")

    try:
        if args.command == "lattice":
            return cmd_lattice_check(args.file)
        if args.command == "qm":
            return cmd_qm(args.action, args.file, args.format, args.closed)
        if args.command == "export":
            return cmd_export_dot(args.file, args.which, args.output)
        return cmd_verify(args)
    except FileNotFoundError as e:
        logger.error(f"File not found: {e}")
        return EXIT_INPUT
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_INPUT
    except QuasiLatError as e:
        logger.error(str(e))
        return EXIT_INPUT
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
