"""Command-line driver: translate, check and lint Wright descriptions.

``wright2csp translate in.wrt out.fdr2`` writes the FDR file;
``wright2csp check in.wrt`` additionally discharges every generated assertion
in-process and prints one PASS/FAIL line per assertion;
``wright2csp lint in.wrt`` runs the static checks only.

For compatibility with the historical positional form,
``wright2csp in.wrt out.fdr2`` behaves like ``translate``.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from . import alphabets, analyzer, codegen
from .engine import DEFAULT_MAX_STATES, TICK, EngineError, discharge_assertions
from .parser import ParseError, parse_source


def _eprint(*args: object) -> None:
    print(*args, file=sys.stderr)


def _load(path: str, strict_attachments: bool = False):
    """Parse and statically check a file.

    Returns (spec, diagnostics) or None after printing errors.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        _eprint(f"can't open file for input: {path}. ({exc.strerror})")
        return None
    try:
        spec, warnings = parse_source(source)
    except ParseError as exc:
        _eprint(f"{path}:{exc}")
        _eprint("a problem occurred in the parsing stage.")
        return None
    _eprint("Parsing complete.")
    for w in warnings:
        _eprint(f"{path}:{w}")
    diags = analyzer.analyze(spec, strict=strict_attachments)
    diags.extend(alphabets.annotate(spec))
    for d in diags:
        _eprint(f"{path}:{d}")
    if analyzer.has_errors(diags):
        return None
    return spec


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".wright2csp-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_translate(args: argparse.Namespace) -> int:
    spec = _load(args.infile)
    if spec is None:
        return 1
    plan = codegen.emit(spec)
    for d in plan.diagnostics:
        _eprint(f"{args.infile}:{d}")
    _write_atomic(args.outfile, plan.text)
    _eprint("wr2fdr done.")
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    spec = _load(args.infile)
    if spec is None:
        return 1
    plan = codegen.emit(spec)
    for d in plan.diagnostics:
        _eprint(f"{args.infile}:{d}")
    if args.outfile:
        _write_atomic(args.outfile, plan.text)
    failed = 0
    try:
        results = discharge_assertions(plan.assertions, plan.definitions, args.max_states)
    except EngineError as exc:
        _eprint(f"{args.infile}: {exc}")
        return 1
    for label, verdict in results:
        if verdict.holds:
            print(f"PASS  {label}")
        else:
            trace, kind = verdict.counterexample
            shown = ", ".join("tick" if a == TICK else a for a in trace) or "<empty>"
            print(f"FAIL  {label}  ({kind} after trace <{shown}>)")
            failed += 1
    _eprint("wr2fdr done.")
    return 1 if failed else 0


def cmd_lint(args: argparse.Namespace) -> int:
    spec = _load(args.infile, strict_attachments=args.strict_attachments)
    return 0 if spec is not None else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wright2csp",
        description="Translate Wright architecture descriptions to FDR-checkable CSP",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_tr = sub.add_parser("translate", help="translate a .wrt file to a .fdr2 file")
    p_tr.add_argument("infile")
    p_tr.add_argument("outfile")
    p_tr.set_defaults(func=cmd_translate)

    p_ck = sub.add_parser("check", help="translate and discharge all assertions in-process")
    p_ck.add_argument("infile")
    p_ck.add_argument("-o", "--outfile", default=None)
    p_ck.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    p_ck.set_defaults(func=cmd_check)

    p_li = sub.add_parser("lint", help="static analysis only")
    p_li.add_argument("infile")
    p_li.add_argument("--strict-attachments", action="store_true")
    p_li.set_defaults(func=cmd_lint)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # historical positional form: wright2csp <infile> <fdrfile>
    if len(argv) == 2 and argv[0] not in ("translate", "check", "lint") and not argv[0].startswith("-"):
        argv = ["translate", *argv]
    if not argv:
        _eprint("usage: wright2csp <infile> <fdrfile>")
        return 1
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
