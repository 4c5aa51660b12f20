"""Command-line interface.

Exit codes: 0 for a positive answer (or plain success), 1 for a negative
answer, 2 for usage, parse and evaluation errors, 3 for internal invariant
violations.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import ccs
from .aut import read_aut, save_aut
from .equivalence import (
    bisimilar,
    bisimilarity,
    bounded_distinguisher,
    distinguishing_formula,
    theory_eq,
    theory_eq_bounded,
)
from .errors import HmlError, InvariantViolation, LtsError, ResourceLimitError
from .formula import Formula
from .lts import FiniteLts
from .semantics import denotation, satisfies
from .syntax import parse, parse_formula_lines, pretty

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(HmlError):
    pass


@dataclass
class QueryReport:
    query: str
    inputs: dict[str, Any]
    result: Any = None
    lines: list[str] = field(default_factory=list)
    exit_code: int = EXIT_TRUE
    ms: float = 0.0
    error: str | None = None

    def to_json(self, timing: bool = False) -> str:
        out = {"query": self.query, "inputs": self.inputs, "result": self.result}
        if timing:
            out["ms"] = round(self.ms, 3)
        if self.error is not None:
            out["error"] = self.error
        out["exit"] = self.exit_code
        return json.dumps(out, sort_keys=True)


@dataclass
class Model:
    """A loaded LTS plus, for CCS input, the state table."""

    lts: FiniteLts
    table: list | None = None

    def state(self, ref: str) -> int:
        ref = ref.strip()
        if ref.isdigit():
            s = int(ref)
            if s >= self.lts.num_states:
                raise UsageError(f"state {s} out of range [0, {self.lts.num_states})")
            return s
        if self.table is None:
            raise UsageError(f"state {ref!r} is not a numeric id")
        proc = ccs.parse_process(ref)
        try:
            return self.table.index(proc)
        except ValueError:
            raise UsageError(f"process {ref!r} is not a state of this LTS") from None

    def describe(self, s: int) -> str:
        if self.table is None:
            return str(s)
        return f"{s} [{ccs.pretty_process(self.table[s])}]"


def _load(path: str, extra_states=(), max_states=ccs.DEFAULT_MAX_STATES) -> Model:
    text = Path(path).read_text(encoding="utf-8")
    if not path.endswith(".ccs"):
        return Model(read_aut(text))
    prog = ccs.parse_ccs(text)
    roots = list(prog.roots)
    # process expressions used as state references become extra roots
    for ref in extra_states:
        if not ref.strip().isdigit():
            roots.append(_resolve_root(prog, ref))
    lts, table = ccs.reachable_lts(prog.defs, roots, max_states)
    return Model(lts, table)


def _resolve_root(prog: ccs.CcsProgram, ref: str) -> ccs.Process:
    proc = ccs.parse_process(ref)
    ccs.check_resolved(prog.defs, [proc])
    return proc


def _formulas(args) -> list[tuple[str, Formula]]:
    out = []
    if getattr(args, "formula", None):
        out.append((args.formula, parse(args.formula)))
    if getattr(args, "formula_file", None):
        for phi in parse_formula_lines(Path(args.formula_file).read_text(encoding="utf-8")):
            out.append((pretty(phi), phi))
    if not out:
        raise UsageError("no formula given (inline or with --formula-file)")
    return out


# -- commands ----------------------------------------------------------------


def cmd_check(args) -> QueryReport:
    model = _load(args.lts, [args.state], args.max_states)
    s = model.state(args.state)
    rep = QueryReport("check", {"lts": args.lts, "state": args.state})
    results = []
    for text, phi in _formulas(args):
        value = satisfies(model.lts, s, phi)
        if args.both_semantics and value != (s in denotation(phi, model.lts)):
            raise InvariantViolation(f"satisfaction and denotation disagree on {text} at state {s}")
        results.append({"formula": text, "value": value})
        word = "true" if value else "false"
        rep.lines.append(word if not args.formula_file else f"{word}\t{text}")
    rep.inputs["formulas"] = [r["formula"] for r in results]
    rep.result = results[0]["value"] if len(results) == 1 else results
    rep.exit_code = EXIT_TRUE if all(r["value"] for r in results) else EXIT_FALSE
    return rep


def cmd_denote(args) -> QueryReport:
    model = _load(args.lts, (), args.max_states)
    rep = QueryReport("denote", {"lts": args.lts})
    results = []
    for text, phi in _formulas(args):
        states = denotation(phi, model.lts).to_list()
        results.append({"formula": text, "states": states})
        rep.lines.append(" ".join(map(str, states)) if not args.formula_file else f"{text}\t{' '.join(map(str, states))}")
    rep.inputs["formulas"] = [r["formula"] for r in results]
    rep.result = results[0]["states"] if len(results) == 1 else results
    return rep


def cmd_bisim(args) -> QueryReport:
    refs = [r for r in (args.s1, args.s2) if r is not None]
    if len(refs) == 1:
        raise UsageError("give two states, or none for the full partition")
    model = _load(args.lts, refs, args.max_states)
    rep = QueryReport("bisim", {"lts": args.lts, "states": refs})
    if refs:
        s1, s2 = (model.state(r) for r in refs)
        same = bisimilar(model.lts, s1, s2)
        rep.result = same
        rep.lines.append("bisimilar" if same else "not-bisimilar")
        rep.exit_code = EXIT_TRUE if same else EXIT_FALSE
    else:
        classes = bisimilarity(model.lts).classes()
        rep.result = classes
        for cls in classes:
            rep.lines.append(" ".join(model.describe(s) if model.table else str(s) for s in cls))
    return rep


def cmd_distinguish(args) -> QueryReport:
    model = _load(args.lts, [args.s1, args.s2], args.max_states)
    s1, s2 = model.state(args.s1), model.state(args.s2)
    rep = QueryReport("distinguish", {"lts": args.lts, "states": [args.s1, args.s2]})
    res = distinguishing_formula(model.lts, s1, s2)
    if res.equivalent:
        rep.result = {"equivalent": True}
        rep.lines.append("equivalent")
        return rep
    phi = res.formula
    # re-verify before printing
    if not (satisfies(model.lts, s1, phi) and not satisfies(model.lts, s2, phi)):
        raise InvariantViolation("distinguishing formula failed re-verification")
    text = pretty(phi)
    rep.result = {"equivalent": False, "formula": text, "satisfied_by": s1, "refuted_by": s2}
    rep.lines.append(text)
    rep.lines.append(f"satisfied by {model.describe(s1)}, not by {model.describe(s2)}")
    rep.exit_code = EXIT_FALSE
    return rep


def cmd_theory_eq(args) -> QueryReport:
    model = _load(args.lts, [args.s1, args.s2], args.max_states)
    s1, s2 = model.state(args.s1), model.state(args.s2)
    rep = QueryReport("theory-eq", {"lts": args.lts, "states": [args.s1, args.s2]})
    value = theory_eq(model.lts, s1, s2)
    result: dict[str, Any] = {"theory_eq": value, "method": "bisimilarity"}
    if args.oracle:
        max_size, max_depth = args.oracle
        rep.inputs["oracle"] = [max_size, max_depth]
        bounded = theory_eq_bounded(model.lts, s1, s2, max_size, max_depth)
        result["bounded"] = bounded
        if not bounded:
            result["witness"] = pretty(bounded_distinguisher(model.lts, s1, s2, max_size, max_depth))
        if bounded != value:
            raise InvariantViolation(
                f"bounded oracle ({bounded}) disagrees with bisimilarity ({value}); bounds may be too small"
            )
    rep.result = result
    rep.lines.append("theory-equivalent" if value else "not-theory-equivalent")
    rep.exit_code = EXIT_TRUE if value else EXIT_FALSE
    return rep


def cmd_ccs(args) -> QueryReport:
    prog = ccs.parse_ccs(Path(args.ccs_file).read_text(encoding="utf-8"))
    if args.root is not None:
        roots = [ccs.Const(args.root) if args.root in prog.defs else _resolve_root(prog, args.root)]
    else:
        roots = list(prog.roots)
    if not roots:
        raise UsageError("no root process: add an expression line to the file or pass ROOT")
    lts, table = ccs.reachable_lts(prog.defs, roots, args.max_states)
    rep = QueryReport("ccs", {"ccs": args.ccs_file, "root": args.root, "max_states": args.max_states})
    if args.emit_aut:
        save_aut(lts, args.emit_aut)
        rep.inputs["emit_aut"] = args.emit_aut
    rep.result = {
        "states": lts.num_states,
        "transitions": lts.num_transitions,
        "labels": list(lts.labels),
        "table": [ccs.pretty_process(p) for p in table],
    }
    rep.lines.append(f"states: {lts.num_states}")
    rep.lines.append(f"transitions: {lts.num_transitions}")
    for i, p in enumerate(table):
        rep.lines.append(f"{i}\t{ccs.pretty_process(p)}")
    return rep


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmlkit", description="Hennessy-Milner logic toolkit for finite LTSs.")
    parser.add_argument("--json", action="store_true", help="one JSON object per query on stdout")
    parser.add_argument("--timing", action="store_true", help="report elapsed milliseconds")
    sub = parser.add_subparsers(dest="command", required=True)

    def lts_arg(p):
        p.add_argument("lts", help=".aut file, or .ccs program (its roots are compiled)")
        p.add_argument("--max-states", type=int, default=ccs.DEFAULT_MAX_STATES, help="state budget for .ccs input")

    p = sub.add_parser("check", help="does a state satisfy a formula?")
    lts_arg(p)
    p.add_argument("state")
    p.add_argument("formula", nargs="?")
    p.add_argument("-f", "--formula-file", help="file with one formula per line")
    p.add_argument("--both-semantics", action="store_true", help="cross-check against the denotational semantics")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("denote", help="states satisfying a formula")
    lts_arg(p)
    p.add_argument("formula", nargs="?")
    p.add_argument("-f", "--formula-file")
    p.set_defaults(func=cmd_denote)

    p = sub.add_parser("bisim", help="bisimilarity of two states, or the full partition")
    lts_arg(p)
    p.add_argument("s1", nargs="?")
    p.add_argument("s2", nargs="?")
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("distinguish", help="a formula telling two states apart")
    lts_arg(p)
    p.add_argument("s1")
    p.add_argument("s2")
    p.set_defaults(func=cmd_distinguish)

    p = sub.add_parser("theory-eq", help="do two states satisfy the same formulas?")
    lts_arg(p)
    p.add_argument("s1")
    p.add_argument("s2")
    p.add_argument("--oracle", nargs=2, type=int, metavar=("MAX_SIZE", "MAX_DEPTH"), help="also run the bounded enumeration oracle")
    p.set_defaults(func=cmd_theory_eq)

    p = sub.add_parser("ccs", help="compile a CCS program to an LTS")
    p.add_argument("ccs_file")
    p.add_argument("root", nargs="?", help="constant name or process expression (default: the file's roots)")
    p.add_argument("--max-states", type=int, default=ccs.DEFAULT_MAX_STATES)
    p.add_argument("--emit-aut", metavar="PATH")
    p.set_defaults(func=cmd_ccs)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_TRUE
    started = time.perf_counter()
    try:
        rep = args.func(args)
    except InvariantViolation as exc:
        rep = QueryReport(args.command, {}, error=f"invariant violation: {exc}", exit_code=EXIT_INVARIANT)
    except (HmlError, LtsError, ResourceLimitError, OSError) as exc:
        rep = QueryReport(args.command, {}, error=str(exc), exit_code=EXIT_USAGE)
    rep.ms = (time.perf_counter() - started) * 1000
    if args.json:
        print(rep.to_json(args.timing))
        return rep.exit_code
    if rep.error is not None:
        print(f"error: {rep.error}", file=sys.stderr)
    for line in rep.lines:
        print(line)
    if args.timing:
        print(f"# {rep.ms:.3f} ms", file=sys.stderr)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
