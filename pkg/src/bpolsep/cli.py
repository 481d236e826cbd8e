"""Command-line front end.

Exit status: 0 separable (or self-test passed), 1 inseparable (or self-test
failed), 2 usage error, malformed input or an undecided oracle.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence

from .automata import AutomatonError, disjoint_union
from .fixpoint import decide, full_inseparable_quads
from .oracles import ClassSpec, OracleUndecided, eps_inseparable, get_backend
from .parsing import RegexSyntaxError, parse_nfa_file, parse_regex
from .selftest import format_report, run_selftest

EXIT_SEPARABLE = 0
EXIT_INSEPARABLE = 1
EXIT_ERROR = 2

CLASS_IDENTS = [spec.ident for spec in (ClassSpec(b, p) for b in ("st", "mod", "amt", "gr") for p in (False, True))]


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_instance(args):
    """The union automaton and ``(I1, F1, I2, F2)`` from regexes or NFA files."""
    if args.regex and args.nfa:
        raise UsageError("give either --regex twice or --nfa, not both")
    if args.regex:
        if len(args.regex) != 2:
            raise UsageError("--regex must be given exactly twice")
        if not args.alphabet:
            raise UsageError("--regex requires --alphabet")
        l1 = parse_regex(args.regex[0], args.alphabet)
        l2 = parse_regex(args.regex[1], args.alphabet)
        union, off = disjoint_union(l1.nfa, l2.nfa)
        return union, l1.initial, l1.final, {q + off for q in l2.initial}, {q + off for q in l2.final}
    if not args.nfa:
        raise UsageError("need two --regex or one/two --nfa files")
    if len(args.nfa) == 1:
        f = parse_nfa_file(_read(args.nfa[0]))
        if f.initial2 is None or f.final2 is None:
            raise UsageError("a single --nfa file must declare initial2 and final2")
        return f.nfa, f.initial1, f.final1, f.initial2, f.final2
    if len(args.nfa) == 2:
        f1 = parse_nfa_file(_read(args.nfa[0]))
        f2 = parse_nfa_file(_read(args.nfa[1]))
        union, off = disjoint_union(f1.nfa, f2.nfa)
        return union, f1.initial1, f1.final1, {q + off for q in f2.initial1}, {q + off for q in f2.final1}
    raise UsageError("--nfa takes one or two files")


def _spec(text: str) -> ClassSpec:
    try:
        return ClassSpec.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _backend(spec: ClassSpec, args):
    return get_backend(spec.base, getattr(args, "budget", None))


def decision_record(verdict, spec: ClassSpec, wall_ms: float) -> dict:
    return {
        "verdict": "separable" if verdict.separable else "inseparable",
        "class": spec.ident,
        "witness": list(verdict.witness) if verdict.witness is not None else None,
        "iterations": len(verdict.stats.iterations),
        "oracle_calls": verdict.stats.oracle_calls,
        "controlled_size": verdict.controlled_size,
        "full_size": verdict.full_size,
        "wall_ms": wall_ms,
    }


def undecided_record(spec: ClassSpec, wall_ms: float) -> dict:
    return {
        "verdict": "undecided",
        "class": spec.ident,
        "witness": None,
        "iterations": 0,
        "oracle_calls": 0,
        "controlled_size": 0,
        "full_size": 0,
        "wall_ms": wall_ms,
    }


def cmd_decide(args, out) -> int:
    spec = _spec(args.class_)
    instance = load_instance(args)
    start = time.perf_counter()
    try:
        verdict = decide(*instance, spec, _backend(spec, args), args.threads)
    except OracleUndecided as exc:
        wall = round((time.perf_counter() - start) * 1000.0, 3)
        if args.json:
            print(json.dumps(undecided_record(spec, wall)), file=out)
        else:
            print(f"undecided ({spec.ident}): {exc}", file=out)
        return EXIT_ERROR
    wall = round((time.perf_counter() - start) * 1000.0, 3)
    record = decision_record(verdict, spec, wall)
    if args.json:
        if args.trace:
            record["trace"] = verdict.stats.iterations
        print(json.dumps(record), file=out)
    else:
        print(f"{record['verdict']} ({spec.ident})", file=out)
        if verdict.witness is not None:
            print("witness " + " ".join(map(str, verdict.witness)), file=out)
        if args.trace:
            print(f"iterations {' '.join(map(str, verdict.stats.iterations))}", file=out)
            print(f"oracle_calls {verdict.stats.oracle_calls}", file=out)
            print(f"controlled_size {verdict.controlled_size} full_size {verdict.full_size}", file=out)
            print(f"wall_ms {wall}", file=out)
    return EXIT_SEPARABLE if verdict.separable else EXIT_INSEPARABLE


def cmd_quads(args, out) -> int:
    spec = _spec(args.class_)
    if not args.nfa or len(args.nfa) != 1:
        raise UsageError("quads takes exactly one --nfa file")
    nfa = parse_nfa_file(_read(args.nfa[0])).nfa
    start = time.perf_counter()
    try:
        controlled, full, trace = full_inseparable_quads(nfa, spec, _backend(spec, args), args.threads)
    except OracleUndecided as exc:
        print(f"undecided ({spec.ident}): {exc}", file=out)
        return EXIT_ERROR
    wall = round((time.perf_counter() - start) * 1000.0, 3)
    if args.json:
        print(json.dumps({
            "class": spec.ident,
            "controlled": [list(q) for q in controlled],
            "full": [list(q) for q in full],
            "controlled_size": len(controlled),
            "full_size": len(full),
            "iterations": trace.iterations,
            "oracle_calls": trace.oracle_calls,
            "wall_ms": wall,
        }), file=out)
        return 0
    print(f"class {spec.ident}", file=out)
    print(f"iterations {len(trace.iterations)}: {' '.join(map(str, trace.iterations))}", file=out)
    print(f"controlled {len(controlled)}", file=out)
    for q in controlled:
        print("  " + " ".join(map(str, q)), file=out)
    print(f"full {len(full)}", file=out)
    for q in full:
        print("  " + " ".join(map(str, q)), file=out)
    if args.trace:
        print(f"oracle_calls {trace.oracle_calls}", file=out)
        print(f"wall_ms {wall}", file=out)
    return 0


def cmd_oracle(args, out) -> int:
    spec = _spec(args.class_)
    if not args.nfa or len(args.nfa) != 1:
        raise UsageError("oracle takes exactly one --nfa file")
    if args.src is None or args.dst is None:
        raise UsageError("oracle needs --src and --dst")
    nfa = parse_nfa_file(_read(args.nfa[0]), allow_epsilon=True).nfa
    if not (0 <= args.src < nfa.state_count and 0 <= args.dst < nfa.state_count):
        raise UsageError(f"--src/--dst out of range for {nfa.state_count} states")
    try:
        answer = eps_inseparable(spec.base, nfa, args.src, args.dst, _backend(spec, args), cache=None)
    except OracleUndecided as exc:
        print(f"undecided ({spec.base}): {exc}", file=out)
        return EXIT_ERROR
    word = "inseparable" if answer.inseparable else "separable"
    if args.json:
        print(json.dumps({"class": spec.base, "result": word, "evidence": answer.evidence}), file=out)
    else:
        print(f"{word} ({spec.base})", file=out)
        for key, value in sorted((answer.evidence or {}).items()):
            print(f"  {key}: {value}", file=out)
    return EXIT_INSEPARABLE if answer.inseparable else EXIT_SEPARABLE


def cmd_selftest(args, out) -> int:
    report = run_selftest(threads=args.threads, inject_fault=args.inject_fault, seed=args.seed)
    if args.json:
        print(json.dumps(report, sort_keys=True), file=out)
    else:
        print(format_report(report), file=out)
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--trace", action="store_true", help="print the fixpoint trace")
    common.add_argument("--threads", type=int, default=1, help="worker threads per round (default 1)")
    common.add_argument("--budget", type=int, default=None, help="AMT exploration budget in nodes")

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--class", dest="class_", required=True, metavar="CLASS",
                        help="one of: " + ", ".join(CLASS_IDENTS))
    inputs.add_argument("--regex", action="append", default=[], help="regular expression (give twice)")
    inputs.add_argument("--alphabet", help="alphabet letters, e.g. 'ab'")
    inputs.add_argument("--nfa", action="append", default=[], help="NFA file (one or two)")

    parser = argparse.ArgumentParser(prog="bpolsep", description="Separation of regular languages by BPol classes.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("decide", parents=[common, inputs], help="decide separability of two languages")
    sub.add_parser("quads", parents=[common, inputs], help="print controlled and full inseparable quadruples")
    p = sub.add_parser("oracle", parents=[common, inputs], help="query a group-class oracle directly")
    p.add_argument("--src", type=int)
    p.add_argument("--dst", type=int)
    p = sub.add_parser("selftest", parents=[common], help="run the built-in invariant suites")
    p.add_argument("--inject-fault", action="store_true", help="use a deliberately wrong oracle")
    p.add_argument("--seed", type=int, default=7)
    return parser


COMMANDS = {"decide": cmd_decide, "quads": cmd_quads, "oracle": cmd_oracle, "selftest": cmd_selftest}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else 0
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, AutomatonError, RegexSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
