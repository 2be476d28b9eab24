"""Command-line front end.

Exit codes: 0 success, 1 parse/semantic error in the workspace document,
2 operation error (e.g. a chain junction mismatch), 3 validation failure.
Data goes to stdout, errors to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from . import dsl, engine, model
from .algebra import AlgebraKind, make_algebra, verify_axioms
from .errors import CompalgError, EngineError, ModelError, NotADistribution
from .dsl import ParseError, SemanticError


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _emit(args, obj, text_lines=None) -> None:
    if getattr(args, "format", "json") == "text" and text_lines is not None:
        sys.stdout.write("\n".join(text_lines) + "\n")
    else:
        sys.stdout.write(_dump_json(obj))


def _need_workspace(args) -> dsl.Workspace:
    if not args.workspace:
        raise SystemExit2("this command needs --workspace", 1)
    try:
        with open(args.workspace, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SystemExit2(f"cannot read workspace: {exc}", 1)
    base = os.path.dirname(os.path.abspath(args.workspace))
    return dsl.parse(text, base_dir=base)


class SystemExit2(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _lookup(table: dict, name: str, kind: str):
    if name not in table:
        raise SystemExit2(f"unknown {kind} {name!r}", 1)
    return table[name]


def _parse_block(text: str) -> frozenset:
    inner = text.strip()
    if inner.startswith("{") and inner.endswith("}"):
        inner = inner[1:-1]
    return frozenset(x.strip() for x in inner.split(",") if x.strip())


def _prob_json(value):
    if isinstance(value, float):
        return value
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else f.numerator


def cmd_classify(args) -> int:
    ws = _need_workspace(args)
    p = _lookup(ws.paths, args.path, "path")
    flags = model.classify(p)
    _emit(args, flags.to_json(), [
        f"cyclic: {flags.cyclic}", f"symmetric: {flags.symmetric}",
        f"trivial: {flags.trivial}", f"possible: {flags.possible}",
        f"igps: {list(flags.igps)}"])
    return 0


def cmd_normalize(args) -> int:
    ws = _need_workspace(args)
    p = _lookup(ws.paths, args.path, "path")
    nf = model.normal_form(p)
    _emit(args, model.path_to_json(nf), [repr(nf)])
    return 0


def _binary_op(args, op) -> int:
    ws = _need_workspace(args)
    a = _lookup(ws.paths, args.left, "path")
    b = _lookup(ws.paths, args.right, "path")
    result = op(a, b)
    _emit(args, model.path_to_json(result), [repr(result)])
    return 0


def cmd_chain(args) -> int:
    return _binary_op(args, model.chain)


def cmd_coarsen(args) -> int:
    return _binary_op(args, model.coarsen)


def cmd_refine(args) -> int:
    return _binary_op(args, model.refine)


def cmd_reverse(args) -> int:
    ws = _need_workspace(args)
    p = _lookup(ws.paths, args.path, "path")
    result = model.reverse(p)
    _emit(args, model.path_to_json(result), [repr(result)])
    return 0


def cmd_factorize(args) -> int:
    ws = _need_workspace(args)
    p = _lookup(ws.paths, args.path, "path")
    factors = model.factorize(p)
    _emit(args, [model.path_to_json(f) for f in factors],
          [repr(f) for f in factors])
    return 0


def cmd_enumerate(args) -> int:
    ws = _need_workspace(args)
    if args.what == "partitions":
        g = _lookup(ws.grounds, args.name, "ground set")
        items = model.enumerate_partitions(g)
        if args.count_only:
            sys.stdout.write(f"{len(items)}\n")
            return 0
        _emit(args, {"count": len(items),
                     "items": [model.measurement_to_json(m) for m in items]},
              [f"count: {len(items)}"] + [repr(m) for m in items])
    else:
        s = _lookup(ws.sequences, args.name, "sequence")
        items = model.enumerate_paths(s)
        if args.count_only:
            sys.stdout.write(f"{len(items)}\n")
            return 0
        _emit(args, {"count": len(items),
                     "items": [model.path_to_json(p) for p in items]},
              [f"count: {len(items)}"] + [repr(p) for p in items])
    return 0


def cmd_prob(args) -> int:
    ws = _need_workspace(args)
    p = _lookup(ws.paths, args.path, "path")
    asg = _lookup(ws.assignments, args.assignment, "assignment")
    result = engine.probability_of(p, asg)
    _emit(args, result.to_json(), [
        f"amplitude: {list(result.amplitude.coeffs)}",
        f"probability: {result.probability}"])
    return 0


def cmd_sum_rule(args) -> int:
    ws = _need_workspace(args)
    s = _lookup(ws.sequences, args.sequence, "sequence")
    asg = _lookup(ws.assignments, args.assignment, "assignment")
    total = engine.total_probability(s, _parse_block(args.source), asg)
    _emit(args, {"total_probability": _prob_json(total)}, [f"total: {total}"])
    return 0


def cmd_verify_algebra(args) -> int:
    try:
        kind = AlgebraKind.from_label(args.algebra)
    except ValueError as exc:
        raise SystemExit2(str(exc), 1)
    report = verify_axioms(make_algebra(kind), samples=args.samples,
                           seed=args.seed)
    lines = [f"{c.name}: {'pass' if c.passed else 'FAIL'}" for c in report.checks]
    _emit(args, report.to_json(), [f"algebra: {kind.label}"] + lines)
    return 0


def cmd_sample(args) -> int:
    ws = _need_workspace(args)
    s = _lookup(ws.sequences, args.sequence, "sequence")
    asg = _lookup(ws.assignments, args.assignment, "assignment")
    source = _parse_block(args.source)
    table = engine.sample(s, source, asg, args.n, args.seed)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["path", "count", "probability"])
    for p in sorted(table, key=model.path_key):
        prob = engine.probability_of(p, asg).probability
        writer.writerow([
            json.dumps(model.path_to_json(p), sort_keys=True, separators=(",", ":")),
            table[p],
            _prob_json(prob),
        ])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compalg",
        description="Partition-path calculus over real composition algebras")
    parser.add_argument("-w", "--workspace", help="DSL document to load")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--format", choices=["json", "text"], default="json")
        return p

    p = add("classify", cmd_classify, help="print path classification flags")
    p.add_argument("path")
    p = add("normalize", cmd_normalize, help="print the nonredundant form")
    p.add_argument("path")
    for name, fn in (("chain", cmd_chain), ("coarsen", cmd_coarsen),
                     ("refine", cmd_refine)):
        p = add(name, fn, help=f"{name} two paths")
        p.add_argument("left")
        p.add_argument("right")
    p = add("reverse", cmd_reverse, help="reverse a path")
    p.add_argument("path")
    p = add("factorize", cmd_factorize, help="split at interior atomic steps")
    p.add_argument("path")
    p = add("enumerate", cmd_enumerate, help="enumerate partitions or paths")
    p.add_argument("what", choices=["partitions", "paths"])
    p.add_argument("name")
    p.add_argument("--count-only", action="store_true")
    p = add("prob", cmd_prob, help="amplitude and probability of a path")
    p.add_argument("path")
    p.add_argument("--assignment", required=True)
    p = add("sum-rule", cmd_sum_rule, help="total probability from a source")
    p.add_argument("sequence")
    p.add_argument("--assignment", required=True)
    p.add_argument("--source", required=True)
    p = add("verify-algebra", cmd_verify_algebra, help="axiom report for an algebra")
    p.add_argument("algebra")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p = add("sample", cmd_sample, help="draw paths from the exact distribution")
    p.add_argument("sequence")
    p.add_argument("--assignment", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, SemanticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NotADistribution as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except (ModelError, EngineError, CompalgError) as exc:
        print(f"operation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
