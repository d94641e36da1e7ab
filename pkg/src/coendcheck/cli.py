"""Command-line driver: validate fixtures, evaluate shapes, check
derivation scripts, and run the shipped demos.

Exit codes: 0 all checks passed, 1 a verification failed, 2 malformed
input (unknown commands, missing bindings, unparsable files).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .fincat import FixtureError, load_fixture_file, validate_category, validate_monoidal
from .rewrite import (Report, RewriteError, check_derivation,
                      parse_derivation_script)
from .shapelang import (Env, EvalError, Evaluator, ShapeSyntaxError,
                        ShapeTypeError, StructureMissing, boundary,
                        parse_shape_script)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_MALFORMED = 2


class InputError(Exception):
    pass


def _parse_bindings(pairs):
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise InputError(f"binding {pair!r} is not SYM=PATH")
        sym, path = pair.split("=", 1)
        try:
            cat, mon = load_fixture_file(path)
        except (OSError, FixtureError) as e:
            raise InputError(f"cannot load fixture {path!r}: {e}")
        out[sym.strip()] = mon if mon is not None else cat
    return out


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(str(e))


def _emit(report: Report, fmt):
    if fmt == "json":
        print(json.dumps(report.data(), indent=1, sort_keys=True))
    else:
        sys.stdout.write(report.text())


def cmd_validate(args):
    report = Report()
    try:
        cat, mon = load_fixture_file(args.fixture)
    except (OSError, FixtureError) as e:
        raise InputError(str(e))
    rep = validate_category(cat)
    report.line(str(rep))
    for v in rep.violations:
        report.failures.append(str(v))
    if mon is not None and rep.ok:
        rep2 = validate_monoidal(mon)
        report.line(str(rep2))
        for v in rep2.violations:
            report.failures.append(str(v))
    _emit(report, args.format)
    return EXIT_OK if report.ok else EXIT_VERIFICATION


def cmd_eval(args):
    if not args.shape:
        raise InputError("eval needs --shape NAME")
    try:
        sig = parse_shape_script(_read(args.script))
    except ShapeSyntaxError as e:
        raise InputError(str(e))
    if args.shape not in sig.shapes:
        raise InputError(f"no shape named {args.shape!r}")
    term = sig.shapes[args.shape]
    bindings = _parse_bindings(args.bind)
    report = Report()
    try:
        bnd = boundary(term, sig)
        env = Env(sig, bindings)
        for env_a in env.assignments():
            desc = env_a.describe_objs()
            if desc:
                report.line(f"assignment: {desc}")
            node = Evaluator(env_a).node(term)
            if bnd == ((), ()):
                fib = node.prof.fiber(0, 0)
                report.line(f"classes: {len(fib)}")
                for v in fib:
                    report.line(f"  {node.prof.render(v)}")
            else:
                total = 0
                for a in node.prof.source.objects:
                    for b in node.prof.target.objects:
                        n = len(node.prof.fiber(a, b))
                        total += n
                        if n:
                            report.line(
                                f"  fiber ({node.prof.source.obj_name(a)},"
                                f"{node.prof.target.obj_name(b)}): {n}")
                report.line(f"classes: {total}")
    except (ShapeTypeError, EvalError, StructureMissing) as e:
        raise InputError(str(e))
    _emit(report, args.format)
    return EXIT_OK


def cmd_check(args):
    try:
        text = _read(args.script)
        shapes_ref = None
        for line in text.splitlines():
            stripped = line.split(";", 1)[0].strip()
            if stripped.startswith("use "):
                shapes_ref = stripped[4:].strip()
                break
        if shapes_ref is None:
            raise InputError("derivation script has no 'use' line")
        base = os.path.dirname(os.path.abspath(args.script))
        sig = parse_shape_script(_read(os.path.join(base, shapes_ref)))
        script = parse_derivation_script(text, sig)
    except (ShapeSyntaxError, RewriteError) as e:
        raise InputError(str(e))
    bindings = _parse_bindings(args.bind)
    try:
        env = Env(sig, bindings)
    except EvalError as e:
        raise InputError(str(e))
    report = check_derivation(script, sig, env, fail_fast=args.fail_fast)
    _emit(report, args.format)
    return EXIT_OK if report.ok else EXIT_VERIFICATION


def cmd_demo(args):
    from .demos import DEMOS, run_demo
    if args.name == "list":
        report = Report()
        for name, spec in sorted(DEMOS.items()):
            report.line(f"{name}: {spec['blurb']}")
        _emit(report, args.format)
        return EXIT_OK
    try:
        report = run_demo(args.name, fail_fast=args.fail_fast)
    except KeyError as e:
        raise InputError(str(e))
    _emit(report, args.format)
    return EXIT_OK if report.ok else EXIT_VERIFICATION


def build_parser():
    ap = argparse.ArgumentParser(
        prog="coendcheck",
        description="verify shape evaluations and rewrite derivations "
                    "against finite profunctor oracles")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("validate", help="validate a category fixture file")
    p.add_argument("fixture")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("eval", help="evaluate a shape from a shape script")
    p.add_argument("script")
    p.add_argument("--shape", required=False)
    p.add_argument("--bind", action="append", metavar="SYM=PATH")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("check", help="check a derivation script")
    p.add_argument("script")
    p.add_argument("--bind", action="append", metavar="SYM=PATH")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("demo", help="run a shipped demo (or 'list')")
    p.add_argument("name")
    p.set_defaults(fn=cmd_demo)

    for p in sub.choices.values():
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--fail-fast", action="store_true")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if not getattr(args, "command", None):
        ap.print_help()
        return EXIT_MALFORMED
    try:
        return args.fn(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
