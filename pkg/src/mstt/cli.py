"""Command-line front end: ``mstt check|eval|extract FILE``."""

from __future__ import annotations

import argparse
import sys

from .errors import EvaluationPanic, ParseError, TypeCheckError
from .extraction import HostStream, extractable_for
from .presheaf import TT, render_host, render_value
from .syntax import Empty, render_ty
from .surface import parse

THEORIES = {"g": "guarded", "guarded": "guarded", "p": "param", "param": "param"}


def checker_for(theory: str):
    if THEORIES[theory] == "guarded":
        from .guarded import make_checker
    else:
        from .param import make_checker
    return make_checker()


def render_extracted(value, take: int, translated_type: str = "") -> str:
    if isinstance(value, HostStream):
        return " ".join(render_host(v) for v in value.take(take))
    if callable(value):
        return f"<function : {translated_type}>"
    return render_host(value)


def _stage(arg: str | None, mode: str):
    if mode == "star":
        return TT
    if arg is None:
        raise ValueError(f"--stage is required for a definition at mode {mode}")
    if mode == "omega":
        if not arg.isdigit():
            raise ValueError(f"stage {arg!r} is not a natural number")
        return int(arg)
    if arg not in ("left", "right", "relation"):
        raise ValueError(f"stage {arg!r} is not one of left, right, relation")
    return arg


def run(argv, out, err) -> int:
    ap = argparse.ArgumentParser(prog="mstt", description="Check, evaluate and extract MSTT programs.")
    ap.add_argument("command", choices=["check", "eval", "extract"])
    ap.add_argument("file")
    ap.add_argument("-m", "--mode-theory", default="guarded", choices=sorted(THEORIES))
    ap.add_argument("--name", help="definition to evaluate or extract (default: the last one)")
    ap.add_argument("--stage", help="object to evaluate at: a stage at omega, left/right/relation at wedge")
    ap.add_argument("--take", type=int, default=10, help="stream elements to print (default 10)")
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:  # keep the documented 0/1 exit codes
        return 0 if e.code == 0 else 1

    checker = checker_for(args.mode_theory)
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print(f"error: cannot read {args.file}: {e.strerror}", file=err)
        return 1
    try:
        prog = parse(text, checker)
    except ParseError as e:
        print(f"{args.file}:{e}", file=err)
        return 1

    results = {}
    for d in prog.defs:
        if args.command != "check" and args.name is not None and d.name != args.name:
            continue
        try:
            results[d.name] = (d, checker.infer(d.term, Empty(d.mode)))
        except TypeCheckError as e:
            print(f"error in {d.name}: {e}", file=err)
            return 1

    if args.command == "check":
        for name, (d, r) in results.items():
            print(f"{name} : {render_ty(r.type)}", file=out)
        return 0

    if not prog.defs:
        print("error: the file has no definitions", file=err)
        return 1
    name = args.name or prog.defs[-1].name
    if name not in results:
        print(f"error: no definition named {name!r}", file=err)
        return 1
    d, r = results[name]
    try:
        if args.command == "eval":
            x = _stage(args.stage, d.mode)
            print(render_value(r.denotation.at(x, ())), file=out)
            return 0
        ex = extractable_for(checker, r.type)
        print(render_extracted(ex.extract(r.denotation), args.take, ex.translated_type), file=out)
        return 0
    except (ValueError, TypeCheckError) as e:
        print(f"error: {e}", file=err)
        return 1
    except EvaluationPanic as e:
        print(f"internal error (evaluation panic): {e}", file=err)
        return 1


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv, sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
