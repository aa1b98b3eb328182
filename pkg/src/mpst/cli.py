"""``mpst`` command line front end.

Exit codes: 0 success / property holds, 1 parse or well-formedness error,
2 projection undefined, 3 property or type check fails, 4 state limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import projection, safety, semantics, syntax
from .core import EMPTY, Judgement, ProcessEnv
from .errors import (
    DuplicateEndpoint, OverlappingEndpoint, ParseError, ProjectionUndefined, StateLimitExceeded,
    TypingError, UnboundVariable, WellFormednessError,
)
from .proc import check_system, sr_probe, typecheck

EXIT_OK, EXIT_PARSE, EXIT_PROJECTION, EXIT_FAIL, EXIT_LIMIT = 0, 1, 2, 3, 4


def _read(path: str) -> tuple[str, str]:
    if path == "-":
        return sys.stdin.read(), "<stdin>"
    with open(path, encoding="utf-8") as fh:
        return fh.read(), path


def _load(parser, path: str):
    text, name = _read(path)
    return parser(text, name)


def _dump(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def _max_states(value) -> int:
    if value is not None:
        return value
    return int(os.environ.get("MPST_MAX_STATES", semantics.DEFAULT_MAX_STATES))


def _print_witness(witness: dict, indent: str = "  ") -> None:
    data = safety._jsonable(witness)
    for key in sorted(data):
        val = data[key]
        if key == "trace":
            print(f"{indent}trace:" + ("" if val else " (empty)"))
            for a in val:
                print(f"{indent}  {a}")
        elif isinstance(val, dict):
            print(f"{indent}{key}:")
            _print_witness(val, indent + "  ")
        elif key == "path":
            print(f"{indent}path: {'/'.join(map(str, val)) or '(root)'}")
        elif isinstance(val, list):
            print(f"{indent}{key}: {' | '.join(map(str, val))}")
        else:
            print(f"{indent}{key}: {val}")


def _print_verdict(v: safety.Verdict, as_json: bool) -> None:
    if as_json:
        _dump(v.to_json())
        return
    status = "holds" if v.holds else "FAILS"
    extra = f" ({v.states_explored} states explored)" if v.states_explored else ""
    print(f"{v.property}: {status}{extra}")
    if v.witness is not None:
        _print_witness(v.witness)


def cmd_project(args) -> int:
    g = _load(syntax.parse_global, args.file)
    roles = [args.role] if args.role else list(projection.roles(g))
    out = {}
    try:
        for r in roles:
            out[r] = projection.project(g, r, args.merge)
    except ProjectionUndefined as exc:
        if args.json:
            _dump({"error": "ProjectionUndefined", "role": exc.role, "path": list(exc.path),
                   "reason": exc.reason})
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROJECTION
    if args.json:
        _dump({"session": args.session,
               "projections": {r: syntax.pretty(t) for r, t in out.items()}})
    else:
        for r, t in out.items():
            print(f"{args.session}[{r}]: {syntax.pretty(t)}")
    return EXIT_OK


def cmd_check(args) -> int:
    ctx = _load(syntax.parse_context, args.file)
    limit = _max_states(args.max_states)
    if args.property == "consistency":
        verdict = safety.is_consistent(ctx)
    elif args.property == "liveness":
        verdict = safety.is_live(ctx, limit, args.payload_sub)
    else:
        verdict = safety.is_deadlock_free(ctx, limit, args.payload_sub)
    if args.dot:
        lts = semantics.reachable(ctx, limit, args.payload_sub)
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(lts.to_dot())
    _print_verdict(verdict, args.json)
    return EXIT_OK if verdict.holds else EXIT_FAIL


def cmd_typecheck(args) -> int:
    proc = _load(syntax.parse_process, args.file)
    ctx = _load(syntax.parse_context, args.ctx)
    rely = _load(syntax.parse_context, args.rely) if args.rely else EMPTY
    limit = _max_states(args.max_states)
    if args.judgement:
        verdict = typecheck(Judgement(ProcessEnv(), ctx, rely, proc), args.liveness_at, limit)
    else:
        verdict = check_system(proc, ctx, rely, args.liveness_at, limit)
    _print_verdict(verdict, args.json)
    return EXIT_OK if verdict.holds else EXIT_FAIL


def cmd_sr(args) -> int:
    proc = _load(syntax.parse_process, args.file)
    ctx = _load(syntax.parse_context, args.ctx)
    limit = _max_states(args.max_states)
    initial = check_system(proc, ctx, EMPTY, args.liveness_at, limit)
    if not initial.holds:
        _print_verdict(initial, args.json)
        return EXIT_FAIL
    report = sr_probe(proc, ctx, args.depth, args.liveness_at, limit)
    if args.json:
        _dump(report.to_json())
    else:
        print(f"explored: {report.explored}")
        print(f"reductions: {report.reductions}")
        print(f"truncated: {'yes' if report.truncated else 'no'}")
        print(f"failures: {len(report.failures)}")
        for f in report.failures:
            print(f"  error: {f['error']}")
            for a in f["trace"]:
                print(f"    {a}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_lts(args) -> int:
    ctx = _load(syntax.parse_context, args.file)
    lts = semantics.reachable(ctx, _max_states(args.max_states), args.payload_sub)
    if args.dot:
        sys.stdout.write(lts.to_dot())
    elif args.json:
        _dump(lts.to_json())
    else:
        print(f"states: {len(lts.states)}, edges: {len(lts.edges)}")
        for i, s in enumerate(lts.states):
            print(f"  {i}: {syntax.pretty(s) or '(empty)'}")
        for s, a, d in lts.edges:
            print(f"  {s} --[{a}]--> {d}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpst", description="Multiparty session type workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project a global type onto its roles")
    p.add_argument("file")
    p.add_argument("--role")
    p.add_argument("--session", default="s")
    p.add_argument("--merge", choices=[projection.FULL, projection.PLAIN], default=projection.FULL)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("check", help="check a safety property of a typing context")
    p.add_argument("file")
    prop = p.add_mutually_exclusive_group(required=True)
    prop.add_argument("--liveness", dest="property", action="store_const", const="liveness")
    prop.add_argument("--consistency", dest="property", action="store_const", const="consistency")
    prop.add_argument("--deadlock", dest="property", action="store_const", const="deadlock")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dot", metavar="OUT")
    p.add_argument("--max-states", type=int)
    p.add_argument("--payload-sub", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("typecheck", help="type-check a process against a context")
    p.add_argument("file")
    p.add_argument("--ctx", required=True)
    p.add_argument("--rely")
    p.add_argument("--liveness-at", choices=["res", "top", "all"], default="res")
    p.add_argument("--judgement", action="store_true",
                   help="check the bare judgement without the top-level liveness condition")
    p.add_argument("--max-states", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_typecheck)

    p = sub.add_parser("sr", help="probe subject reduction by exhaustive exploration")
    p.add_argument("file")
    p.add_argument("--ctx", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--liveness-at", choices=["res", "top", "all"], default="res")
    p.add_argument("--max-states", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sr)

    p = sub.add_parser("lts", help="dump the reachable context transition system")
    p.add_argument("file")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true")
    fmt.add_argument("--json", action="store_true")
    p.add_argument("--max-states", type=int)
    p.add_argument("--payload-sub", action="store_true")
    p.set_defaults(func=cmd_lts)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, WellFormednessError, DuplicateEndpoint, UnboundVariable,
            OverlappingEndpoint, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StateLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except TypingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
