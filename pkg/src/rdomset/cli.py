"""Command line front end.

Exit status: 0 on success, 1 when a verification fails, 2 on usage or
input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .balls import build_augmented, hit_sets, parse_balls
from .cover import (
    METHODS,
    CoverError,
    ExactBudget,
    parse_solution,
    rdom_instance,
    solution_to_json,
    solve_instance,
    verify_cover,
)
from .graph import GraphError, gen_planar, parse_graph
from .shallow import BallSystem, cells_report, report_passed
from .support import (
    DIRECTED_PIPELINE,
    UNDIRECTED_SHORTCUT,
    build_dual_support,
    build_intersection_support,
    verify_dual_support,
    verify_intersection_support,
    verify_minor_preservation,
)
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(text: str, path: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_gen(args) -> int:
    w, h = args.grid
    g = gen_planar(args.seed, w, h, args.keep_prob, args.max_len)
    _write(g.to_json(), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    g = parse_graph(_read(args.graph))
    inst = rdom_instance(g, args.radius)
    cover = solve_instance(inst, args.method, args.seed, Fraction(args.eps), ExactBudget())
    feasible = verify_cover(inst, cover)
    _write(solution_to_json(cover, feasible), args.output)
    return EXIT_OK if feasible else EXIT_FAIL


def cmd_verify(args) -> int:
    g = parse_graph(_read(args.graph))
    cover, claimed = parse_solution(_read(args.solution))
    inst = rdom_instance(g, args.radius)
    ok = verify_cover(inst, cover)
    if ok != claimed:
        print(f"solution claims feasible={claimed} but verification gives {ok}", file=sys.stderr)
    if not ok:
        print("solution is not a valid r-dominating set of the stated weight", file=sys.stderr)
    return EXIT_OK if ok and claimed else EXIT_FAIL


def cmd_support(args) -> int:
    g = parse_graph(_read(args.graph))
    balls = parse_balls(_read(args.balls))
    if args.blue is None:
        s = build_dual_support(g, balls)
        checks = [] if args.no_verify else [
            verify_dual_support(s, hit_sets(build_augmented(g, balls))),
            verify_minor_preservation(g, s),
        ]
    else:
        blue = parse_balls(_read(args.blue))
        s = build_intersection_support(g, balls, blue, args.mode)
        checks = [] if args.no_verify else [
            verify_intersection_support(s, balls, blue, g),
            verify_minor_preservation(g, s),
        ]
    _write(s.to_json(), args.output)
    for report in checks:
        for failure in report.failures:
            print(f"support check failed: {failure}", file=sys.stderr)
    return EXIT_OK if all(checks) else EXIT_FAIL


def cmd_cells(args) -> int:
    g = parse_graph(_read(args.graph))
    balls = parse_balls(_read(args.balls))
    report = cells_report(BallSystem(g, balls))
    _write(json.dumps(report, indent=2), args.output)
    if args.no_verify or report_passed(report):
        return EXIT_OK
    print("cells report contains failed checks", file=sys.stderr)
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rdomset", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random planar grid instance")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--grid", type=int, nargs=2, metavar=("W", "H"), required=True)
    g.add_argument("--keep-prob", type=float, default=0.5)
    g.add_argument("--max-len", type=int, default=1)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="approximate a minimum-weight r-dominating set")
    s.add_argument("--graph", required=True)
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--method", choices=METHODS, default="quasi")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--eps", type=str, default="0.1")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    su = sub.add_parser("support", help="build a dual or intersection support")
    su.add_argument("--graph", required=True)
    su.add_argument("--balls", required=True, help="balls (red balls with --blue)")
    su.add_argument("--blue", help="blue balls; switches to the intersection support")
    su.add_argument("--mode", choices=(DIRECTED_PIPELINE, UNDIRECTED_SHORTCUT), default=DIRECTED_PIPELINE)
    su.add_argument("--no-verify", action="store_true")
    su.add_argument("-o", "--output")
    su.set_defaults(func=cmd_support)

    c = sub.add_parser("cells", help="cell profile, encodings and G_D checks")
    c.add_argument("--graph", required=True)
    c.add_argument("--balls", required=True)
    c.add_argument("--no-verify", action="store_true")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_cells)

    v = sub.add_parser("verify", help="re-check a solution against its instance")
    v.add_argument("--graph", required=True)
    v.add_argument("--solution", required=True)
    v.add_argument("--radius", type=int, required=True)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "solve":
        try:
            eps = Fraction(args.eps)
        except ValueError:
            parser.error("--eps must be a number")
        if not 0 < eps <= 1:
            parser.error("--eps must lie in (0, 1]")
    if getattr(args, "radius", 0) < 0:
        parser.error("--radius must be non-negative")
    try:
        return args.func(args)
    except (GraphError, CoverError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
