"""Command-line front door.

Subcommands: mutate, minimize, fan, verify, render.  Exit status 2 on
input errors, 1 when a verifier reports a violation, 0 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .checks import CHECK_NAMES, run_checks
from .errors import CyclicFanError
from .io import MatrixFormatError, format_matrix, load_matrix
from .matrices import decreasing_sequence
from .render import LAYERS, render_fan
from .seeds import iter_seeds, replay, seed_record
from .tolerances import EPS_EQ, EPS_SIGN
from .words import check_reduced


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("matrix", help="matrix file (plain rows or JSON)")
    p.add_argument("--eps-sign", type=float, default=EPS_SIGN, help="sign/zero tolerance")
    p.add_argument("--eps-eq", type=float, default=EPS_EQ, help="residual tolerance")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cyclicfan",
        description="Mutation dynamics and G-fan bounds of rank-3 cluster-cyclic matrices",
    )
    ap.add_argument("--version", action="version", version=f"cyclicfan {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mutate", help="print B^w, C^w, G^w, signs and labels at a word")
    _add_common(p)
    p.add_argument("word", nargs="*", type=int, help="mutation word, e.g. 1 2 1")

    p = sub.add_parser("minimize", help="print the decreasing sequence and minimum matrix")
    _add_common(p)
    p.add_argument("--max-len", type=int, default=64)

    p = sub.add_parser("fan", help="stream seed records breadth-first as JSON lines")
    _add_common(p)
    p.add_argument("--depth", type=int, default=6)

    p = sub.add_parser("verify", help="run the theorem verifiers")
    _add_common(p)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument(
        "--checks",
        default=",".join(CHECK_NAMES),
        help="comma list from: " + ", ".join(CHECK_NAMES),
    )
    p.add_argument("--samples", type=int, default=64, help="interior samples per open set")
    p.add_argument("--seed", type=int, default=0, help="sampling sequence offset")

    p = sub.add_parser("render", help="write an SVG of the projected fan")
    _add_common(p)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument(
        "--layers",
        default="orthants,gcones",
        help="comma list from: " + ", ".join(LAYERS),
    )
    p.add_argument("-o", "--output", default="fan.svg")
    return ap


def _print_matrix(title: str, m) -> None:
    print(title)
    for row in np.asarray(m, dtype=float):
        print("  " + " ".join(f"{x:.10g}" for x in row))


def cmd_mutate(args) -> int:
    b = load_matrix(args.matrix, args.eps_sign, args.eps_eq)
    word = check_reduced(args.word)
    seed = replay(b, word)
    print(f"word: {' '.join(map(str, word)) if word else '(empty)'}")
    if seed.position.st_word is not None:
        print(f"st-coordinates: [{seed.position.i}]{seed.position.st_word or ''}")
    _print_matrix("B^w:", seed.b.b)
    _print_matrix("C^w:", seed.c)
    _print_matrix("G^w:", seed.g)
    print("eps:", " ".join(f"{e:+d}" for e in seed.eps))
    if seed.kst:
        print("kst:", " ".join(map(str, seed.kst)))
    return 0


def cmd_minimize(args) -> int:
    b = load_matrix(args.matrix, args.eps_sign, args.eps_eq)
    result = decreasing_sequence(b, args.max_len, args.eps_sign)
    if not result.finite:
        print(f"decreasing sequence did not terminate within {args.max_len} steps")
        print("prefix: " + " ".join(map(str, result.word)))
        return 1
    print(" ".join(map(str, result.word)) if result.word else "(already minimum)")
    print(format_matrix(result.matrix))
    return 0


def cmd_fan(args) -> int:
    b = load_matrix(args.matrix, args.eps_sign, args.eps_eq)
    for seed in iter_seeds(b, args.depth):
        print(json.dumps(seed_record(seed)))
    return 0


def cmd_verify(args) -> int:
    b = load_matrix(args.matrix, args.eps_sign, args.eps_eq)
    names = [tok.strip() for tok in args.checks.split(",") if tok.strip()]
    for tok in names:
        if tok not in CHECK_NAMES:
            raise MatrixFormatError(f"unknown check {tok!r}; choose from {CHECK_NAMES}")
    reports = run_checks(
        b, args.depth, names, args.eps_sign, args.eps_eq, args.samples, args.seed
    )
    for rep in reports:
        for line in rep.lines():
            print(line)
    print("--- machine ---")
    print(json.dumps([rep.to_dict() for rep in reports]))
    return 0 if all(rep.ok for rep in reports) else 1


def cmd_render(args) -> int:
    b = load_matrix(args.matrix, args.eps_sign, args.eps_eq)
    layers = tuple(tok.strip() for tok in args.layers.split(",") if tok.strip())
    render_fan(b, args.depth, layers, args.output, args.eps_sign)
    print(f"wrote {args.output}")
    return 0


_COMMANDS = {
    "mutate": cmd_mutate,
    "minimize": cmd_minimize,
    "fan": cmd_fan,
    "verify": cmd_verify,
    "render": cmd_render,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (CyclicFanError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
