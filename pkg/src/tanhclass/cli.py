"""Command-line interface.

Exit codes: 0 success / positive verdict, 1 negative verdict, 2 bad input,
3 precondition violated.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import formats
from .canonical import canonicalise, equivalent
from .characterisation import generate_instance
from .core import Shape, ToleranceConfig, functions_equal
from .errors import (
    DiscreteClassError,
    EquivalenceError,
    FormatError,
    PreconditionError,
    ShapeError,
)
from .paths import connect, seven_segment_path, verify_path
from .reducibility import find_redundancy, rank, reduce_fully

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    defaults = ToleranceConfig()

    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--weight-tol", type=float, default=default(defaults.weight_tol),
                        help="absolute tolerance for weight comparisons")
    parser.add_argument("--func-tol", type=float, default=default(defaults.func_tol),
                        help="absolute tolerance for output comparisons")
    parser.add_argument("--samples", type=int, default=default(defaults.sample_count),
                        help="number of sampled inputs for function comparisons")
    parser.add_argument("--radius", type=float, default=default(defaults.sample_radius),
                        help="inputs are sampled from [-radius, radius]^n")
    parser.add_argument("--seed", type=int, default=default(0))
    parser.add_argument("--verbose", "-v", action="store_true", default=default(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tanhclass",
        description="Canonicalise, compare and connect single-hidden-layer tanh network parameters.",
    )
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canon", parents=[common], help="write the canonical form of a parameter")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--trace", help="also write the canonicalisation record here")

    p = sub.add_parser("equiv", parents=[common], help="decide functional equivalence")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--sampled", action="store_true",
                   help="compare sampled outputs instead; allows different h")

    p = sub.add_parser("rank", parents=[common], help="print the rank of a parameter")
    p.add_argument("input")

    p = sub.add_parser("reduce", parents=[common], help="write an equivalent parameter with rank units")
    p.add_argument("input")
    p.add_argument("-o", "--output")

    p = sub.add_parser("path", parents=[common], help="write an equal-function path between two parameters")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-o", "--output")
    p.add_argument("--short", action="store_true", help="at most 7 segments (needs rank <= h/2)")

    p = sub.add_parser("verify-path", parents=[common], help="check that a path file stays in the class")
    p.add_argument("path_file")
    p.add_argument("--samples-per-segment", type=int, default=9)

    p = sub.add_parser("gen", parents=[common], help="generate a parameter with a given rank")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("-o", "--output")
    return parser


def _tol(args) -> ToleranceConfig:
    return ToleranceConfig(args.weight_tol, args.func_tol, args.samples, args.radius)


def _emit(data, output: str | None) -> None:
    if output:
        formats.write_json(data, output)
    else:
        sys.stdout.write(formats.dumps(data))


def _info(message: str, output: str | None) -> None:
    # With JSON on stdout, human-readable lines go to stderr.
    print(message, file=sys.stdout if output else sys.stderr)


def cmd_canon(args) -> int:
    w = formats.load_parameter(args.input)
    record = canonicalise(w, _tol(args))
    _emit(formats.parameter_to_dict(record.canonical), args.output)
    if args.trace:
        formats.write_json(formats.record_to_dict(record), args.trace)
    if args.verbose:
        print(f"rank={record.rank} zeroed={sorted(record.zeroed)}", file=sys.stderr)
    return EXIT_OK


def cmd_equiv(args) -> int:
    w, w2 = formats.load_parameter(args.a), formats.load_parameter(args.b)
    tol = _tol(args)
    if args.sampled:
        same = functions_equal(w, w2, tol, args.seed)
        print("functionally equal (sampled)" if same else "not functionally equal (sampled)")
    else:
        same = equivalent(w, w2, tol)
        print("equivalent" if same else "not equivalent")
    return EXIT_OK if same else EXIT_NEGATIVE


def cmd_rank(args) -> int:
    w = formats.load_parameter(args.input)
    print(rank(w, _tol(args)))
    return EXIT_OK


def cmd_reduce(args) -> int:
    w = formats.load_parameter(args.input)
    tol = _tol(args)
    reduced = reduce_fully(w, tol)
    _emit(formats.parameter_to_dict(reduced), args.output)
    same = functions_equal(w, reduced, tol, args.seed)
    verdict = "functionally equal (sampled)" if same else "NOT functionally equal (sampled)"
    _info(f"h={w.h} -> h={reduced.h}: {verdict}", args.output)
    return EXIT_OK


def cmd_path(args) -> int:
    w, w2 = formats.load_parameter(args.a), formats.load_parameter(args.b)
    tol = _tol(args)
    build = seven_segment_path if args.short else connect
    path = build(w, w2, tol)
    _emit(formats.path_to_dict(path, w), args.output)
    _info(f"segments: {path.segment_count}", args.output)
    return EXIT_OK


def cmd_verify_path(args) -> int:
    path, reference = formats.load_path(args.path_file)
    report = verify_path(path, reference, _tol(args), args.samples_per_segment, args.seed)
    print(f"max_deviation: {report.max_deviation:.6e}")
    if args.verbose:
        for s, dev in enumerate(report.segment_deviations):
            print(f"  segment {s:4d}  {dev:.6e}")
    if not report.ok:
        print(f"worst_segment: {report.worst_segment}")
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_gen(args) -> int:
    tol = _tol(args)
    try:
        shape = Shape(args.n, args.m, args.h)
    except ShapeError as exc:
        raise FormatError(str(exc)) from exc
    if not 0 <= args.rank <= args.h:
        raise FormatError(f"rank must be in 0..{args.h}")
    w = generate_instance(shape, args.rank, args.seed, tol)
    if rank(w, tol) != args.rank:
        raise RuntimeError("generated parameter has the wrong rank")
    if args.verbose and find_redundancy(w, tol=tol) is None:
        print("irreducible", file=sys.stderr)
    _emit(formats.parameter_to_dict(w), args.output)
    return EXIT_OK


COMMANDS = {
    "canon": cmd_canon,
    "equiv": cmd_equiv,
    "rank": cmd_rank,
    "reduce": cmd_reduce,
    "path": cmd_path,
    "verify-path": cmd_verify_path,
    "gen": cmd_gen,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except EquivalenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except DiscreteClassError as exc:
        print(f"error: class is discrete ({exc})", file=sys.stderr)
        return EXIT_PRECONDITION
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (FormatError, ShapeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
