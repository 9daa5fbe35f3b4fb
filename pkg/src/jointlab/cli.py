"""Command-line front end.

Subcommands: gen, count, joints, histogram, planecover, fit, classify,
trace.  Standard output carries only data (tab-separated where tabular);
diagnostics go to stderr.  Exit codes: 0 ok, 2 parse/usage, 3 precondition,
4 hypothesis, 5 config.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import constructions, formats, incidence, pipeline, polymethod
from .errors import (
    ConfigError,
    DegenerateInputError,
    HypothesisError,
    ParseError,
    PreconditionError,
    ShapeError,
)

EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_HYPOTHESIS = 4
EXIT_CONFIG = 5


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_instance(path: str):
    return formats.parse_instance(_read_text(path))


def _emit(text: str) -> None:
    sys.stdout.write(text)


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "grid":
        inst = constructions.gen_grid(_require(args, "k"))
    elif kind == "st":
        inst = constructions.gen_st_planar(_require(args, "n"))
    elif kind == "joint-lb-small":
        inst = constructions.gen_joint_lb_small(_require(args, "n"))
    elif kind == "joint-lb-stacked":
        inst = constructions.gen_joint_lb_stacked(_require(args, "n"), _require(args, "t"))
    elif kind == "paraboloid":
        inst = constructions.gen_paraboloid(_require(args, "r"))
    else:
        inst = constructions.gen_bourgain_grid(_require(args, "k"))
    _emit(
        formats.serialize_instance(
            inst.points, inst.lines, predicted=inst.predicted, header=inst.tag
        )
    )
    return 0


def _require(args, name: str) -> int:
    value = getattr(args, name)
    if value is None:
        raise ParseError(f"gen {args.kind} requires --{name}")
    return value


def cmd_count(args) -> int:
    pts, lns = _load_instance(args.instance)
    s = incidence.build(pts, lns)
    _emit(f"num_points\t{len(s.points)}\n")
    _emit(f"num_lines\t{len(s.lines)}\n")
    _emit(f"incidences\t{s.incidences}\n")
    return 0


def cmd_joints(args) -> int:
    _, lns = _load_instance(args.instance)
    js = incidence.joints(lns)
    _emit(f"joints\t{len(js)}\n")
    for a in js:
        _emit(
            "joint\t"
            f"{formats.format_scalar(a.x)}\t{formats.format_scalar(a.y)}\t{formats.format_scalar(a.z)}\n"
        )
    return 0


def cmd_histogram(args) -> int:
    pts, lns = _load_instance(args.instance)
    s = incidence.build(pts, lns)
    hist = incidence.histogram(s)
    report = incidence.cor13_report(hist, len(s.lines))
    _emit("k\tM_ge_k\tI_ge_k\tlow_range\tM_bound_holds\tI_bound_holds\n")
    for row in report:
        _emit(
            f"{row.k}\t{row.m_ge}\t{row.i_ge}\t{int(row.low_range)}"
            f"\t{int(row.m_bound_holds)}\t{int(row.i_bound_holds)}\n"
        )
    return 0


def cmd_planecover(args) -> int:
    pts, lns = _load_instance(args.instance)
    s = incidence.build(pts, lns)
    total = 0
    for pi, a in enumerate(s.points):
        cp = incidence.plane_cover(a, [s.lines[li] for li in s.incident_lines[pi]])
        total += cp
        _emit(
            "cp\t"
            f"{formats.format_scalar(a.x)}\t{formats.format_scalar(a.y)}\t{formats.format_scalar(a.z)}\t{cp}\n"
        )
    _emit(f"plane_cover_sum\t{total}\n")
    return 0


def cmd_fit(args) -> int:
    pts, _ = _load_instance(args.instance)
    p = polymethod.fit_vanishing_poly(pts)
    _emit(formats.serialize_poly(p))
    return 0


def cmd_classify(args) -> int:
    pts, lns = _load_instance(args.instance)
    p = formats.parse_poly(_read_text(args.poly))
    for a in pts:
        cls = polymethod.classify_point(p, a)
        _emit(
            "point\t"
            f"{formats.format_scalar(a.x)}\t{formats.format_scalar(a.y)}\t{formats.format_scalar(a.z)}"
            f"\t{cls.kind}\n"
        )
    for ln in lns:
        cls = polymethod.classify_line(p, ln)
        d = ln.direction
        _emit(
            "line\t"
            f"{formats.format_scalar(ln.anchor.x)}\t{formats.format_scalar(ln.anchor.y)}"
            f"\t{formats.format_scalar(ln.anchor.z)}\t{d[0]}\t{d[1]}\t{d[2]}\t{cls.kind}\n"
        )
    return 0


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}: {e}") from None


def cmd_trace(args) -> int:
    pts, lns = _load_instance(args.instance)
    if args.kind == "bourgain":
        records = pipeline.trace_bourgain((pts, lns))
    else:
        cfg = pipeline.PipelineConfig(
            c=args.c,
            t=args.t,
            A=args.A,
            b=args.b,
            n0=args.n0,
            max_retries=args.max_retries,
            rng_seed=args.seed,
            no_sampling=args.no_sampling,
        )
        tracer = pipeline.trace_thm9 if args.kind == "thm9" else pipeline.trace_thm11
        records = tracer((pts, lns), cfg)
    _emit(pipeline.serialize_trace(records))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jointlab",
        description="Exact incidence-geometry laboratory for points and lines in 3-space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an extremal construction")
    gen.add_argument(
        "kind",
        choices=["grid", "st", "joint-lb-small", "joint-lb-stacked", "paraboloid", "bourgain"],
    )
    gen.add_argument("--k", type=int, help="grid side (grid, bourgain)")
    gen.add_argument("--n", type=int, help="planar parameter N (st, joint-lb-*)")
    gen.add_argument("--t", type=int, help="number of stacked levels (joint-lb-stacked)")
    gen.add_argument("--r", type=int, help="rulings per family (paraboloid)")
    gen.set_defaults(func=cmd_gen)

    for name, func in (
        ("count", cmd_count),
        ("joints", cmd_joints),
        ("histogram", cmd_histogram),
        ("planecover", cmd_planecover),
        ("fit", cmd_fit),
    ):
        p = sub.add_parser(name)
        p.add_argument("instance", help="instance file, or - for stdin")
        p.set_defaults(func=func)

    classify = sub.add_parser("classify")
    classify.add_argument("instance", help="instance file, or - for stdin")
    classify.add_argument("--poly", required=True, help="polynomial file")
    classify.set_defaults(func=cmd_classify)

    trace = sub.add_parser("trace")
    trace.add_argument("kind", choices=["thm9", "thm11", "bourgain"])
    trace.add_argument("instance", help="instance file, or - for stdin")
    trace.add_argument("--seed", type=int, default=0)
    trace.add_argument("--t", type=_fraction_arg, default=Fraction(1, 1000))
    trace.add_argument("--c", type=_fraction_arg, default=Fraction(1024))
    trace.add_argument("--A", type=_fraction_arg, default=Fraction(5000))
    trace.add_argument("--b", type=_fraction_arg, default=Fraction(1))
    trace.add_argument("--n0", type=int, default=10)
    trace.add_argument("--max-retries", type=int, default=32, dest="max_retries")
    trace.add_argument("--no-sampling", action="store_true", dest="no_sampling")
    trace.set_defaults(func=cmd_trace)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"jointlab: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, DegenerateInputError, ShapeError) as e:
        print(f"jointlab: precondition error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except HypothesisError as e:
        print(f"jointlab: hypothesis error: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ConfigError as e:
        print(f"jointlab: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
