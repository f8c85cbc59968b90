"""Command-line interface: certify, scan, cf, simulate.

Exit codes: 0 member (or completed scan/simulation), 1 not certified,
2 depth-limited or undecidable, 3 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .certifier import (
    CertifyOptions,
    InputParse,
    certificate_to_json,
    certify_area,
    certify_surd,
    parse_area,
    parse_surd,
    parse_tail,
    replay,
)
from .cfrac import PeriodTooLong, cf_expand_stream, cf_expand_surd, convergents, parity_check
from .numerics.interval import to_decimal_str
from .numerics.precision import PrecisionExhausted, PrecisionPolicy
from .numerics.quadratic import PerfectSquareD, SurdError
from .rotation import RotationNumber, area_exceeds_minimum, gamma_enclosure_from_area
from .verdict import Verdict

EXIT_OK, EXIT_NOT_CERTIFIED, EXIT_UNDECIDED, EXIT_INPUT = 0, 1, 2, 3

OUTCOME_EXIT = {
    "MemberOfA": EXIT_OK,
    "NotCertified": EXIT_NOT_CERTIFIED,
    "DepthLimited": EXIT_UNDECIDED,
    "Undecidable": EXIT_UNDECIDED,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_precision(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prec", type=int, default=128, help="starting precision in bits")
    p.add_argument("--max-prec", type=int, default=8192, help="precision cap in bits")


def _add_input(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--surd", help="rotation number (P + sqrt(D))/Q given as P,D,Q")
    g.add_argument("--area", help="section area as an exact decimal")
    return g


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sectioncert", description="Certify rigidity conditions for tangent section areas.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", help="certify one rotation number or area")
    g = _add_input(c)
    g.add_argument("--replay", metavar="JSON", help="re-run the input recorded in a certificate")
    _add_precision(c)
    c.add_argument("--depth", type=int, default=1000, help="k range checked in area mode")
    c.add_argument("--tail", default="auto", help="auto | bounded:M | poly2")
    c.add_argument("--reductions", choices=("auto", "always", "never"), default="auto")
    c.add_argument("--reduction-threshold", type=int, default=64)
    c.add_argument("--direct-cap", type=int, default=100_000)
    c.add_argument("--j0-depth", type=int, default=64)
    c.add_argument("--json", metavar="PATH", help="write the certificate here")
    c.add_argument("--verbose", "-v", action="store_true")

    s = sub.add_parser("scan", help="classify a grid or family of rotation numbers")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--grid", metavar="LO,HI,STEPS", help="even grid of rotation numbers")
    src.add_argument("--surd-family", metavar="D,QLO,QHI", type=_int_list)
    src.add_argument("--cf-family", metavar="PREFIX", type=_int_list, help="prefix digits a_0,a_1,...")
    s.add_argument("--p-range", metavar="PLO,PHI", type=_int_list)
    s.add_argument("--digits", type=_int_list, default=(2, 4, 6), help="digit set for --cf-family")
    s.add_argument("--cf-depth", type=int, default=8, help="total preperiod length for --cf-family")
    s.add_argument("--period", type=_int_list, default=(2,))
    _add_precision(s)
    s.add_argument("--depth", type=int, default=1000)
    s.add_argument("--direct-cap", type=int, default=100_000)
    s.add_argument("--parallel", type=int, default=1)
    s.add_argument("--limit", type=int)
    s.add_argument("--csv", metavar="PATH")
    s.add_argument("--json", metavar="PATH")
    s.add_argument("--verbose", "-v", action="store_true")

    f = sub.add_parser("cf", help="continued fraction, convergents and parity")
    _add_input(f)
    f.add_argument("--terms", type=int, default=12)
    _add_precision(f)

    m = sub.add_parser("simulate", help="iterate the tangent-chord map on a circle or profile")
    mg = m.add_mutually_exclusive_group(required=True)
    mg.add_argument("--radius", type=float)
    mg.add_argument("--surd")
    mg.add_argument("--area")
    m.add_argument("--steps", type=int, default=100)
    m.add_argument("--profile", default="circle", help="circle | ellipse:A,B (boundary used for the chord map)")
    m.add_argument("--csv", metavar="PATH")
    return parser


def _policy(args) -> PrecisionPolicy:
    if args.prec < 2 or args.max_prec < 2:
        raise UsageError("precision must be at least 2 bits")
    if args.prec > args.max_prec:
        raise UsageError("--prec exceeds --max-prec")
    return PrecisionPolicy(args.prec, args.max_prec)


def _options(args) -> CertifyOptions:
    parse_tail(args.tail)
    return CertifyOptions(
        policy=_policy(args),
        tail=args.tail,
        depth=args.depth,
        j0_search_depth=args.j0_depth,
        direct_check_cap=args.direct_cap,
        reductions=args.reductions,
        reduction_threshold=args.reduction_threshold,
    )


def _write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def cmd_certify(args, out) -> int:
    if args.replay:
        try:
            with open(args.replay, encoding="utf-8") as fh:
                doc = json.load(fh)
            cert = replay(doc)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot replay {args.replay}: {exc}") from exc
    else:
        options = _options(args)
        if args.surd is not None:
            cert = certify_surd(parse_surd(args.surd), options)
        else:
            A = parse_area(args.area)
            cert = certify_area(A, options)
            cert.input["text"] = args.area
    print(cert.summary(), file=out)
    if args.verbose:
        for r in cert.checks:
            m = r.margin
            margin = "" if m is None else to_decimal_str(m, 6, "down")
            print(f"  {r.kind}{list(r.indices)} {r.verdict.value} margin={margin} prec={r.precision}", file=out)
        for n in cert.notes:
            print(f"  note: {n}", file=out)
    if args.json:
        _write_json(args.json, certificate_to_json(cert))
    return OUTCOME_EXIT[cert.outcome.status]


def cmd_scan(args, out) -> int:
    from . import scanner

    if args.grid:
        try:
            lo, hi, steps = args.grid.split(",")
            source = scanner.GammaGrid(float(lo), float(hi), int(steps))
        except ValueError as exc:
            raise UsageError(f"bad --grid: {exc}") from exc
    elif args.surd_family:
        if len(args.surd_family) != 3:
            raise UsageError("--surd-family takes D,QLO,QHI")
        D, qlo, qhi = args.surd_family
        prange = tuple(args.p_range) if args.p_range else None
        source = scanner.SurdFamily(D, (qlo, qhi), prange)
    else:
        try:
            source = scanner.CfFamily(tuple(args.cf_family), tuple(args.digits), args.cf_depth, tuple(args.period))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    options = CertifyOptions(policy=_policy(args), depth=args.depth, direct_check_cap=args.direct_cap)
    if args.parallel < 1:
        raise UsageError("--parallel must be positive")
    result = scanner.run_scan(scanner.ScanJob(source, options, args.parallel, args.limit))
    if args.verbose:
        for r in result.records:
            print(f"{r.id:5d} {r.label:32s} {r.outcome} {r.first_fail}", file=out)
    print(f"{len(result.records)} candidates: " + ", ".join(f"{k} {v}" for k, v in result.summary.items()), file=out)
    if args.csv:
        scanner.emit(result.records, args.csv, "csv")
    if args.json:
        scanner.emit(result.records, args.json, "json")
    return EXIT_OK


def cmd_cf(args, out) -> int:
    policy = _policy(args)
    if args.surd is not None:
        s = parse_surd(args.surd)
        cf = cf_expand_surd(s)
        print(f"gamma = {s}", file=out)
        print(f"preperiod {list(cf.preperiod)} period {list(cf.period)}", file=out)
    else:
        A = parse_area(args.area)
        if area_exceeds_minimum(A, policy) is not Verdict.TRUE:
            raise InputParse("area must exceed 8*omega_3")
        rot = RotationNumber(gamma_enclosure_from_area(A), area=A)
        stream = cf_expand_stream(rot.gamma, args.terms + 1, policy)
        cf = stream.as_continued_fraction()
        print(f"digits {list(cf.coefficients)} (tail unknown)", file=out)
    n = min(args.terms, len(cf.coefficients) - 1) if not cf.is_periodic else args.terms
    table = convergents(cf, n)
    print(f"{'j':>3} {'a_j':>6} {'p_j':>14} {'q_j':>14} {'q~_j':>14}", file=out)
    for row in table.rows:
        qt = "" if row.q_tilde is None else str(row.q_tilde)
        print(f"{row.j:>3} {cf.digit(row.j):>6} {row.p:>14} {row.q:>14} {qt:>14}", file=out)
    report = parity_check(cf)
    print(f"parity: {report.verdict.value}", file=out)
    for reason in report.reasons:
        print(f"  {reason}", file=out)
    return EXIT_OK


def _profile(text: str):
    from .geometry import ConvexProfile

    if text == "circle":
        return None
    if text.startswith("ellipse:"):
        try:
            a, b = (float(t) for t in text.split(":", 1)[1].split(","))
        except ValueError as exc:
            raise UsageError(f"bad profile {text!r}") from exc
        body = ConvexProfile.ellipse(a, b)
        problems = body.validate()
        if problems:
            raise UsageError("; ".join(problems))
        return body
    raise UsageError(f"unknown profile {text!r}")


def cmd_simulate(args, out) -> int:
    from . import geometry

    if args.radius is not None:
        R = args.radius
    else:
        if args.surd is not None:
            rot = RotationNumber(parse_surd(args.surd))
        else:
            A = parse_area(args.area)
            rot = RotationNumber(gamma_enclosure_from_area(A), area=A)
        R = float(rot.radius(64).mid())
    if not R > 1 or not math.isfinite(R):
        raise UsageError("radius must exceed 1")
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    body = _profile(args.profile)
    rows = geometry.simulate_rows(R, args.steps, body)
    cols = ["k", "x", "y", "angle", "angle_step", "cubic_residual"]
    steps = [r["angle_step"] for r in rows[1:]]
    res = [r["cubic_residual"] for r in rows if not math.isnan(r["cubic_residual"])]
    print(f"R = {R!r}, {len(rows)} points", file=out)
    if steps:
        expected = f" expected {2 * math.acos(1 / R)!r}" if body is None else ""
        print(f"angle step: min {min(steps)!r} max {max(steps)!r}{expected}", file=out)
    if res:
        print(f"max cubic residual {max(res):.3e}", file=out)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return EXIT_OK


COMMANDS = {"certify": cmd_certify, "scan": cmd_scan, "cf": cmd_cf, "simulate": cmd_simulate}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except PerfectSquareD as exc:
        print(f"error: rational input: {exc}", file=sys.stderr)
    except (UsageError, InputParse, SurdError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (PrecisionExhausted, PeriodTooLong) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
