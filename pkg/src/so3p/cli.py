r"""Command-line front end.

Subcommands: classify (square class of a number), rotate (angles or a
quaternion to a certified rotation matrix), compose (product of two
matrices with recertification), decompose (matrix back to nautical
angles), haar mass / integrate / sample, and verify (the identity
suites).

Output goes to stdout; diagnostics go to stderr.  `--format json` wraps
every result in a schema-versioned object whose numbers are strings, so
consumers never round an exact rational through a float.  Exit codes:
0 success, 1 verification failure, 2 parse failure or bad prime,
3 certificate failure, 4 ambiguity, 5 malformed region.

Identical configuration and seed produce identical output bytes.
`--threads` only fans out sampling batches; it never changes results.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import haar, verify
from .errors import AmbiguityError, CertificateError, RegionError
from .formats import (
    format_angles,
    format_matrix_json,
    format_number,
    format_rational,
    matrix_from_obj,
    matrix_rows,
    parse_angles,
    parse_matrix_json,
    parse_number,
    parse_quat,
    parse_region,
)
from .padic import INF, PrimeCtx, SquareClass, canonical_units, is_prime, square_class
from .rotation import Rot3, cardano_matrix, decompose_cardano, quat_to_rotation

_CLASS_NAMES = {
    SquareClass.ONE: "One",
    SquareClass.U: "U",
    SquareClass.P: "P",
    SquareClass.UP: "UP",
}


def _ctx(args) -> PrimeCtx:
    p = args.prime
    try:
        return canonical_units(p)
    except ValueError:
        if is_prime(p) and p != 2:
            raise
        if p == 2:
            raise ValueError("p = 2 is out of scope; need an odd prime") from None
        raise ValueError(f"not prime: {p}") from None


def _settings(args) -> None:
    if args.precision < 4:
        raise ValueError(f"precision must be at least 4, got {args.precision}")
    if not 0 <= args.seed < 2**64:
        raise ValueError("seed must fit in 64 bits")
    if args.threads < 1:
        raise ValueError("threads must be at least 1")


def _emit(args, text: str, payload: dict) -> None:
    if args.format == "json":
        print(json.dumps({"schema": 1, **payload}))
    else:
        print(text)


def _cmd_classify(args) -> int:
    ctx = _ctx(args)
    x = parse_number(args.value, ctx.p)
    if x is INF:
        raise ValueError("inf has no square class")
    name = _CLASS_NAMES[square_class(x, ctx)]
    _emit(args, name, {"class": name})
    return 0


def _cmd_rotate(args) -> int:
    ctx = _ctx(args)
    if (args.angles is None) == (args.quat is None):
        raise ValueError("rotate takes exactly one of an angle triple or --quat")
    if args.quat is not None:
        r = quat_to_rotation(parse_quat(args.quat, ctx))
    else:
        r = cardano_matrix(ctx, parse_angles(args.angles, ctx.p))
    _emit(args, format_matrix_json(r.mat), {"matrix": matrix_rows(r.mat)})
    return 0


def _cmd_compose(args) -> int:
    ctx = _ctx(args)
    texts = args.matrices
    if not texts:
        try:
            pair = json.loads(sys.stdin.read())
        except json.JSONDecodeError as exc:
            raise ValueError(f"stdin is not valid JSON: {exc}") from None
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValueError("stdin must hold a JSON pair [m1, m2]")
        mats = [matrix_from_obj(m, ctx.p) for m in pair]
    elif len(texts) == 2:
        mats = [parse_matrix_json(t, ctx.p) for t in texts]
    else:
        raise ValueError("compose takes two matrices, or none with a pair on stdin")
    r = Rot3(ctx, mats[0]) * Rot3(ctx, mats[1])
    _emit(args, format_matrix_json(r.mat), {"matrix": matrix_rows(r.mat)})
    return 0


def _cmd_decompose(args) -> int:
    ctx = _ctx(args)
    text = args.matrix
    if text is None or text == "-":
        text = sys.stdin.read()
    r = Rot3(ctx, parse_matrix_json(text, ctx.p))
    angles = decompose_cardano(r, precision=args.precision)
    _emit(args, format_angles(angles), {"angles": [format_number(a) for a in angles]})
    return 0


def _group_param(ctx: PrimeCtx, tag: str) -> Fraction:
    if tag.startswith("so2:"):
        catalog = ctx.so2_catalog()
        key = tag[4:]
        if key in catalog:
            return catalog[key]
    raise ValueError(f"unknown group tag: {tag!r}")


def _cmd_haar_mass(args) -> int:
    ctx = _ctx(args)
    if args.group == "so3":
        mass = haar.total_mass(ctx, "so3")
    else:
        d = _group_param(ctx, args.group)
        mass = haar.integrate_so2(ctx, d, haar.RegionQp.full(ctx.p))
    _emit(args, format_rational(mass), {"mass": format_rational(mass)})
    return 0


def _cmd_haar_integrate(args) -> int:
    ctx = _ctx(args)
    if args.group == "so3":
        parts = args.region.split(";")
        if len(parts) != 3:
            raise RegionError("so3 integration takes three regions 'z;y;x'")
        box = [parse_region(t, ctx.p) for t in parts]
        mass = haar.integrate_so3(ctx, box, normalized=args.normalized)
    else:
        d = _group_param(ctx, args.group)
        mass = haar.integrate_so2(ctx, d, parse_region(args.region, ctx.p))
        if args.normalized:
            mass /= haar.integrate_so2(ctx, d, haar.RegionQp.full(ctx.p))
    _emit(args, format_rational(mass), {"mass": format_rational(mass)})
    return 0


def _cmd_haar_sample(args) -> int:
    ctx = _ctx(args)
    if args.count < 0:
        raise ValueError("count must be nonnegative")
    draws = haar.sample_so3_batch(
        ctx, args.seed, args.count, digits=args.precision, threads=args.threads
    )
    lines = []
    samples = []
    for angles, rot in draws:
        lines.append(format_angles(angles))
        entry = {"angles": [format_number(a) for a in angles]}
        if args.matrices:
            lines.append(format_matrix_json(rot.mat))
            entry["matrix"] = matrix_rows(rot.mat)
        samples.append(entry)
    _emit(args, "\n".join(lines), {"samples": samples})
    return 0


def _cmd_verify(args) -> int:
    ctx = _ctx(args)
    names = verify.SUITE_NAMES if args.suite == "all" else (args.suite,)
    results = verify.run_suites(ctx, names, samples=args.samples, seed=args.seed)
    lines = [
        f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}" for r in results
    ]
    checks = [
        {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
    ]
    _emit(args, "\n".join(lines), {"checks": checks})
    return 0 if all(r.passed for r in results) else 1


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, required=True, help="the odd prime p")
    common.add_argument(
        "--precision", type=int, default=32, help="working p-adic digits (at least 4)"
    )
    common.add_argument("--seed", type=int, default=0, help="64-bit sampling seed")
    common.add_argument(
        "--threads", type=int, default=1, help="worker threads for sampling batches"
    )
    common.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )

    parser = argparse.ArgumentParser(
        prog="so3p",
        description="Exact arithmetic on the p-adic rotation group SO(3)_p.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cl = sub.add_parser("classify", parents=[common], help="square class of a number")
    cl.add_argument("value", help="number literal: a/b, inf, or p^v * [d0,d1,...]")
    cl.set_defaults(func=_cmd_classify)

    ro = sub.add_parser("rotate", parents=[common], help="build a rotation matrix")
    ro.add_argument("angles", nargs="?", help="angle triple a,b,c (inf allowed)")
    ro.add_argument("--quat", help="quaternion literal 'q0 + q1 i + q2 j + q3 k'")
    ro.set_defaults(func=_cmd_rotate)

    co = sub.add_parser(
        "compose", parents=[common], help="multiply two rotations, recertified"
    )
    co.add_argument(
        "matrices", nargs="*", help="two matrix JSON literals; omit for stdin [m1, m2]"
    )
    co.set_defaults(func=_cmd_compose)

    de = sub.add_parser(
        "decompose", parents=[common], help="matrix to nautical angles"
    )
    de.add_argument("matrix", nargs="?", help="matrix JSON; omit or '-' for stdin")
    de.set_defaults(func=_cmd_decompose)

    ha = sub.add_parser("haar", help="masses, exact integrals, random samples")
    hsub = ha.add_subparsers(dest="haar_command", required=True)

    hm = hsub.add_parser("mass", parents=[common], help="total mass of a group")
    hm.add_argument(
        "--group",
        required=True,
        help="so3, so2:-v, so2:p, so2:up, or so2:-p/v",
    )
    hm.set_defaults(func=_cmd_haar_mass)

    hi = hsub.add_parser("integrate", parents=[common], help="exact mass of a region")
    hi.add_argument("--group", required=True, help="so3 or an so2:* tag")
    hi.add_argument(
        "--region",
        required=True,
        help="union literal zp | ball:c,k | shell:k | tail:K; ';'-separated triple for so3",
    )
    hi.add_argument(
        "--normalized", action="store_true", help="divide by the total mass"
    )
    hi.set_defaults(func=_cmd_haar_integrate)

    hs = hsub.add_parser("sample", parents=[common], help="Haar-random rotations")
    hs.add_argument("--count", type=int, default=1, help="number of draws")
    hs.add_argument(
        "--matrices", action="store_true", help="also print each rotation matrix"
    )
    hs.set_defaults(func=_cmd_haar_sample)

    ve = sub.add_parser("verify", parents=[common], help="run the identity suites")
    ve.add_argument(
        "--suite",
        choices=(*verify.SUITE_NAMES, "all"),
        default="all",
        help="which suite to run",
    )
    ve.add_argument(
        "--samples", type=int, default=None, help="draws per identity (default varies)"
    )
    ve.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _settings(args)
        return args.func(args)
    except CertificateError as exc:
        print(f"so3p: certificate failure: {exc}", file=sys.stderr)
        return 3
    except AmbiguityError as exc:
        print(f"so3p: ambiguity: {exc}", file=sys.stderr)
        return 4
    except RegionError as exc:
        print(f"so3p: region: {exc}", file=sys.stderr)
        return 5
    except ZeroDivisionError as exc:
        print(f"so3p: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        # precision exhaustion surfaces as a failed certificate
        print(f"so3p: certificate failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"so3p: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
