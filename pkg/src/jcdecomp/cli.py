"""Command-line front end.

Subcommands: ``decompose`` (write/print D, N and a certificate
sidecar), ``minpoly``, ``squarefree``, ``verify`` (re-check a stored
decomposition), and ``bench`` (CSV timings of both iteration modes on
random block-companion matrices).

Exit codes: 0 success, 2 parse error, 3 field mismatch, 4 annihilator
check failed, 5 verification failed.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path
from typing import List, Optional, Tuple

from .chevalley import (
    AnnihilatorError,
    IterationMode,
    SidecarParseError,
    jordan_chevalley,
    read_decomposition,
    verify,
    write_decomposition,
)
from .field import (
    Field,
    FieldMismatchError,
    PrimeField,
    QQ,
    ScalarParseError,
    UnsupportedFieldError,
)
from .matrix import (
    DimensionMismatchError,
    Mat,
    MatrixParseError,
    format_matrix,
    minimal_polynomial,
    random_block_companion,
    read_matrix,
)
from .poly import (
    DuplicateRootError,
    Poly,
    PolyParseError,
    format_poly,
    lcm,
    parse_poly,
    squarefree_from_roots,
    squarefree_part,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_FIELD_MISMATCH = 3
EXIT_ANNIHILATOR = 4
EXIT_VERIFY = 5

_PARSE_ERRORS = (
    ScalarParseError,
    PolyParseError,
    MatrixParseError,
    SidecarParseError,
    UnsupportedFieldError,
    DuplicateRootError,
)


def _field_from_tokens(tokens: List[str]) -> Field:
    if not tokens:
        raise ScalarParseError("--field needs a value: 'q' or 'fp P'")
    kind = tokens[0]
    if kind == "q":
        if len(tokens) != 1:
            raise ScalarParseError("--field q takes no further arguments")
        return QQ
    if kind == "fp":
        if len(tokens) != 2:
            raise ScalarParseError("--field fp needs a prime, e.g. --field fp 5")
        try:
            p = int(tokens[1])
        except ValueError:
            raise ScalarParseError(f"bad prime {tokens[1]!r}") from None
        return PrimeField(p)
    raise ScalarParseError(f"unknown field {kind!r} (expected 'q' or 'fp P')")


def _check_same_field(declared: Field, got: Field, what: str) -> None:
    if declared != got:
        raise FieldMismatchError(f"{what} is over {got!r} but --field declares {declared!r}")


def _parse_roots(field: Field, text: str) -> List[Tuple[object, int]]:
    pairs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        root_s, sep, mult_s = part.rpartition(":")
        if not sep:
            raise ScalarParseError(f"bad root:multiplicity pair {part!r}")
        lam = field.parse_raw(root_s.strip())
        try:
            mult = int(mult_s)
        except ValueError:
            raise ScalarParseError(f"bad multiplicity {mult_s!r} in {part!r}") from None
        pairs.append((lam, mult))
    if not pairs:
        raise ScalarParseError("--roots is empty")
    return pairs


def _cmd_decompose(args: argparse.Namespace) -> int:
    field = _field_from_tokens(args.field)
    A = read_matrix(args.input)
    _check_same_field(field, A.field, f"matrix {args.input}")

    f: Optional[Poly] = None
    cert = None
    if args.annihilator is not None:
        f = parse_poly(field, Path(args.annihilator).read_text().strip())
    elif args.roots is not None:
        pairs = _parse_roots(field, args.roots)
        cert = squarefree_from_roots(field, pairs)
        f = Poly.one(field)
        x = Poly.x(field)
        for lam, mult in pairs:
            f = f * (x - lam) ** mult

    mode = IterationMode(args.mode)
    dec = jordan_chevalley(A, f, mode=mode, cert=cert)

    if args.output is not None:
        write_decomposition(dec, args.output)
        print(f"wrote D.mat, N.mat, decomposition.txt to {args.output}")
    else:
        print("D:")
        print(format_matrix(dec.D), end="")
        print("N:")
        print(format_matrix(dec.N), end="")
    if args.stats:
        c = dec.cert
        print(
            f"stats: mode={mode.value} k_used={dec.k_used} k0={dec.k0} "
            f"m={c.m} deg_f={dec.f_used.degree} deg_g={c.g.degree}"
        )
    if args.verify:
        report = verify(A, dec)
        if not report.passed():
            for label in report.failures():
                print(f"verification FAILED: {label}", file=sys.stderr)
            return EXIT_VERIFY
        print("verification passed")
    return EXIT_OK


def _cmd_minpoly(args: argparse.Namespace) -> int:
    field = _field_from_tokens(args.field)
    A = read_matrix(args.input)
    _check_same_field(field, A.field, f"matrix {args.input}")
    print(format_poly(minimal_polynomial(A)))
    return EXIT_OK


def _cmd_squarefree(args: argparse.Namespace) -> int:
    field = _field_from_tokens(args.field)
    f = parse_poly(field, args.poly)
    if f.is_constant():
        print("error: the polynomial must be non-constant", file=sys.stderr)
        return EXIT_PARSE
    cert = squarefree_part(f)
    print(f"g = {format_poly(cert.g)}")
    print(f"m = {cert.m}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    field = _field_from_tokens(args.field)
    A = read_matrix(args.input)
    _check_same_field(field, A.field, f"matrix {args.input}")
    dec = read_decomposition(args.decomposition)
    report = verify(A, dec)
    ok = True
    for name, label in report._LABELS:
        value = getattr(report, name)
        if value is None:
            print(f"skip: {label} (no claim)")
        elif value:
            print(f"ok:   {label}")
        else:
            print(f"FAIL: {label}")
            ok = False
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_bench(args: argparse.Namespace) -> int:
    field = _field_from_tokens(args.field)
    if not isinstance(field, PrimeField):
        print("error: bench runs over prime fields only (--field fp P)", file=sys.stderr)
        return EXIT_PARSE
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        print(f"error: bad --sizes {args.sizes!r}", file=sys.stderr)
        return EXIT_PARSE
    if not sizes or any(n < 1 for n in sizes):
        print(f"error: bad --sizes {args.sizes!r}", file=sys.stderr)
        return EXIT_PARSE

    import random

    rng = random.Random(args.seed)
    rows = []
    for n in sizes:
        A, polys = random_block_companion(field, n, rng)
        f = polys[0]
        for q in polys[1:]:
            f = lcm(f, q)
        for mode in (IterationMode.QUOTIENT, IterationMode.MATRIX):
            t0 = time.perf_counter()
            dec = jordan_chevalley(A, f, mode=mode)
            seconds = time.perf_counter() - t0
            rows.append(
                {
                    "n": n,
                    "mode": mode.value,
                    "seconds": f"{seconds:.6f}",
                    "k_used": dec.k_used,
                    "deg_f": dec.f_used.degree,
                    "deg_g": dec.cert.g.degree,
                }
            )

    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=["n", "mode", "seconds", "k_used", "deg_f", "deg_g"])
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jcdecomp",
        description="Jordan-Chevalley decomposition A = D + N over Q or F_p, "
        "computed exactly and without eigenvalues.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_field(p: argparse.ArgumentParser, default=None) -> None:
        p.add_argument(
            "--field",
            nargs="+",
            metavar=("KIND", "P"),
            required=default is None,
            default=default,
            help="'q' for the rationals or 'fp P' for the prime field F_P",
        )

    p = sub.add_parser("decompose", help="compute D, N for a matrix file")
    add_field(p)
    p.add_argument("--input", required=True, help="matrix file (text or JSON)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--annihilator", help="file with a polynomial f, f(A) = 0 (default: minimal polynomial)")
    group.add_argument("--roots", help="known eigenvalues 'l1:n1,l2:n2,...' with multiplicities")
    p.add_argument("--mode", choices=[m.value for m in IterationMode], default=IterationMode.QUOTIENT.value)
    p.add_argument("--output", help="directory for D.mat, N.mat, decomposition.txt (default: print)")
    p.add_argument("--verify", action="store_true", help="re-check the result before exiting")
    p.add_argument("--stats", action="store_true", help="print iteration statistics")
    p.set_defaults(handler=_cmd_decompose)

    p = sub.add_parser("minpoly", help="print the minimal polynomial of a matrix")
    add_field(p)
    p.add_argument("--input", required=True)
    p.set_defaults(handler=_cmd_minpoly)

    p = sub.add_parser("squarefree", help="print the square-free part g and exponent m of f")
    add_field(p)
    p.add_argument("--poly", required=True, help="polynomial: 'X^2 - X' or coefficients 'c0,c1,...'")
    p.set_defaults(handler=_cmd_squarefree)

    p = sub.add_parser("verify", help="re-check a stored decomposition against a matrix")
    add_field(p)
    p.add_argument("--input", required=True, help="the original matrix file")
    p.add_argument("--decomposition", required=True, help="directory written by decompose --output")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("bench", help="time both iteration modes on random block-companion matrices")
    add_field(p, default=["fp", "2"])
    p.add_argument("--sizes", default="32,64,128", help="comma-separated matrix sizes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="CSV file (default: stdout)")
    p.set_defaults(handler=_cmd_bench)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _PARSE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (FieldMismatchError, DimensionMismatchError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FIELD_MISMATCH
    except AnnihilatorError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ANNIHILATOR


def cli() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    cli()
