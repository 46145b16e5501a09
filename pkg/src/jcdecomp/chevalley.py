"""Jordan-Chevalley decomposition A = D + N by Newton iteration.

Given a non-constant annihilating polynomial f of A, let g be the
square-free part of f together with cofactors 1 = gtilde*D(g) +
gtilde_prime*g.  The update

    A_{k+1} := A_k - g(A_k) * gtilde(A_k)

doubles the multiplicity of g dividing the annihilator of g(A_k), so
after at most k0 = ceil(log2 m) steps g(A_k) = 0; that iterate is the
semisimple part D, and N = A - D is nilpotent with N**m = 0.  No
eigenvalues are ever computed.

Two modes produce bit-identical output: ``MATRIX`` runs the update on
matrices; ``QUOTIENT`` (the default) runs it on residues in K[X]/(f)
and evaluates the final residue at A once, which replaces almost all
matrix multiplications by polynomial arithmetic of degree < deg f.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import isqrt
from pathlib import Path
from typing import List, Optional, Sequence, Union

from .field import FieldMismatchError
from .matrix import (
    DimensionMismatchError,
    Mat,
    eval_poly,
    eval_poly_bsgs,
    is_nilpotent,
    minimal_polynomial,
    read_matrix,
    write_matrix,
)
from .poly import (
    Poly,
    SquareFreeCert,
    bezout_for,
    compose_mod,
    format_poly,
    is_squarefree,
    parse_poly,
    squarefree_part,
)


class AnnihilatorError(ValueError):
    """The supplied polynomial is constant or does not annihilate A."""


class NonConvergenceError(RuntimeError):
    """The iteration ran past its proven bound.

    Cannot happen when the certificate (g, m) really is a square-free
    part of an annihilator of A; seeing this means the caller injected
    an inconsistent certificate.
    """


class SidecarParseError(ValueError):
    """Raised when a serialized decomposition cannot be parsed."""


class IterationMode(Enum):
    MATRIX = "matrix"
    QUOTIENT = "quotient"


@dataclass(frozen=True)
class TraceStep:
    """One step of the iteration: index, whether g vanished there, and
    (quotient mode only) the residue a_k with A_k = a_k(A)."""

    k: int
    g_is_zero: bool
    residue: Optional[Poly] = None


@dataclass(frozen=True)
class Decomposition:
    D: Mat
    N: Mat
    k_used: int
    k0: int
    cert: SquareFreeCert
    p_D: Optional[Poly]  # D = p_D(A); carried by quotient mode
    f_used: Optional[Poly]  # None only on deserialized results


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of the five decomposition checks.

    ``polynomial_ok`` is None when the decomposition carries no p_D
    claim (matrix mode / deserialized without one); a None check never
    counts as a failure.
    """

    sum_ok: bool
    commute_ok: bool
    semisimple_ok: bool
    nilpotent_ok: bool
    polynomial_ok: Optional[bool]

    _LABELS = (
        ("sum_ok", "D + N = A"),
        ("commute_ok", "D*N = N*D"),
        ("semisimple_ok", "g square-free and g(D) = 0"),
        ("nilpotent_ok", "N nilpotent with N^m = 0"),
        ("polynomial_ok", "p_D(A) = D"),
    )

    def passed(self) -> bool:
        return not self.failures()

    def failures(self) -> List[str]:
        return [label for name, label in self._LABELS if getattr(self, name) is False]


def _k0_bound(m: int) -> int:
    # smallest k with 2**k >= m
    return (m - 1).bit_length()


def _prepare(A: Mat, f: Optional[Poly], cert: Optional[SquareFreeCert]):
    if f is None:
        f = minimal_polynomial(A)
    else:
        if f.field != A.field:
            raise FieldMismatchError(
                f"annihilator over {f.field!r} but matrix over {A.field!r}"
            )
        if f.is_constant():
            raise AnnihilatorError("annihilating polynomial must be non-constant")
        if not eval_poly_bsgs(f, A).is_zero():
            raise AnnihilatorError(f"f(A) != 0 for f = {format_poly(f)}")
        f = f.monic()
    if cert is None:
        cert = squarefree_part(f)
    elif cert.gtilde is None or cert.gtilde_prime is None:
        cert = SquareFreeCert(cert.g, cert.m, *bezout_for(cert.g))
    return f, cert


def _iterate_matrix(A: Mat, cert: SquareFreeCert, k0: int):
    g, gt = cert.g, cert.gtilde
    Ak = A
    k = 0
    trace = []
    while True:
        gAk = eval_poly(g, Ak)
        done = gAk.is_zero()
        trace.append(TraceStep(k, done))
        if done:
            return Ak, k, None, trace
        if k >= k0:
            raise NonConvergenceError(
                f"g(A_k) != 0 after the proven bound of {k0} steps; "
                "the square-free certificate is inconsistent with A"
            )
        Ak = Ak - gAk @ eval_poly(gt, Ak)
        k += 1


def _eval_many_mod(polys: Sequence[Poly], b: Poly, f: Poly) -> List[Poly]:
    """Evaluate each h in polys at b, reduced mod f.

    Same values as compose_mod(h, b, f) for each h, but all
    evaluations share one baby-step/giant-step table of powers of b,
    so a step of the quotient iteration needs O(sqrt(deg g)) modular
    multiplications instead of O(deg g).
    """
    d = max((h.degree for h in polys if not h.is_zero()), default=0)
    if d <= 2:
        return [compose_mod(h, b, f) for h in polys]
    F = f.field
    s = max(1, isqrt(int(d)))
    powers = [Poly.one(F), b % f]
    while len(powers) <= s:
        powers.append((powers[-1] * b) % f)
    giant = powers[s]
    out = []
    for h in polys:
        cs = h.raw_coeffs()
        acc = Poly.zero(F)
        for lo in reversed(range(0, max(len(cs), 1), s)):
            if not acc.is_zero():
                acc = (acc * giant) % f
            for t, c in enumerate(cs[lo : lo + s]):
                if c != 0:
                    acc = acc + powers[t] * c
        out.append(acc)
    return out


def _iterate_quotient(A: Mat, f: Poly, cert: SquareFreeCert, k0: int):
    g, gt = cert.g, cert.gtilde
    F = A.field
    a = Poly.x(F) % f
    k = 0
    trace = []
    while True:
        ga, gta = _eval_many_mod((g, gt), a, f)
        done = ga.is_zero()
        trace.append(TraceStep(k, done, a))
        if done:
            break
        if k >= k0:
            raise NonConvergenceError(
                f"g(a_k) != 0 (mod f) after the proven bound of {k0} steps; "
                "the square-free certificate is inconsistent with f"
            )
        a = (a - ga * gta) % f
        k += 1
    D = eval_poly_bsgs(a, A)
    return D, k, a, trace


def _run(A: Mat, f: Optional[Poly], mode: IterationMode, cert: Optional[SquareFreeCert]):
    f, cert = _prepare(A, f, cert)
    k0 = _k0_bound(cert.m)
    if mode is IterationMode.MATRIX:
        D, k_used, p_D, trace = _iterate_matrix(A, cert, k0)
    elif mode is IterationMode.QUOTIENT:
        D, k_used, p_D, trace = _iterate_quotient(A, f, cert, k0)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    dec = Decomposition(
        D=D,
        N=A - D,
        k_used=k_used,
        k0=k0,
        cert=cert,
        p_D=p_D,
        f_used=f,
    )
    return dec, trace


def jordan_chevalley(
    A: Mat,
    f: Optional[Poly] = None,
    mode: IterationMode = IterationMode.QUOTIENT,
    cert: Optional[SquareFreeCert] = None,
) -> Decomposition:
    """Decompose A = D + N with D semisimple, N nilpotent, DN = ND.

    If f is omitted, the minimal polynomial of A is computed and used;
    if given, it must be non-constant with f(A) = 0 (checked, raising
    AnnihilatorError otherwise).  A pre-computed square-free
    certificate for f may be supplied (e.g. from known eigenvalues via
    squarefree_from_roots); by default it is derived from f.
    """
    dec, _ = _run(A, f, mode, cert)
    return dec


def iteration_trace(
    A: Mat,
    f: Optional[Poly] = None,
    mode: IterationMode = IterationMode.QUOTIENT,
    cert: Optional[SquareFreeCert] = None,
) -> List[TraceStep]:
    """Per-step records of the iteration on A (same contract as
    jordan_chevalley); the final record is the first with g_is_zero."""
    _, trace = _run(A, f, mode, cert)
    return trace


def verify(A: Mat, dec: Decomposition) -> VerificationReport:
    """Re-check a claimed decomposition of A.

    Failed checks are report content, not exceptions; only genuine
    shape problems (mixed fields or dimensions) raise.  Semisimplicity
    of D is certified by exhibiting a square-free polynomial that
    annihilates it; nilpotency of N by N**min(m, n) = 0.
    """
    for part, name in ((dec.D, "D"), (dec.N, "N")):
        if part.field != A.field:
            raise FieldMismatchError(f"{name} is over {part.field!r}, A over {A.field!r}")
        if part.n != A.n:
            raise DimensionMismatchError(f"{name} is {part.n}x{part.n}, A is {A.n}x{A.n}")

    D, N, g, m = dec.D, dec.N, dec.cert.g, dec.cert.m
    sum_ok = (D + N) == A
    commute_ok = (D @ N) == (N @ D)
    try:
        semisimple_ok = (
            g.field == A.field and is_squarefree(g) and eval_poly(g, D).is_zero()
        )
    except ValueError:
        semisimple_ok = False
    try:
        nilpotent_ok = is_nilpotent(N, m)
    except ValueError:
        nilpotent_ok = False
    if dec.p_D is None:
        polynomial_ok: Optional[bool] = None
    else:
        polynomial_ok = dec.p_D.field == A.field and eval_poly_bsgs(dec.p_D, A) == D
    return VerificationReport(sum_ok, commute_ok, semisimple_ok, nilpotent_ok, polynomial_ok)


# ---------------------------------------------------------------------------
# serialization: D.mat + N.mat + a sidecar with the certificate


_D_FILE = "D.mat"
_N_FILE = "N.mat"
_SIDECAR_FILE = "decomposition.txt"


def write_decomposition(dec: Decomposition, directory: Union[str, Path]) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_matrix(dec.D, d / _D_FILE)
    write_matrix(dec.N, d / _N_FILE)
    lines = [
        f"g {format_poly(dec.cert.g)}",
        f"m {dec.cert.m}",
        f"k_used {dec.k_used}",
        f"k0 {dec.k0}",
        f"p_D {format_poly(dec.p_D) if dec.p_D is not None else 'none'}",
    ]
    (d / _SIDECAR_FILE).write_text("\n".join(lines) + "\n")


def read_decomposition(directory: Union[str, Path]) -> Decomposition:
    d = Path(directory)
    D = read_matrix(d / _D_FILE)
    N = read_matrix(d / _N_FILE)
    fields = {}
    text = (d / _SIDECAR_FILE).read_text()
    for ln in text.splitlines():
        if not ln.strip():
            continue
        key, _, value = ln.partition(" ")
        fields[key] = value.strip()
    missing = {"g", "m", "k_used", "k0", "p_D"} - fields.keys()
    if missing:
        raise SidecarParseError(f"sidecar is missing {sorted(missing)}")
    try:
        g = parse_poly(D.field, fields["g"])
        m = int(fields["m"])
        k_used = int(fields["k_used"])
        k0 = int(fields["k0"])
        p_D = None if fields["p_D"] == "none" else parse_poly(D.field, fields["p_D"])
    except ValueError as e:
        raise SidecarParseError(f"bad sidecar value: {e}") from None
    return Decomposition(
        D=D,
        N=N,
        k_used=k_used,
        k0=k0,
        cert=SquareFreeCert(g, m),
        p_D=p_D,
        f_used=None,
    )
