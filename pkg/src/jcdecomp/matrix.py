"""Dense exact n x n matrices over Q and F_p.

Storage is a numpy array: int64 residues for prime fields (with the
matmul routed through float64 BLAS or int64 kernels whenever the
accumulated dot products provably fit, falling back to Python integers
otherwise) and an object array of ``Fraction`` values for Q.  Every
path is bit-exact; the backend choice is unobservable.

Besides the ring operations this module evaluates polynomials at
matrices (Horner, plus a baby-step/giant-step variant for high
degrees), computes minimal polynomials from Krylov sequences, and
reads/writes the on-disk matrix format.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import isqrt
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .field import (
    Field,
    FieldElement,
    FieldMismatchError,
    PrimeField,
    QQ,
    Rationals,
)
from .poly import Poly, lcm

_F64_SAFE = 2**53  # float64 integer exactness bound
_I64_SAFE = 2**63


class MatrixParseError(ValueError):
    """Raised when a matrix file or string cannot be parsed."""


class DimensionMismatchError(ValueError):
    """Raised when matrix dimensions are incompatible."""


def _uses_int64(field: Field) -> bool:
    return isinstance(field, PrimeField) and field.p <= 2**31


def _matmul_raw(field: Field, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    inner = X.shape[-1]
    if _uses_int64(field):
        p = field.p
        budget = inner * (p - 1) * (p - 1)
        if budget < _F64_SAFE:
            Z = np.rint(X.astype(np.float64) @ Y.astype(np.float64)).astype(np.int64)
            return Z % p
        if budget < _I64_SAFE:
            return (X @ Y) % p
        return ((X.astype(object) @ Y.astype(object)) % p).astype(np.int64)
    Z = X @ Y
    if isinstance(field, PrimeField):
        Z = Z % field.p
    return Z


def _normalize_raw(field: Field, X: np.ndarray) -> np.ndarray:
    if isinstance(field, PrimeField):
        return X % field.p
    return X


class Mat:
    """Immutable square matrix over a fixed field."""

    __slots__ = ("field", "n", "_a")

    def __init__(self, field: Field, rows: Sequence[Sequence]):
        n = len(rows)
        if n == 0:
            raise DimensionMismatchError("matrix dimension must be positive")
        data = []
        for row in rows:
            row = list(row)
            if len(row) != n:
                raise DimensionMismatchError(
                    f"expected a square {n}x{n} matrix, got a row of length {len(row)}"
                )
            data.append([field.coerce(e) for e in row])
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "n", n)
        if _uses_int64(field):
            a = np.array(data, dtype=np.int64)
        else:
            a = np.empty((n, n), dtype=object)
            for i in range(n):
                for j in range(n):
                    a[i, j] = data[i][j]
        a.flags.writeable = False
        object.__setattr__(self, "_a", a)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    @classmethod
    def _from_raw(cls, field: Field, a: np.ndarray) -> "Mat":
        m = object.__new__(cls)
        object.__setattr__(m, "field", field)
        object.__setattr__(m, "n", a.shape[0])
        a.flags.writeable = False
        object.__setattr__(m, "_a", a)
        return m

    @classmethod
    def zero(cls, field: Field, n: int) -> "Mat":
        if _uses_int64(field):
            a = np.zeros((n, n), dtype=np.int64)
        else:
            a = np.empty((n, n), dtype=object)
            z = field.zero()
            a[:] = z
        return cls._from_raw(field, a)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        return cls.scalar(field, n, 1)

    @classmethod
    def scalar(cls, field: Field, n: int, c) -> "Mat":
        c = field.coerce(c)
        if _uses_int64(field):
            a = np.zeros((n, n), dtype=np.int64)
        else:
            a = np.empty((n, n), dtype=object)
            a[:] = field.zero()
        idx = np.arange(n)
        a[idx, idx] = c
        return cls._from_raw(field, a)

    @classmethod
    def diag(cls, field: Field, values: Sequence) -> "Mat":
        vals = [field.coerce(v) for v in values]
        m = cls.zero(field, len(vals))
        a = m._a.copy()
        idx = np.arange(len(vals))
        a[idx, idx] = vals
        return cls._from_raw(field, a)

    # -- queries ----------------------------------------------------------

    def __getitem__(self, ij: Tuple[int, int]) -> FieldElement:
        i, j = ij
        return FieldElement(self.field, self._a[i, j].item() if self._a.dtype != object else self._a[i, j])

    def rows(self) -> List[List[FieldElement]]:
        F = self.field
        if self._a.dtype == object:
            return [[FieldElement(F, v) for v in row] for row in self._a]
        return [[FieldElement(F, int(v)) for v in row] for row in self._a]

    def raw_rows(self) -> list:
        if self._a.dtype == object:
            return [list(row) for row in self._a]
        return [[int(v) for v in row] for row in self._a]

    def is_zero(self) -> bool:
        return not self._a.any()

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Mat") -> "Mat":
        if not isinstance(other, Mat):
            raise TypeError(f"expected Mat, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(f"mixed fields: {self.field!r} and {other.field!r}")
        if other.n != self.n:
            raise DimensionMismatchError(f"dimension mismatch: {self.n} vs {other.n}")
        return other

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat._from_raw(self.field, _normalize_raw(self.field, self._a + other._a))

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat._from_raw(self.field, _normalize_raw(self.field, self._a - other._a))

    def __neg__(self) -> "Mat":
        return Mat._from_raw(self.field, _normalize_raw(self.field, -self._a))

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat._from_raw(self.field, _matmul_raw(self.field, self._a, other._a))

    def scale(self, c) -> "Mat":
        c = self.field.coerce(c)
        return Mat._from_raw(self.field, _normalize_raw(self.field, self._a * c))

    def __pow__(self, e: int) -> "Mat":
        if e < 0:
            raise ValueError("negative matrix power")
        result = Mat.identity(self.field, self.n)
        base = self
        while e:
            if e & 1:
                result = result @ base
            if e > 1:
                base = base @ base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (
            self.field == other.field
            and self.n == other.n
            and bool(np.array_equal(self._a, other._a))
        )

    def __repr__(self):
        return f"Mat({self.field!r}, {self.raw_rows()!r})"

    def __str__(self):
        return format_matrix(self).rstrip("\n")


# ---------------------------------------------------------------------------
# polynomial evaluation at a matrix


def _diag_add(field: Field, a: np.ndarray, c) -> np.ndarray:
    idx = np.arange(a.shape[0])
    if _uses_int64(field):
        a[idx, idx] = (a[idx, idx] + c) % field.p
    else:
        a[idx, idx] = _normalize_raw(field, a[idx, idx] + c)
    return a


def eval_poly(f: Poly, A: Mat) -> Mat:
    """f(A) by Horner's rule: deg f matrix multiplications."""
    if f.field != A.field:
        raise FieldMismatchError(f"polynomial over {f.field!r}, matrix over {A.field!r}")
    cs = f.raw_coeffs()
    if not cs:
        return Mat.zero(A.field, A.n)
    acc = Mat.scalar(A.field, A.n, cs[-1])._a.copy()
    for c in reversed(cs[:-1]):
        acc = _matmul_raw(A.field, acc, A._a)
        acc = _diag_add(A.field, acc, c)
    return Mat._from_raw(A.field, acc)


def eval_poly_bsgs(f: Poly, A: Mat) -> Mat:
    """f(A) by baby-step/giant-step; output is identical to eval_poly.

    Uses about 2*sqrt(deg f) multiplications instead of deg f, which
    matters when one evaluation of a high-degree polynomial lands the
    semisimple part at the end of the quotient-ring iteration.  The
    per-chunk linear combinations of the power table are a single
    (chunks x s) @ (s x n^2) product on the flattened powers.
    """
    if f.field != A.field:
        raise FieldMismatchError(f"polynomial over {f.field!r}, matrix over {A.field!r}")
    cs = f.raw_coeffs()
    if len(cs) <= 2:
        return eval_poly(f, A)
    F, n = A.field, A.n
    d = len(cs) - 1
    s = max(1, isqrt(d))
    powers = [Mat.identity(F, n)._a, A._a]
    while len(powers) <= s:
        powers.append(_matmul_raw(F, powers[-1], A._a))
    giant = powers[s]

    nchunks = (len(cs) + s - 1) // s
    if _uses_int64(F):
        coeffs = np.zeros((nchunks, s), dtype=np.int64)
        table = np.stack([p.reshape(-1) for p in powers[:s]])
    else:
        coeffs = np.empty((nchunks, s), dtype=object)
        coeffs[:] = F.zero()
        table = np.empty((s, n * n), dtype=object)
        for t in range(s):
            table[t] = powers[t].reshape(-1)
    for j in range(nchunks):
        for t, c in enumerate(cs[j * s : j * s + s]):
            coeffs[j, t] = c
    chunks = _matmul_raw(F, coeffs, table)

    acc = chunks[nchunks - 1].reshape(n, n)
    for j in range(nchunks - 2, -1, -1):
        acc = _matmul_raw(F, acc, giant)
        acc = _normalize_raw(F, acc + chunks[j].reshape(n, n))
    return Mat._from_raw(F, acc)


def is_nilpotent(N: Mat, bound: int) -> bool:
    """True iff N**s = 0 for s = min(bound, n), via binary powering."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    s = min(bound, N.n)
    return (N**s).is_zero()


# ---------------------------------------------------------------------------
# minimal polynomial via Krylov sequences


def _matvec_raw(field: Field, X: np.ndarray, v: np.ndarray) -> np.ndarray:
    return _matmul_raw(field, X, v)


def minimal_polynomial(A: Mat) -> Poly:
    """Monic minimal polynomial of A.

    For each standard basis vector not already inside the invariant
    subspace explored so far, follow its Krylov sequence e, Ae, A^2 e,
    ... to the first linear dependence; that dependence is the minimal
    polynomial of A relative to e.  The answer is the lcm of the
    relative polynomials, and the search stops early once its degree
    reaches n.
    """
    F, n = A.field, A.n
    i64 = _uses_int64(F)
    p = F.p if isinstance(F, PrimeField) else 0

    if i64:
        def submul(v, c, w):
            return (v - int(c) * w) % p

        def scale(v, c):
            return (v * int(c)) % p

        def inv_raw(c):
            return pow(int(c), -1, p)

        def unit(i, length):
            v = np.zeros(length, dtype=np.int64)
            v[i] = 1
            return v

        def to_raw_list(v, upto):
            return [int(x) for x in v[:upto]]
    else:
        def submul(v, c, w):
            return _normalize_raw(F, v - c * w)

        def scale(v, c):
            return _normalize_raw(F, v * c)

        def inv_raw(c):
            return F.inv(c)

        def unit(i, length):
            v = np.empty(length, dtype=object)
            v[:] = F.zero()
            v[i] = F.one()
            return v

        def to_raw_list(v, upto):
            return list(v[:upto])

    def first_nz(v):
        nz = np.nonzero(v)[0]
        return int(nz[0]) if len(nz) else -1

    span = {}  # pivot column -> normalized row of the explored invariant subspace

    def span_reduce(v):
        v = v.copy()
        while True:
            j = first_nz(v)
            if j < 0:
                return None
            row = span.get(j)
            if row is None:
                return j, v
            v = submul(v, v[j], row)

    def span_insert(v):
        res = span_reduce(v)
        if res is not None:
            j, w = res
            span[j] = scale(w, inv_raw(w[j]))

    mu = Poly.one(F)
    for i in range(n):
        if mu.degree == n:
            break
        e = unit(i, n)
        if span_reduce(e) is None:
            continue
        local: list = []  # (pivot, reduced vector, combination over Krylov indices)
        cur = e
        k = 0
        while True:
            v = cur.copy()
            combo = unit(k, n + 1)
            for j, row, rcombo in local:
                c = v[j]
                if c != 0:
                    v = submul(v, c, row)
                    combo = submul(combo, c, rcombo)
            jz = first_nz(v)
            if jz < 0:
                rel = Poly(F, to_raw_list(combo, k + 1))
                break
            cinv = inv_raw(v[jz])
            local.append((jz, scale(v, cinv), scale(combo, cinv)))
            cur = _matvec_raw(F, A._a, cur)
            k += 1
        for _, row, _ in local:
            span_insert(row)
        mu = rel if mu.degree == 0 else lcm(mu, rel)
    return mu


# ---------------------------------------------------------------------------
# structured constructors


def companion(f: Poly) -> Mat:
    """Companion matrix of monic(f); its minimal polynomial is monic(f)."""
    if f.is_constant():
        raise ValueError("companion matrix needs a non-constant polynomial")
    f = f.monic()
    F = f.field
    n = f.degree
    cs = f.raw_coeffs()
    M = Mat.zero(F, n)._a.copy()
    for i in range(n - 1):
        M[i + 1, i] = F.one()
    for i in range(n):
        M[i, n - 1] = F.neg(cs[i])
    return Mat._from_raw(F, M)


def block_diag(blocks: Sequence[Mat]) -> Mat:
    if not blocks:
        raise ValueError("need at least one block")
    F = blocks[0].field
    for b in blocks:
        if b.field != F:
            raise FieldMismatchError("blocks over different fields")
    n = sum(b.n for b in blocks)
    M = Mat.zero(F, n)._a.copy()
    at = 0
    for b in blocks:
        M[at : at + b.n, at : at + b.n] = b._a
        at += b.n
    return Mat._from_raw(F, M)


def jordan_block(field: Field, size: int, lam) -> Mat:
    lam = field.coerce(lam)
    M = Mat.zero(field, size)._a.copy()
    one = field.one()
    for i in range(size):
        M[i, i] = lam
        if i + 1 < size:
            M[i, i + 1] = one
    return Mat._from_raw(field, M)


def random_matrix(field: Field, n: int, rng, bound: int = 3) -> Mat:
    """Uniform random matrix; over Q the entries are small integers."""
    if isinstance(field, PrimeField):
        return Mat(field, [[rng.randrange(field.p) for _ in range(n)] for _ in range(n)])
    return Mat(field, [[Fraction(rng.randint(-bound, bound)) for _ in range(n)] for _ in range(n)])


def random_monic(field: Field, deg: int, rng) -> Poly:
    cs = [field.random_raw(rng) if isinstance(field, PrimeField) else Fraction(rng.randint(-3, 3)) for _ in range(deg)]
    cs.append(field.one())
    return Poly(field, cs)


def random_block_companion(
    field: Field,
    n: int,
    rng,
    max_base_deg: int = 3,
    max_mult: int = 3,
) -> Tuple[Mat, List[Poly]]:
    """Block-diagonal matrix of companion blocks of q**e for random monic q.

    Returns the matrix and the list of block polynomials; their lcm
    annihilates the matrix (it is in fact its minimal polynomial).
    Repeated-factor blocks give the decomposition a genuinely nilpotent
    part to find.
    """
    blocks = []
    polys = []
    remaining = n
    while remaining > 0:
        d = rng.randint(1, min(max_base_deg, remaining))
        e = rng.randint(1, max(1, min(max_mult, remaining // d)))
        base = random_monic(field, d, rng)
        fblock = base**e
        blocks.append(companion(fblock))
        polys.append(fblock)
        remaining -= d * e
    return block_diag(blocks), polys


# ---------------------------------------------------------------------------
# on-disk format


def _field_header(field: Field) -> str:
    if isinstance(field, PrimeField):
        return f"field fp {field.p}"
    return "field q"


def _field_from_tokens(tokens: List[str]) -> Tuple[Field, List[str]]:
    if not tokens:
        raise MatrixParseError("missing field header")
    kind = tokens[0]
    if kind == "q":
        return QQ, tokens[1:]
    if kind == "fp":
        if len(tokens) < 2:
            raise MatrixParseError("field fp needs a prime")
        try:
            p = int(tokens[1])
        except ValueError:
            raise MatrixParseError(f"bad prime {tokens[1]!r}") from None
        try:
            return PrimeField(p), tokens[2:]
        except ValueError as e:
            raise MatrixParseError(str(e)) from None
    raise MatrixParseError(f"unknown field kind {kind!r} (expected 'q' or 'fp')")


def format_matrix(A: Mat) -> str:
    lines = [f"{_field_header(A.field)} dim {A.n}"]
    F = A.field
    for row in A.raw_rows():
        lines.append(" ".join(F.format_raw(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> Mat:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixParseError("empty matrix text")
    head = lines[0].split()
    if not head or head[0] != "field":
        raise MatrixParseError(f"bad header {lines[0]!r}")
    field, rest = _field_from_tokens(head[1:])
    if len(rest) != 2 or rest[0] != "dim":
        raise MatrixParseError(f"bad header {lines[0]!r}")
    try:
        n = int(rest[1])
    except ValueError:
        raise MatrixParseError(f"bad dimension {rest[1]!r}") from None
    if n < 1:
        raise MatrixParseError("dimension must be positive")
    if len(lines) - 1 != n:
        raise MatrixParseError(f"expected {n} rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        toks = ln.split()
        if len(toks) != n:
            raise MatrixParseError(f"expected {n} entries per row, got {len(toks)} in {ln!r}")
        try:
            rows.append([field.parse_raw(t) for t in toks])
        except ValueError as e:
            raise MatrixParseError(str(e)) from None
    return Mat(field, rows)


def matrix_to_json_dict(A: Mat) -> dict:
    F = A.field
    out = {"field": "fp" if isinstance(F, PrimeField) else "q", "n": A.n}
    if isinstance(F, PrimeField):
        out["p"] = F.p
        out["rows"] = A.raw_rows()
    else:
        out["rows"] = [[F.format_raw(v) for v in row] for row in A.raw_rows()]
    return out


def matrix_from_json_dict(d: dict) -> Mat:
    try:
        kind = d["field"]
        n = d["n"]
        rows = d["rows"]
    except (KeyError, TypeError) as e:
        raise MatrixParseError(f"bad matrix JSON: missing {e}") from None
    if kind == "fp":
        if "p" not in d:
            raise MatrixParseError("matrix JSON with field 'fp' needs key 'p'")
        field, _ = _field_from_tokens(["fp", str(d["p"])])
    elif kind == "q":
        field = QQ
    else:
        raise MatrixParseError(f"unknown field kind {kind!r}")
    if not isinstance(rows, list) or len(rows) != n:
        raise MatrixParseError(f"expected {n} rows")
    parsed = []
    for row in rows:
        if not isinstance(row, list) or len(row) != n:
            raise MatrixParseError(f"expected {n} entries per row")
        try:
            parsed.append([field.parse_raw(str(v)) for v in row])
        except ValueError as e:
            raise MatrixParseError(str(e)) from None
    return Mat(field, parsed)


def read_matrix(path: Union[str, Path]) -> Mat:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            return matrix_from_json_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise MatrixParseError(f"bad JSON in {path}: {e}") from None
    return parse_matrix(text)


def write_matrix(A: Mat, path: Union[str, Path], fmt: str = "text") -> None:
    if fmt == "text":
        Path(path).write_text(format_matrix(A))
    elif fmt == "json":
        Path(path).write_text(json.dumps(matrix_to_json_dict(A)) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
