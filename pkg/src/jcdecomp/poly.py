"""Dense univariate polynomial arithmetic over Q and F_p.

Provides the Euclidean machinery (division, gcd, extended gcd, lcm),
the formal derivative, and the square-free-part computation that the
decomposition iteration is built on.  Everything is exact; polynomials
over F_p use vectorized int64 kernels where that is provably
overflow-safe and fall back to plain Python integers otherwise.

The zero polynomial has an empty coefficient vector and degree
``NEG_INF`` (a float sentinel, deliberately never an integer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .field import (
    Field,
    FieldElement,
    FieldMismatchError,
    PrimeField,
    Raw,
    Rationals,
)

NEG_INF = float("-inf")

# int64 convolution of residues is safe while terms * (p-1)^2 stays below 2^63
_I64_LIMIT = 2**62


class PolyParseError(ValueError):
    """Raised when a polynomial string cannot be parsed."""


class DuplicateRootError(ValueError):
    """Raised when a root list passed to ``squarefree_from_roots`` repeats a root."""


def _trim(cs: list) -> list:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


class Poly:
    """Dense univariate polynomial, coefficients indexed by exponent.

    Immutable by convention; all operations return new instances.
    Coefficients are stored raw (``int`` residues or ``Fraction``),
    with trailing zeros trimmed.
    """

    __slots__ = ("field", "_c")

    def __init__(self, field: Field, coeffs: Iterable = ()):
        cs = [field.coerce(c) for c in coeffs]
        self.field = field
        self._c = tuple(_trim(cs))

    @classmethod
    def _raw(cls, field: Field, coeffs: list) -> "Poly":
        # internal: coeffs already canonical raw values, trailing zeros trimmed
        p = object.__new__(cls)
        p.field = field
        p._c = tuple(coeffs)
        return p

    @classmethod
    def zero(cls, field: Field) -> "Poly":
        return cls._raw(field, [])

    @classmethod
    def one(cls, field: Field) -> "Poly":
        return cls(field, [1])

    @classmethod
    def x(cls, field: Field) -> "Poly":
        return cls(field, [0, 1])

    @classmethod
    def monomial(cls, field: Field, deg: int, coeff=1) -> "Poly":
        c = field.coerce(coeff)
        if c == 0:
            return cls.zero(field)
        return cls._raw(field, [field.zero()] * deg + [c])

    @classmethod
    def constant(cls, field: Field, c) -> "Poly":
        return cls(field, [c])

    @classmethod
    def from_string(cls, field: Field, text: str) -> "Poly":
        return parse_poly(field, text)

    # -- basic queries ---------------------------------------------------

    @property
    def degree(self) -> Union[int, float]:
        """Degree, or ``NEG_INF`` for the zero polynomial."""
        return len(self._c) - 1 if self._c else NEG_INF

    def is_zero(self) -> bool:
        return not self._c

    def is_constant(self) -> bool:
        return len(self._c) <= 1

    def is_monic(self) -> bool:
        return bool(self._c) and self._c[-1] == self.field.one()

    def lead(self) -> FieldElement:
        if not self._c:
            raise ValueError("zero polynomial has no leading coefficient")
        return FieldElement(self.field, self._c[-1])

    def coeffs(self) -> Tuple[FieldElement, ...]:
        return tuple(FieldElement(self.field, c) for c in self._c)

    def raw_coeffs(self) -> Tuple[Raw, ...]:
        return self._c

    def __getitem__(self, i: int) -> FieldElement:
        if 0 <= i < len(self._c):
            return FieldElement(self.field, self._c[i])
        return FieldElement(self.field, self.field.zero())

    def __len__(self):
        return len(self._c)

    # -- ring operations --------------------------------------------------

    def _check(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(
                f"mixed fields: {self.field!r} and {other.field!r}"
            )
        return other

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.field, other)
        self._check(other)
        F = self.field
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly._raw(F, _trim(out))

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.field, other)
        return self + (-other)

    def __neg__(self):
        F = self.field
        return Poly._raw(F, [F.neg(c) for c in self._c])

    def __mul__(self, other):
        F = self.field
        if not isinstance(other, Poly):
            c = F.coerce(other)
            if c == 0:
                return Poly.zero(F)
            return Poly._raw(F, [F.mul(v, c) for v in self._c])
        self._check(other)
        if not self._c or not other._c:
            return Poly.zero(F)
        return Poly._raw(F, _mul_raw(F, self._c, other._c))

    __rmul__ = __mul__
    __radd__ = __add__

    def __rsub__(self, other):
        return (-self) + other

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative polynomial power")
        result = Poly.one(self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __divmod__(self, other: "Poly"):
        other = self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q, r = _divmod_raw(self.field, self._c, other._c)
        return Poly._raw(self.field, q), Poly._raw(self.field, r)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            raise ValueError("cannot normalize the zero polynomial")
        F = self.field
        lc = self._c[-1]
        if lc == F.one():
            return self
        inv = F.inv(lc)
        return Poly._raw(F, [F.mul(c, inv) for c in self._c])

    def __call__(self, x):
        """Evaluate at a scalar by Horner's rule."""
        F = self.field
        v = F.coerce(x.raw if isinstance(x, FieldElement) else x)
        acc = F.zero()
        for c in reversed(self._c):
            acc = F.add(F.mul(acc, v), c)
        return FieldElement(F, acc)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field == other.field and self._c == other._c
        if isinstance(other, (int, Fraction)):
            c = self.field.coerce(other)
            if c == 0:
                return not self._c
            return self._c == (c,)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self._c))

    def __bool__(self):
        return bool(self._c)

    def __repr__(self):
        return f"Poly({self.field!r}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


# ---------------------------------------------------------------------------
# raw coefficient kernels


def _mul_raw(F: Field, a: Sequence[Raw], b: Sequence[Raw]) -> list:
    if isinstance(F, PrimeField):
        p = F.p
        if p <= 2**31 and min(len(a), len(b)) * (p - 1) * (p - 1) < _I64_LIMIT:
            out = np.convolve(
                np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
            ) % p
            return [int(v) for v in out]
        # residues too large for int64 accumulation: exact object arithmetic
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return [v % p for v in out]
    # rationals: clear denominators, convolve integers (one gcd per output
    # coefficient instead of one per partial product), rescale once
    ia, da = _q_clear_denominators(a)
    ib, db = _q_clear_denominators(b)
    conv = np.convolve(np.asarray(ia, dtype=object), np.asarray(ib, dtype=object))
    den = da * db
    return _trim([Fraction(int(v), den) for v in conv])


def _divmod_raw(F: Field, u: Sequence[Raw], v: Sequence[Raw]) -> Tuple[list, list]:
    if len(u) < len(v):
        return [], list(u)
    if isinstance(F, PrimeField) and F.p <= 2**31:
        return _divmod_fp(u, v, F.p)
    inv_lc = F.inv(v[-1])
    r = list(u)
    dv = len(v) - 1
    q = [F.zero()] * (len(u) - dv)
    for i in range(len(u) - dv - 1, -1, -1):
        c = F.mul(r[i + dv], inv_lc)
        q[i] = c
        if c != 0:
            for j, vj in enumerate(v):
                r[i + j] = F.sub(r[i + j], F.mul(c, vj))
    del r[dv:]
    return _trim(q), _trim(r)


def _divmod_fp(u: Sequence[int], v: Sequence[int], p: int) -> Tuple[list, list]:
    if len(u) < len(v):
        return [], list(u)
    dv = len(v) - 1
    inv_lc = pow(v[-1], -1, p)
    r = np.asarray(u, dtype=np.int64).copy()
    va = np.asarray(v, dtype=np.int64)
    q = np.zeros(len(u) - dv, dtype=np.int64)
    for i in range(len(u) - dv - 1, -1, -1):
        c = (int(r[i + dv]) * inv_lc) % p
        q[i] = c
        if c:
            r[i : i + dv + 1] = (r[i : i + dv + 1] - c * va) % p
    rem = [int(x) for x in r[:dv]]
    return _trim([int(x) for x in q]), _trim(rem)


def _int_content(cs: Sequence[int]) -> int:
    g = 0
    for c in cs:
        g = math.gcd(g, c)
        if g == 1:
            break
    return g or 1


def _q_clear_denominators(cs: Sequence[Fraction]) -> Tuple[list, int]:
    den = 1
    for c in cs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return [int(c.numerator * (den // c.denominator)) for c in cs], den


def _q_to_primitive_int(cs: Sequence[Fraction]) -> list:
    ints, _ = _q_clear_denominators(cs)
    g = _int_content(ints)
    if ints[-1] < 0:
        g = -g
    return [c // g for c in ints]


def _prem_int(u: list, v: list) -> list:
    # classical pseudo-remainder of lc(v)^(deg u - deg v + 1) * u by v in Z[X]
    r = list(u)
    dv = len(v) - 1
    lv = v[-1]
    while len(r) - 1 >= dv and r:
        lead = r[-1]
        shift = len(r) - 1 - dv
        r = [lv * c for c in r]
        for j in range(dv + 1):
            r[shift + j] -= lead * v[j]
        r = _trim(r)
    return r


def _gcd_q(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    # primitive PRS over Z keeps coefficient growth polynomial
    u = _q_to_primitive_int(a)
    v = _q_to_primitive_int(b)
    if len(u) < len(v):
        u, v = v, u
    while v:
        r = _prem_int(u, v)
        if r:
            g = _int_content(r)
            if r[-1] < 0:
                g = -g
            r = [c // g for c in r]
        u, v = v, r
    lc = u[-1]
    return [Fraction(c, lc) for c in u]


# ---------------------------------------------------------------------------
# calculus and Euclidean machinery


def derivative(f: Poly) -> Poly:
    """Formal derivative: linear, with X^i mapped to i*X^(i-1)."""
    F = f.field
    if isinstance(F, PrimeField):
        p = F.p
        out = [(i * c) % p for i, c in enumerate(f._c[1:], start=1)]
    else:
        out = [i * c for i, c in enumerate(f._c[1:], start=1)]
    return Poly._raw(F, _trim(out))


def gcd(f: Poly, g: Poly) -> Poly:
    """Monic greatest common divisor via the Euclidean algorithm."""
    f._check(g)
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    F = f.field
    if isinstance(F, PrimeField) and F.p <= 2**31:
        a, b = list(f._c), list(g._c)
        if len(a) < len(b):
            a, b = b, a
        while b:
            a, b = b, _divmod_fp(a, b, F.p)[1]
        inv = pow(a[-1], -1, F.p)
        return Poly._raw(F, [(c * inv) % F.p for c in a])
    if isinstance(F, Rationals):
        return Poly._raw(F, _gcd_q(f._c, g._c))
    a, b = f, g
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


@dataclass(frozen=True)
class ExtGcd:
    """Extended-gcd certificate: ``d = r*f + s*g`` with ``d`` monic."""

    d: Poly
    r: Poly
    s: Poly


def ext_gcd(f: Poly, g: Poly) -> ExtGcd:
    """Extended Euclidean algorithm; the returned cofactors satisfy d = r*f + s*g."""
    f._check(g)
    if f.is_zero() and g.is_zero():
        raise ValueError("ext_gcd(0, 0) is undefined")
    F = f.field
    one, zero = Poly.one(F), Poly.zero(F)
    r0, r1 = f, g
    s0, s1 = one, zero
    t0, t1 = zero, one
    while not r1.is_zero():
        # Keep the active remainder monic.  Scaling the whole row (r, s, t)
        # by a nonzero constant preserves r = s*f + t*g, and over Q it stops
        # the coefficients of the remainder sequence from exploding.
        lc = r1._c[-1]
        if lc != F.one():
            c = FieldElement(F, F.inv(lc))
            r1, s1, t1 = r1 * c, s1 * c, t1 * c
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    lc_inv = FieldElement(F, F.inv(r0._c[-1]))
    return ExtGcd(d=r0 * lc_inv, r=s0 * lc_inv, s=t0 * lc_inv)


def lcm(f: Poly, g: Poly) -> Poly:
    """Monic least common multiple, computed as f*g / gcd(f, g)."""
    f._check(g)
    if f.is_zero() or g.is_zero():
        raise ValueError("lcm requires nonzero inputs")
    d = gcd(f, g)
    q, r = divmod(f * g, d)
    assert r.is_zero()
    return q.monic()


def is_squarefree(f: Poly) -> bool:
    """True iff f and its formal derivative are coprime.

    Nonzero constants count as square-free.  Note that over F_p the
    derivative may vanish identically (e.g. X^2 + 1 over F_2), in which
    case gcd(f, 0) = monic(f) != 1 and f is not square-free.
    """
    if f.is_zero():
        raise ValueError("is_squarefree is undefined for the zero polynomial")
    if f.is_constant():
        return True
    return gcd(f, derivative(f)).degree == 0


# ---------------------------------------------------------------------------
# square-free part


@dataclass(frozen=True)
class SquareFreeCert:
    """Square-free part with exponent and Bezout data.

    ``g`` is monic and square-free with ``g | f`` and ``f | g**m`` for
    the source polynomial f.  ``gtilde``/``gtilde_prime`` witness
    ``1 = gtilde * derivative(g) + gtilde_prime * g``; they are filled
    in by the producing functions and may be ``None`` on certificates
    reconstructed from serialized claims.
    """

    g: Poly
    m: int
    gtilde: Optional[Poly] = None
    gtilde_prime: Optional[Poly] = None


def bezout_for(g: Poly) -> Tuple[Poly, Poly]:
    """Cofactors (gtilde, gtilde_prime) with 1 = gtilde*D(g) + gtilde_prime*g."""
    e = ext_gcd(derivative(g), g)
    if e.d.degree != 0:
        raise ValueError(f"{g} is not square-free; no Bezout identity for (D(g), g)")
    return e.r, e.s


def _squarefree_pair(f: Poly) -> Tuple[Poly, int]:
    F = f.field
    df = derivative(f)
    if not df.is_zero():
        f1 = gcd(f, df)
        if f1.degree == 0:
            return f.monic(), 1
        f2, rem = divmod(f, f1)
        assert rem.is_zero()
        g1, m1 = _squarefree_pair(f1)
        g2, m2 = _squarefree_pair(f2)
        return lcm(g1, g2), m1 + m2
    # derivative vanished: positive characteristic, f is a p-th power
    p = F.characteristic
    assert p > 0, "zero derivative of a non-constant polynomial needs char p > 0"
    cs = f.raw_coeffs()
    # coefficients at exponents not divisible by p vanish when D(f) = 0
    h = Poly._raw(F, _trim([F.pth_root(cs[i]) for i in range(0, len(cs), p)]))
    g, m_prime = _squarefree_pair(h)
    return g, m_prime * p


def squarefree_part(f: Poly) -> SquareFreeCert:
    """Square-free g with g | f and f | g**m, plus Bezout cofactors.

    Follows the inductive construction: when the derivative is nonzero,
    split off f1 = gcd(f, D(f)), recurse on f1 and f/f1 and combine by
    lcm with m = m1 + m2; when the derivative vanishes (char p), take
    the coefficientwise p-th root and recurse with m = m' * p.  The
    returned m is valid but not necessarily minimal.
    """
    if f.is_constant():
        raise ValueError("squarefree_part requires a non-constant polynomial")
    g, m = _squarefree_pair(f)
    gtilde, gtilde_prime = bezout_for(g)
    return SquareFreeCert(g=g, m=m, gtilde=gtilde, gtilde_prime=gtilde_prime)


def squarefree_part_char0(f: Poly) -> Poly:
    """Characteristic-0 shortcut: the monic radical f / gcd(f, D(f))."""
    if not isinstance(f.field, Rationals):
        raise ValueError("the division shortcut is only valid in characteristic 0")
    if f.is_constant():
        raise ValueError("squarefree_part_char0 requires a non-constant polynomial")
    q, r = divmod(f, gcd(f, derivative(f)))
    assert r.is_zero()
    return q.monic()


def squarefree_from_roots(field: Field, roots: Sequence[Tuple[object, int]]) -> SquareFreeCert:
    """Certificate for a split polynomial given its distinct roots.

    ``roots`` lists (root, multiplicity) pairs; g is the product of the
    X - root factors and m the largest multiplicity.  Valid over any
    field, perfect or not, since distinct roots make g square-free.
    """
    if not roots:
        raise ValueError("need at least one root")
    raws = []
    mults = []
    for lam, n in roots:
        raws.append(field.coerce(lam))
        if n < 1:
            raise ValueError(f"multiplicity must be >= 1, got {n}")
        mults.append(int(n))
    if len(set(raws)) != len(raws):
        raise DuplicateRootError("roots must be pairwise distinct")
    g = Poly.one(field)
    for lam in raws:
        g = g * Poly(field, [field.neg(lam), field.one()])
    gtilde, gtilde_prime = bezout_for(g)
    return SquareFreeCert(g=g, m=max(mults), gtilde=gtilde, gtilde_prime=gtilde_prime)


# ---------------------------------------------------------------------------
# composition and modular arithmetic


def compose(h: Poly, b: Poly) -> Poly:
    """h(b) in K[X], by Horner."""
    h._check(b)
    F = h.field
    acc = Poly.zero(F)
    for c in reversed(h._c):
        acc = acc * b + Poly.constant(F, c)
    return acc


def compose_mod(h: Poly, b: Poly, f: Poly) -> Poly:
    """h(b) reduced mod f: Horner in the quotient ring K[X]/(f)."""
    h._check(b)
    h._check(f)
    if f.is_zero():
        raise ZeroDivisionError("zero modulus")
    if f.degree < 1:
        raise ValueError("modulus must be non-constant")
    F = h.field
    acc = Poly.zero(F)
    b = b % f
    for c in reversed(h._c):
        acc = (acc * b + Poly.constant(F, c)) % f
    return acc


def pow_mod(g: Poly, e: int, f: Poly) -> Poly:
    """g**e mod f by repeated squaring; degrees never exceed deg f."""
    if f.is_zero():
        raise ZeroDivisionError("zero modulus")
    if e < 0:
        raise ValueError("negative exponent")
    result = Poly.one(g.field) % f
    base = g % f
    while e:
        if e & 1:
            result = (result * base) % f
        base = (base * base) % f
        e >>= 1
    return result


def divides(g: Poly, f: Poly) -> bool:
    """True iff g | f (g nonzero)."""
    if g.is_zero():
        raise ZeroDivisionError("divisibility by the zero polynomial")
    return (f % g).is_zero()


# ---------------------------------------------------------------------------
# text format


def format_poly(f: Poly) -> str:
    """Render in symbolic form, highest degree first: ``X^2 - 3/2*X + 1``."""
    if f.is_zero():
        return "0"
    F = f.field
    one = F.one()
    parts = []
    for d in range(len(f._c) - 1, -1, -1):
        c = f._c[d]
        if c == 0:
            continue
        neg = isinstance(c, Fraction) and c < 0
        mag = -c if neg else c
        if d == 0:
            body = F.format_raw(mag)
        elif mag == one:
            body = "X" if d == 1 else f"X^{d}"
        else:
            body = f"{F.format_raw(mag)}*X" + ("" if d == 1 else f"^{d}")
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


def _parse_term(field: Field, term: str):
    t = term.replace("x", "X")
    if "X" not in t:
        return 0, field.parse_raw(t)
    head, _, tail = t.partition("X")
    head = head.strip()
    if head in ("", "+"):
        coeff = field.one()
    elif head == "-":
        coeff = field.neg(field.one())
    else:
        if head.endswith("*"):
            head = head[:-1]
        coeff = field.parse_raw(head)
    tail = tail.strip()
    if tail == "":
        deg = 1
    elif tail.startswith("^"):
        try:
            deg = int(tail[1:])
        except ValueError:
            raise PolyParseError(f"bad exponent in term {term!r}") from None
        if deg < 0:
            raise PolyParseError(f"negative exponent in term {term!r}")
    else:
        raise PolyParseError(f"malformed term {term!r}")
    return deg, coeff


def parse_poly(field: Field, text: str) -> Poly:
    """Parse either a comma list of coefficients (low to high) or symbolic form.

    ``1,0,1`` and ``X^2+1`` denote the same polynomial.  A bare scalar
    is a constant.
    """
    s = text.strip()
    if not s:
        raise PolyParseError("empty polynomial string")
    try:
        if "X" in s or "x" in s:
            compact = s.replace(" ", "")
            terms = []
            start = 0
            for i in range(1, len(compact)):
                if compact[i] in "+-" and compact[i - 1] not in "+-*^/":
                    terms.append(compact[start:i])
                    start = i
            terms.append(compact[start:])
            out: dict = {}
            F = field
            for term in terms:
                if term in ("+", "-") or not term:
                    raise PolyParseError(f"dangling sign in {text!r}")
                sign = 1
                if term[0] == "+":
                    term = term[1:]
                elif term[0] == "-":
                    sign = -1
                    term = term[1:]
                deg, coeff = _parse_term(F, term)
                if sign < 0:
                    coeff = F.neg(coeff)
                out[deg] = F.add(out.get(deg, F.zero()), coeff)
            if not out:
                return Poly.zero(field)
            cs = [F.zero()] * (max(out) + 1)
            for d, c in out.items():
                cs[d] = c
            return Poly._raw(field, _trim(cs))
        if "," in s:
            return Poly._raw(field, _trim([field.parse_raw(c) for c in s.split(",")]))
        return Poly._raw(field, _trim([field.parse_raw(s)]))
    except PolyParseError:
        raise
    except ValueError as e:
        raise PolyParseError(f"cannot parse polynomial {text!r}: {e}") from None
