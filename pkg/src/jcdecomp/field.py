"""Exact scalar arithmetic over the rationals and prime fields.

Two fields are supported: Q (arbitrary-precision rationals, backed by
``fractions.Fraction``) and F_p for a prime p (canonical residues in
``[0, p)``).  Both are perfect fields, which is what the square-free
machinery in :mod:`jcdecomp.poly` needs.  Extension fields F_{p^k} with
k > 1 are deliberately rejected.

Raw element values are plain ``Fraction`` or ``int`` objects; the
:class:`FieldElement` wrapper pairs a raw value with its field so that
mixed-field arithmetic is caught instead of silently producing garbage.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Raw = Union[int, Fraction]


class FieldMismatchError(TypeError):
    """Raised when an operation mixes elements of different fields."""


class UnsupportedFieldError(ValueError):
    """Raised when an operation is not defined over the given field."""


class ScalarParseError(ValueError):
    """Raised when a scalar string cannot be parsed."""


def _is_prime(p: int) -> bool:
    # trial division up to sqrt(p); p is small-to-moderate by design
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Field:
    """Base class for the two supported fields.

    Subclasses operate on *raw* values (``int`` residues for F_p,
    ``Fraction`` for Q).  The raw-level methods are what :class:`Poly`
    and :class:`Mat` use internally; user-facing code usually goes
    through :class:`FieldElement`.
    """

    characteristic: int

    # -- raw operations -------------------------------------------------

    def coerce(self, x) -> Raw:
        raise NotImplementedError

    def add(self, a: Raw, b: Raw) -> Raw:
        raise NotImplementedError

    def sub(self, a: Raw, b: Raw) -> Raw:
        raise NotImplementedError

    def mul(self, a: Raw, b: Raw) -> Raw:
        raise NotImplementedError

    def neg(self, a: Raw) -> Raw:
        raise NotImplementedError

    def inv(self, a: Raw) -> Raw:
        raise NotImplementedError

    def div(self, a: Raw, b: Raw) -> Raw:
        return self.mul(a, self.inv(b))

    def pth_root(self, a: Raw) -> Raw:
        """Return b with b**p == a, p the characteristic.

        On F_p the Frobenius x -> x**p is the identity, so this is a
        itself.  Over Q there is no characteristic-p root to take and
        the call is rejected.
        """
        raise NotImplementedError

    def zero(self) -> Raw:
        raise NotImplementedError

    def one(self) -> Raw:
        raise NotImplementedError

    # -- wrapper + text -------------------------------------------------

    def element(self, x) -> "FieldElement":
        return FieldElement(self, self.coerce(x))

    def parse(self, text: str) -> "FieldElement":
        return FieldElement(self, self.parse_raw(text))

    def parse_raw(self, text: str) -> Raw:
        raise NotImplementedError

    def format_raw(self, a: Raw) -> str:
        raise NotImplementedError

    def random_raw(self, rng) -> Raw:
        raise NotImplementedError

    def random_element(self, rng) -> "FieldElement":
        return FieldElement(self, self.random_raw(rng))


class Rationals(Field):
    """The field Q.  Elements are always-reduced ``Fraction`` values."""

    characteristic = 0

    def coerce(self, x) -> Fraction:
        if isinstance(x, FieldElement):
            if x.field != self:
                raise FieldMismatchError(f"cannot coerce {x!r} into Q")
            return x.raw
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise TypeError(f"cannot interpret {x!r} as a rational")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in Q")
        return 1 / a

    def pth_root(self, a):
        raise UnsupportedFieldError("p-th root is only defined in characteristic p > 0")

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def parse_raw(self, text: str) -> Fraction:
        s = text.strip()
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as e:
            raise ScalarParseError(f"bad rational scalar {text!r}: {e}") from None

    def format_raw(self, a: Fraction) -> str:
        return str(a)

    def random_raw(self, rng) -> Fraction:
        return Fraction(rng.randint(-6, 6), rng.randint(1, 4))

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class PrimeField(Field):
    """The field F_p for prime p.  Elements are residues in [0, p)."""

    def __init__(self, p: int):
        if not isinstance(p, int) or p < 2:
            raise UnsupportedFieldError(f"field order must be an integer >= 2, got {p!r}")
        if not _is_prime(p):
            raise UnsupportedFieldError(
                f"{p} is not prime; extension fields F_(p^k) are not supported"
            )
        self.p = p
        self.characteristic = p

    def coerce(self, x) -> int:
        if isinstance(x, FieldElement):
            if x.field != self:
                raise FieldMismatchError(f"cannot coerce {x!r} into F_{self.p}")
            return x.raw
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            if x.denominator == 1:
                return x.numerator % self.p
            raise TypeError(f"cannot interpret non-integer {x!r} in F_{self.p}")
        raise TypeError(f"cannot interpret {x!r} as an element of F_{self.p}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of 0 in F_{self.p}")
        return pow(a, -1, self.p)

    def pth_root(self, a):
        # Frobenius is the identity on the prime field: a**p == a
        return a % self.p

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1 % self.p

    def parse_raw(self, text: str) -> int:
        s = text.strip()
        try:
            return int(s, 10) % self.p
        except ValueError:
            raise ScalarParseError(f"bad F_{self.p} scalar {text!r}") from None

    def format_raw(self, a: int) -> str:
        return str(a)

    def random_raw(self, rng) -> int:
        return rng.randrange(self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"F_{self.p}"


#: Shared instance of Q; PrimeField instances compare structurally anyway.
QQ = Rationals()


class FieldElement:
    """An immutable scalar tagged with its field.

    Supports the usual operators; mixing elements of different fields
    raises :class:`FieldMismatchError`.  Plain ints are coerced into
    the element's own field.
    """

    __slots__ = ("field", "raw")

    def __init__(self, field: Field, raw: Raw):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "raw", raw)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _raw_of(self, other) -> Raw:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(
                    f"mixed fields: {self.field!r} and {other.field!r}"
                )
            return other.raw
        return self.field.coerce(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.raw, self._raw_of(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.raw, self._raw_of(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._raw_of(other), self.raw))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.raw, self._raw_of(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.raw))

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.raw, self._raw_of(other)))

    def __rtruediv__(self, other):
        return FieldElement(self.field, self.field.div(self._raw_of(other), self.raw))

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.raw))

    def pth_root(self) -> "FieldElement":
        return FieldElement(self.field, self.field.pth_root(self.raw))

    def is_zero(self) -> bool:
        return self.raw == 0

    def __bool__(self):
        return self.raw != 0

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.raw == other.raw
        if isinstance(other, (int, Fraction)):
            try:
                return self.raw == self.field.coerce(other)
            except TypeError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.raw))

    def __repr__(self):
        return f"{self.field!r}({self.field.format_raw(self.raw)})"

    def __str__(self):
        return self.field.format_raw(self.raw)
