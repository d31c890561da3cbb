"""Exact scalar arithmetic: rationals and one real quadratic extension.

Every scalar is either a ``fractions.Fraction`` or a ``QuadElement``
(a + b*sqrt(d) with rational a, b).  A field object fixes which kind is in
play, coerces inputs, and evaluates scalars into floats through the chosen
real embedding of sqrt(d).  All ring operations are exact; sign queries on
quadratic elements are decided exactly (no floats).
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import FieldMismatch


def _is_squarefree(n: int) -> bool:
    if n <= 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


class RationalField:
    """The field of rational numbers; elements are Fractions."""

    is_quadratic = False

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, QuadElement):
            if x.b == 0:
                return x.a
            raise FieldMismatch("quadratic element in rational context")
        if isinstance(x, str):
            return Fraction(x)
        raise FieldMismatch(f"cannot coerce {x!r} into the rationals")

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def real_value(self, x) -> float:
        return float(self.coerce(x))

    def is_positive(self, x) -> bool:
        return self.coerce(x) > 0

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class QuadraticField:
    """Q(sqrt(d)) for squarefree d > 1, with a fixed real embedding sign.

    The embedding sends sqrt(d) to ``sign * sqrt(d)`` in the reals; it is the
    only place the choice of real embedding enters the library.
    """

    is_quadratic = True

    def __init__(self, d: int, embedding: str = "+"):
        if not _is_squarefree(d):
            raise ValueError(f"d must be squarefree and > 1, got {d}")
        if embedding not in ("+", "-"):
            raise ValueError("embedding must be '+' or '-'")
        self.d = d
        self.embedding = embedding
        self._sign = 1 if embedding == "+" else -1

    def element(self, a, b=0) -> "QuadElement":
        return QuadElement(Fraction(a), Fraction(b), self)

    @property
    def sqrt_gen(self) -> "QuadElement":
        return QuadElement(Fraction(0), Fraction(1), self)

    def coerce(self, x) -> "QuadElement":
        if isinstance(x, QuadElement):
            if x.field is not self and (x.field.d != self.d or x.field.embedding != self.embedding):
                raise FieldMismatch("element of a different quadratic field")
            return QuadElement(x.a, x.b, self)
        if isinstance(x, (int, Fraction)):
            return QuadElement(Fraction(x), Fraction(0), self)
        raise FieldMismatch(f"cannot coerce {x!r} into Q(sqrt({self.d}))")

    @property
    def zero(self):
        return QuadElement(Fraction(0), Fraction(0), self)

    @property
    def one(self):
        return QuadElement(Fraction(1), Fraction(0), self)

    def real_value(self, x) -> float:
        x = self.coerce(x)
        return float(x.a) + self._sign * float(x.b) * math.sqrt(self.d)

    def is_positive(self, x) -> bool:
        return self.coerce(x).sign() > 0

    def __eq__(self, other):
        return (
            isinstance(other, QuadraticField)
            and other.d == self.d
            and other.embedding == self.embedding
        )

    def __hash__(self):
        return hash(("quad", self.d, self.embedding))

    def __repr__(self):
        return f"QQ(sqrt({self.d}))[{self.embedding}]"


QQ = RationalField()


class QuadElement:
    """a + b*sqrt(d), immutable, with exact arithmetic."""

    __slots__ = ("a", "b", "field")

    def __init__(self, a: Fraction, b: Fraction, field: QuadraticField):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "field", field)

    def __setattr__(self, *args):
        raise AttributeError("QuadElement is immutable")

    def _lift(self, other):
        if isinstance(other, QuadElement):
            if other.field.d != self.field.d or other.field.embedding != self.field.embedding:
                raise FieldMismatch("mixed quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElement(Fraction(other), Fraction(0), self.field)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadElement(self.a + o.a, self.b + o.b, self.field)

    __radd__ = __add__

    def __neg__(self):
        return QuadElement(-self.a, -self.b, self.field)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadElement(self.a - o.a, self.b - o.b, self.field)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        d = self.field.d
        return QuadElement(
            self.a * o.a + d * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.field,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadElement":
        # norm a^2 - d b^2 is nonzero for nonzero elements since d is not a square
        n = self.a * self.a - self.field.d * self.b * self.b
        if n == 0:
            raise ZeroDivisionError("division by zero quadratic element")
        return QuadElement(self.a / n, -self.b / n, self.field)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def sign(self) -> int:
        """Exact sign of the real embedding value."""
        sb = self.b if self.field.embedding == "+" else -self.b
        if sb == 0:
            return (self.a > 0) - (self.a < 0)
        if self.a == 0:
            return 1 if sb > 0 else -1
        if self.a > 0 and sb > 0:
            return 1
        if self.a < 0 and sb < 0:
            return -1
        # opposite signs: compare a^2 with d b^2
        lhs, rhs = self.a * self.a, self.field.d * sb * sb
        if lhs == rhs:
            return 0
        dominant_a = lhs > rhs
        return (1 if self.a > 0 else -1) if dominant_a else (1 if sb > 0 else -1)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadElement):
            return (
                self.field.d == other.field.d
                and self.field.embedding == other.field.embedding
                and self.a == other.a
                and self.b == other.b
            )
        return NotImplemented

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.field.d, self.field.embedding))

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        return f"({self.a}+{self.b}*sqrt{self.field.d})"
