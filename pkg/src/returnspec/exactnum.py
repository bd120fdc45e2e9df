"""Exact scalars of the form a + b*sqrt(d) with rational a, b.

These back the exact coordinate tags on torus points: plain rationals are
the d = 0 case, quadratic irrationals carry a squarefree d >= 2.  All
comparisons, floors and fractional parts are decided with integer
arithmetic only, so orbit generation over long windows is drift-free.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]


class ExactArithmeticError(ArithmeticError):
    """An operation would leave the field Q(sqrt(d)) the operands live in."""


def _split_square(n: int) -> tuple[int, int]:
    """Return (s, d) with n = s*s*d and d squarefree."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, d, f = 1, n, 2
    while f * f <= d:
        while d % (f * f) == 0:
            d //= f * f
            s *= f
        f += 1
    return s, d


def _floor_sqrt_term(r: int, d: int) -> int:
    """Exact floor(r * sqrt(d)) for integer r and squarefree d >= 2."""
    if r == 0:
        return 0
    root = math.isqrt(r * r * d)
    # r*sqrt(d) is irrational, so the floor for negative r shifts by one.
    return root if r > 0 else -root - 1


def _sign_pair(p: int, r: int, d: int) -> int:
    """Sign of p + r*sqrt(d) using integer arithmetic only."""
    if r == 0:
        return (p > 0) - (p < 0)
    if p == 0:
        return 1 if r > 0 else -1
    if p > 0 and r > 0:
        return 1
    if p < 0 and r < 0:
        return -1
    # Opposite signs: compare p*p against r*r*d.  Equality cannot occur
    # because d is squarefree and r != 0.
    if p > 0:
        return 1 if p * p > r * r * d else -1
    return -1 if p * p > r * r * d else 1


class QuadraticNumber:
    """Immutable exact value a + b*sqrt(d); d = 0 canonically when b = 0."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Rational, b: Rational = 0, d: int = 0):
        a = Fraction(a)
        b = Fraction(b)
        if b == 0:
            d = 0
        else:
            if d < 2:
                raise ValueError("radicand must be >= 2 when b != 0")
            s, d0 = _split_square(d)
            b *= s
            d = d0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticNumber is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def sqrt(cls, n: int) -> "QuadraticNumber":
        s, d = _split_square(n)
        if d == 1:
            return cls(s)
        return cls(0, s, d)

    @classmethod
    def coerce(cls, value) -> "QuadraticNumber":
        """Lift ints, Fractions, floats and strings to exact scalars.

        Floats are lifted to their exact binary rational value; decimal
        strings like "0.3" become 3/10.
        """
        if isinstance(value, QuadraticNumber):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, float):
            return cls(Fraction(value))
        if isinstance(value, str):
            return parse_exact(value)
        raise TypeError(f"cannot make an exact scalar from {value!r}")

    # -- integer kernel -------------------------------------------------

    def int_rep(self) -> tuple[int, int, int, int]:
        """Return (p, r, q, d) with value = (p + r*sqrt(d)) / q, q > 0."""
        q = self.a.denominator * self.b.denominator // math.gcd(
            self.a.denominator, self.b.denominator
        )
        p = self.a.numerator * (q // self.a.denominator)
        r = self.b.numerator * (q // self.b.denominator)
        return p, r, q, self.d

    def sign(self) -> int:
        p, r, _, d = self.int_rep()
        return _sign_pair(p, r, d)

    def __floor__(self) -> int:
        p, r, q, d = self.int_rep()
        return (p + _floor_sqrt_term(r, d)) // q

    def floor(self) -> int:
        return self.__floor__()

    def frac(self) -> "QuadraticNumber":
        """Fractional part, exactly in [0, 1)."""
        return self - self.floor()

    # -- arithmetic -----------------------------------------------------

    def _match(self, other) -> "QuadraticNumber":
        other = QuadraticNumber.coerce(other)
        if self.d and other.d and self.d != other.d:
            raise ExactArithmeticError(
                f"cannot combine sqrt({self.d}) with sqrt({other.d}) exactly"
            )
        return other

    def __add__(self, other):
        other = self._match(other)
        return QuadraticNumber(self.a + other.a, self.b + other.b, self.d or other.d)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._match(other)
        return QuadraticNumber(self.a - other.a, self.b - other.b, self.d or other.d)

    def __rsub__(self, other):
        return QuadraticNumber.coerce(other) - self

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(self.a * other, self.b * other, self.d)
        other = self._match(other)
        d = self.d or other.d
        b = self.a * other.b + self.b * other.a
        return QuadraticNumber(self.a * other.a + self.b * other.b * d, b, d if b else 0)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            other = Fraction(other)
        if isinstance(other, Fraction):
            return QuadraticNumber(self.a / other, self.b / other, self.d)
        raise TypeError("exact division only by rationals")

    # -- comparisons ----------------------------------------------------

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, float):
            return self.b == 0 and self.a == Fraction(other)
        if isinstance(other, QuadraticNumber):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    # -- misc -------------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b:
            raise ExactArithmeticError("value is irrational")
        return self.a

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d) if self.b else float(self.a)

    def __repr__(self):
        if self.b == 0:
            return f"QuadraticNumber({self.a})"
        return f"QuadraticNumber({self.a}, {self.b}, {self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        parts = []
        if self.a:
            parts.append(str(self.a))
        coef = "" if self.b == 1 else ("-" if self.b == -1 else f"{self.b}*")
        term = f"{coef}sqrt{self.d}"
        if parts and self.b > 0:
            return f"{parts[0]}+{term}"
        return (parts[0] if parts else "") + term


_TERM_RE = re.compile(
    r"""(?P<sign>[+-]?)\s*
        (?:
          (?P<coef>\d+(?:\.\d+)?(?:/\d+)?)\s*\*\s*sqrt\s*\(?(?P<rad1>\d+)\)?
          |sqrt\s*\(?(?P<rad2>\d+)\)?
          |(?P<num>\d+(?:\.\d+)?(?:/\d+)?)
        )\s*(?:/\s*(?P<den>\d+))?\s*""",
    re.VERBOSE,
)


def _parse_rational(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        return Fraction(Fraction(num), int(den))
    return Fraction(text)  # handles "0.3" decimally


def parse_exact(text: str) -> QuadraticNumber:
    """Parse literals like "3/10", "0.25", "sqrt2-1", "2-sqrt2", "1/2*sqrt5".

    The grammar is a signed sum of terms; each term is a rational or a
    rational multiple of sqrt(n), optionally divided by an integer.
    """
    pos, total = 0, QuadraticNumber(0)
    text = text.strip()
    if not text:
        raise ValueError("cannot parse exact literal from empty string")
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse exact literal {text!r} at offset {pos}")
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("rad1") is not None:
            term = QuadraticNumber.sqrt(int(m.group("rad1"))) * _parse_rational(m.group("coef"))
        elif m.group("rad2") is not None:
            term = QuadraticNumber.sqrt(int(m.group("rad2")))
        else:
            term = QuadraticNumber(_parse_rational(m.group("num")))
        if m.group("den"):
            term = term / int(m.group("den"))
        total = total + term * sign
        pos = m.end()
    return total
