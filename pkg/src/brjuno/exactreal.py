"""Exact real-number kernel: rationals, real quadratic surds, tracked floats.

Three carrier types flow through the package:

* ``fractions.Fraction`` for rationals,
* ``QuadraticSurd`` for numbers (a + b*sqrt(d))/c in a real quadratic field,
* ``MPFloat`` for arbitrary-precision floats with an attached error bound.

``as_real`` coerces user input into one of these.  Python floats are taken
at face value and converted to the exact Fraction they denote; callers who
want "the number I typed" should pass a string or Fraction instead.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from math import gcd, isqrt

import mpmath as mp

from .errors import DomainError

__all__ = [
    "QuadraticSurd",
    "MPFloat",
    "Real",
    "as_real",
    "parse_real",
    "to_mpf",
    "as_float",
    "golden_mean",
]


def _squarefree(d):
    """Split d = s*s*d0 with d0 squarefree; returns (s, d0)."""
    if d in (0, 1):
        return 1, d
    s = 1
    d0 = d
    p = 2
    while p * p <= d0:
        pp = p * p
        while d0 % pp == 0:
            d0 //= pp
            s *= p
        p += 1 if p == 2 else 2
    return s, d0


def _sign_a_plus_b_sqrt(a, b, d):
    """Exact sign of a + b*sqrt(d) for integers a, b and d >= 0."""
    if b == 0 or d == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    # mixed signs: compare a^2 with b^2 d on the side of the positive term
    lhs = a * a
    rhs = b * b * d
    if a > 0:  # b < 0: positive iff a^2 > b^2 d
        return (lhs > rhs) - (lhs < rhs)
    return (rhs > lhs) - (rhs < lhs)


class QuadraticSurd:
    """(a + b*sqrt(d))/c with integer a, b, c and squarefree d >= 0.

    Canonical form: c > 0, gcd(a, b, c) == 1, d squarefree, and d == 0
    exactly when b == 0 (so rationals embed with a unique representation).
    All arithmetic and comparisons are exact.  Mixing two surds from
    different quadratic fields raises DomainError.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b=0, d=0, c=1):
        a, b, d, c = int(a), int(b), int(d), int(c)
        if c == 0:
            raise ZeroDivisionError("denominator c must be nonzero")
        if d < 0:
            raise DomainError("negative discriminant: only real surds supported")
        s, d0 = _squarefree(d)
        b, d = b * s, d0
        if d == 1:  # sqrt(1) folds into the rational part
            a, b, d = a + b, 0, 0
        if b == 0:
            d = 0
        if d == 0:
            b = 0
        if c < 0:
            a, b, c = -a, -b, -c
        g = gcd(gcd(abs(a), abs(b)), c)
        if g > 1:
            a, b, c = a // g, b // g, c // g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticSurd is immutable")

    # -- classification -------------------------------------------------

    @property
    def is_rational(self):
        return self.b == 0

    def as_fraction(self):
        if not self.is_rational:
            raise DomainError(f"{self} is irrational")
        return Fraction(self.a, self.c)

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_rational(cls, q, d=0):
        q = Fraction(q)
        return cls(q.numerator, 0, 0, q.denominator)

    def _coerce(self, other):
        """Return other as a QuadraticSurd in a field compatible with self."""
        if isinstance(other, QuadraticSurd):
            if self.d and other.d and self.d != other.d:
                raise DomainError(
                    f"cannot mix sqrt({self.d}) with sqrt({other.d}) exactly"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticSurd.from_rational(other)
        return NotImplemented

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self.d or o.d
        return QuadraticSurd(
            self.a * o.c + o.a * self.c,
            self.b * o.c + o.b * self.c,
            d,
            self.c * o.c,
        )

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d, self.c)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self.d or o.d
        return QuadraticSurd(
            self.a * o.a + self.b * o.b * d,
            self.a * o.b + self.b * o.a,
            d,
            self.c * o.c,
        )

    __rmul__ = __mul__

    def reciprocal(self):
        if self.a == 0 and self.b == 0:
            raise ZeroDivisionError("reciprocal of zero surd")
        # c/(a + b sqrt d) = c (a - b sqrt d) / (a^2 - b^2 d)
        n = self.a * self.a - self.b * self.b * self.d
        return QuadraticSurd(self.c * self.a, -self.c * self.b, self.d, n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            return self.reciprocal() ** (-n)
        out = QuadraticSurd(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        """Galois conjugate (a - b*sqrt(d))/c."""
        return QuadraticSurd(self.a, -self.b, self.d, self.c)

    def __abs__(self):
        return -self if self._sign() < 0 else self

    # -- comparisons -----------------------------------------------------

    def _sign(self):
        return _sign_a_plus_b_sqrt(self.a, self.b, self.d)

    def _cmp(self, other):
        o = self._coerce(other if not isinstance(other, float) else Fraction(other))
        if o is NotImplemented:
            return NotImplemented
        diff_a = self.a * o.c - o.a * self.c
        diff_b = self.b * o.c - o.b * self.c
        return _sign_a_plus_b_sqrt(diff_a, diff_b, self.d or o.d)

    def __eq__(self, other):
        if isinstance(other, MPFloat):
            return NotImplemented
        try:
            c = self._cmp(other)
        except (DomainError, TypeError):
            return NotImplemented
        if c is NotImplemented:
            return NotImplemented
        return c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        if c is NotImplemented:
            return NotImplemented
        return c < 0

    def __le__(self, other):
        c = self._cmp(other)
        if c is NotImplemented:
            return NotImplemented
        return c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        if c is NotImplemented:
            return NotImplemented
        return c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        if c is NotImplemented:
            return NotImplemented
        return c >= 0

    def __hash__(self):
        if self.is_rational:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # -- floor / conversion ----------------------------------------------

    def __floor__(self):
        # bracket b*sqrt(d) by isqrt, then fix up with exact comparisons
        t = isqrt(self.b * self.b * self.d)
        if self.b >= 0:
            f = t
        else:
            f = -t if t * t == self.b * self.b * self.d else -t - 1
        k = (self.a + f) // self.c
        # floor((a + b sqrt d)/c) is k or k+1; compare exactly
        while _sign_a_plus_b_sqrt(self.a - self.c * (k + 1), self.b, self.d) >= 0:
            k += 1
        while _sign_a_plus_b_sqrt(self.a - self.c * k, self.b, self.d) < 0:
            k -= 1
        return k

    def __float__(self):
        return (self.a + self.b * math.sqrt(self.d)) / self.c

    def to_mpf(self, prec=53):
        if self.b == 0:
            with mp.workprec(prec):
                return mp.mpf(self.a) / self.c
        # a and b*sqrt(d) may nearly cancel; raise the guard until the
        # computed value provably carries prec good bits
        guard = 20
        while True:
            with mp.workprec(prec + guard):
                s = mp.sqrt(self.d)
                v = (self.a + self.b * s) / self.c
                scale = (abs(self.a) + abs(self.b) * s) / self.c
                ok = v != 0 and scale / abs(v) < mp.mpf(2) ** (guard - 6)
            if ok:
                with mp.workprec(prec):
                    return +v
            guard = 2 * guard + 20

    # -- display -----------------------------------------------------------

    def __str__(self):
        if self.is_rational:
            return str(Fraction(self.a, self.c))
        if self.b == 1:
            root = f"sqrt({self.d})"
        elif self.b == -1:
            root = f"-sqrt({self.d})"
        else:
            root = f"{self.b}*sqrt({self.d})"
        if self.a == 0:
            body = root
            need_parens = False
        else:
            sign = "+" if self.b > 0 else "-"
            mag = root.lstrip("-")
            body = f"{self.a}{sign}{mag}"
            need_parens = True
        if self.c == 1:
            return body
        return f"({body})/{self.c}" if need_parens else f"{body}/{self.c}"

    def __repr__(self):
        return f"QuadraticSurd('{self}')"


def golden_mean():
    """(sqrt(5)-1)/2 as an exact surd."""
    return QuadraticSurd(-1, 1, 5, 2)


class MPFloat:
    """An mpmath float with working precision and an absolute error bound.

    ``value`` is an mpf rounded to ``bits`` of precision; ``err`` bounds the
    distance to the intended real number (defaults to one ulp-ish bound).
    MPFloat is a carrier for inexact input, not a full interval type:
    algorithms that consume it do their own error propagation.
    """

    __slots__ = ("value", "bits", "err")

    def __init__(self, value, bits=53, err=None):
        bits = int(bits)
        if bits < 4:
            raise DomainError("MPFloat needs at least 4 bits")
        with mp.workprec(bits):
            if isinstance(value, Fraction):
                v = mp.mpf(value.numerator) / value.denominator
            elif isinstance(value, mp.mpf):
                v = +value
            else:
                v = mp.mpf(value)
        if err is None:
            err = max(abs(v), mp.mpf(1)) * mp.mpf(2) ** (1 - bits)
        self.value = v
        self.bits = bits
        self.err = mp.mpf(err)

    def __float__(self):
        return float(self.value)

    def to_mpf(self, prec=None):
        return +self.value

    def __repr__(self):
        return f"MPFloat({mp.nstr(self.value, 17)}, bits={self.bits}, err={mp.nstr(self.err, 3)})"

    def __str__(self):
        return mp.nstr(self.value, max(6, int(self.bits / 3.4)))


Real = (Fraction, QuadraticSurd, MPFloat)


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")
_SQRT_TERM_RE = re.compile(r"^([+-]?)(?:(\d+)\*?)?sqrt\((\d+)\)$")
_INT_TERM_RE = re.compile(r"^[+-]?\d+$")


def _split_terms(body):
    """Split 'a+b' / 'a-b' at top level (never inside parentheses)."""
    terms, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start:
            terms.append(body[start:i])
            start = i
    terms.append(body[start:])
    return terms


def _parse_surd(s):
    # optional trailing /C where C is a plain integer
    c = 1
    if "/" in s:
        head, _, tail = s.rpartition("/")
        if _INT_TERM_RE.match(tail) and head.count("(") == head.count(")"):
            s, c = head, int(tail)
    if s.startswith("(") and s.endswith(")"):
        inner = s[1:-1]
        if inner.count("(") == inner.count(")"):
            s = inner
    terms = _split_terms(s)
    if not 1 <= len(terms) <= 2:
        raise DomainError(f"cannot parse surd expression {s!r}")
    a = 0
    b = d = None
    for t in terms:
        m = _SQRT_TERM_RE.match(t)
        if m:
            if b is not None:
                raise DomainError(f"more than one sqrt term in {s!r}")
            sign = -1 if m.group(1) == "-" else 1
            b = sign * int(m.group(2) or 1)
            d = int(m.group(3))
        elif _INT_TERM_RE.match(t):
            a += int(t)
        else:
            raise DomainError(f"unrecognized term {t!r}")
    if b is None:
        raise DomainError(f"no sqrt term in {s!r}")
    return QuadraticSurd(a, b, d, c)


def parse_real(text):
    """Parse a string into Fraction, QuadraticSurd, or MPFloat.

    Accepted forms: integers, 'p/q', decimal literals (exact, including
    exponents), quadratic surds like '(1+sqrt(5))/2', 'sqrt(2)-1' or
    '3*sqrt(2)/4', and any of these with an '@bits' suffix to request an
    MPFloat carrier at that working precision.
    """
    s = text.strip().replace("−", "-").replace(" ", "")
    if not s:
        raise DomainError("empty number")
    bits = None
    if "@" in s:
        s, _, tail = s.rpartition("@")
        try:
            bits = int(tail)
        except ValueError:
            raise DomainError(f"bad precision suffix {tail!r}") from None
    if "sqrt" in s:
        surd = _parse_surd(s)
        if bits is None:
            return surd
        return MPFloat(surd.to_mpf(bits), bits)
    if _RATIONAL_RE.match(s):
        val = Fraction(s)
    elif _DECIMAL_RE.match(s):
        val = Fraction(s)
    else:
        raise DomainError(f"cannot parse number {text!r}")
    if bits is None:
        return val
    return MPFloat(mp.mpf(val.numerator) / val.denominator, bits)


def as_real(x):
    """Coerce x into Fraction | QuadraticSurd | MPFloat.

    Floats convert to the exact Fraction they represent in binary.
    """
    if isinstance(x, Real):
        return x
    if isinstance(x, bool):
        raise DomainError("bool is not a number here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite float {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        return parse_real(x)
    if isinstance(x, mp.mpf):
        return MPFloat(x, mp.mp.prec)
    raise DomainError(f"unsupported number type {type(x).__name__}")


def to_mpf(x, prec=53):
    """Convert any accepted carrier to an mpf at the given precision."""
    x = as_real(x)
    if isinstance(x, Fraction):
        with mp.workprec(prec):
            v = mp.mpf(x.numerator) / x.denominator
        return v
    return x.to_mpf(prec)


def as_float(x):
    return float(to_mpf(x, 60))
