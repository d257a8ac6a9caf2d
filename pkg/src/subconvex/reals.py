"""Certified real parameters: rationals, quadratic surds and decimal strings.

Beatty membership and rational approximation both need exact floors of
expressions like ``alpha*m + beta``.  Rationals and quadratic surds are
handled exactly: they live in the field ``Q(sqrt(d1), sqrt(d2), ...)``
restricted to linear combinations, and floors are decided by interval
refinement with integer square roots.  Decimal strings carry an explicit
error bound and raise :class:`UncertifiableReal` when that bound is too wide
to decide a floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Union

from .errors import InvalidParam, ParseError, UncertifiableReal

_MAX_BITS = 1 << 16


def is_squarefree(d: int) -> bool:
    if d < 1:
        return False
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


class QuadLinear:
    """Exact number ``r + sum_d c_d * sqrt(d)`` with rational r, c_d.

    Every d is squarefree and > 1, so distinct square roots are linearly
    independent over Q and the value is rational iff no surd terms remain.
    """

    __slots__ = ("rational", "surds")

    def __init__(self, rational=0, surds=None):
        self.rational = Fraction(rational)
        self.surds = {d: Fraction(c) for d, c in (surds or {}).items() if c != 0}

    @classmethod
    def surd(cls, u, v, d, w) -> "QuadLinear":
        """(u + v*sqrt(d)) / w, with d squarefree."""
        if d == 1:
            return cls(Fraction(u + v, w))
        return cls(Fraction(u, w), {d: Fraction(v, w)})

    def is_rational(self) -> bool:
        return not self.surds

    def __add__(self, other):
        other = _lift(other)
        surds = dict(self.surds)
        for d, c in other.surds.items():
            surds[d] = surds.get(d, 0) + c
        return QuadLinear(self.rational + other.rational, surds)

    __radd__ = __add__

    def __neg__(self):
        return QuadLinear(-self.rational, {d: -c for d, c in self.surds.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, k):
        if isinstance(k, QuadLinear):
            if k.is_rational():
                k = k.rational
            elif self.is_rational():
                return k * self.rational
            else:
                return self._mul_surd(k)
        k = Fraction(k)
        return QuadLinear(self.rational * k, {d: c * k for d, c in self.surds.items()})

    __rmul__ = __mul__

    def _mul_surd(self, other: "QuadLinear") -> "QuadLinear":
        out = QuadLinear(self.rational * other.rational)
        for d, c in other.surds.items():
            out = out + QuadLinear(0, {d: c * self.rational})
        for d, c in self.surds.items():
            out = out + QuadLinear(0, {d: c * other.rational})
            for e, c2 in other.surds.items():
                out = out + _sqrt_product(d, e) * (c * c2)
        return out

    def reciprocal(self) -> "QuadLinear":
        if self.is_rational():
            if self.rational == 0:
                raise ZeroDivisionError("reciprocal of zero")
            return QuadLinear(1 / self.rational)
        if len(self.surds) != 1:
            raise InvalidParam("reciprocal supported only for a single square root")
        ((d, s),) = self.surds.items()
        r = self.rational
        norm = r * r - s * s * d
        return QuadLinear(r / norm, {d: -s / norm})

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        """Interval (lo, hi) with lo < value < hi (both equal when rational)."""
        lo = hi = self.rational
        scale = 1 << bits
        for d, c in self.surds.items():
            s = math.isqrt(d << (2 * bits))
            a, b = c * Fraction(s, scale), c * Fraction(s + 1, scale)
            if c > 0:
                lo, hi = lo + a, hi + b
            else:
                lo, hi = lo + b, hi + a
        return lo, hi

    def floor(self) -> int:
        if self.is_rational():
            return math.floor(self.rational)
        bits = 64
        while bits <= _MAX_BITS:
            lo, hi = self.enclosure(bits)
            f = math.floor(lo)
            if math.floor(hi) == f:
                return f
            bits *= 2
        raise UncertifiableReal("floor refinement did not converge")

    def sign(self) -> int:
        if self.is_rational():
            return (self.rational > 0) - (self.rational < 0)
        return 1 if self.floor() >= 0 else -1

    def scaled_floor(self, bits: int) -> int:
        """floor(value * 2**bits), exactly."""
        return (self * (1 << bits)).floor()

    def __float__(self) -> float:
        if self.is_rational():
            return float(self.rational)
        return self.scaled_floor(80) / 2.0**80

    def __eq__(self, other):
        try:
            other = _lift(other)
        except TypeError:
            return NotImplemented
        return self.rational == other.rational and self.surds == other.surds

    def __hash__(self):
        return hash((self.rational, tuple(sorted(self.surds.items()))))

    def __repr__(self):
        terms = [str(self.rational)] + [f"{c}*sqrt({d})" for d, c in sorted(self.surds.items())]
        return f"QuadLinear({' + '.join(terms)})"


def _sqrt_product(d: int, e: int) -> QuadLinear:
    # sqrt(d)*sqrt(e) = g*sqrt(d*e/g^2) with g = gcd(d, e) for squarefree d, e
    g = math.gcd(d, e)
    rest = (d // g) * (e // g)
    if rest == 1:
        return QuadLinear(g)
    return QuadLinear(0, {rest: Fraction(g)})


def _lift(x) -> QuadLinear:
    if isinstance(x, QuadLinear):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadLinear(x)
    raise TypeError(f"cannot lift {type(x).__name__} to QuadLinear")


@dataclass(frozen=True)
class Rational:
    p: int
    q: int = 1

    def __post_init__(self):
        if self.q <= 0:
            raise InvalidParam("Rational denominator must be positive")

    def exact(self) -> QuadLinear:
        return QuadLinear(Fraction(self.p, self.q))

    @property
    def error(self) -> Fraction:
        return Fraction(0)

    def to_text(self) -> str:
        return f"rational {self.p} {self.q}"

    def __float__(self):
        return self.p / self.q


@dataclass(frozen=True)
class QuadraticSurd:
    """(u + v*sqrt(d)) / w with d squarefree and not a perfect square."""

    u: int
    v: int
    d: int
    w: int = 1

    def __post_init__(self):
        if self.w <= 0:
            raise InvalidParam("QuadraticSurd needs w > 0")
        if self.d < 2 or not is_squarefree(self.d):
            raise InvalidParam(f"QuadraticSurd needs squarefree d > 1, got {self.d}")

    def exact(self) -> QuadLinear:
        return QuadLinear.surd(self.u, self.v, self.d, self.w)

    @property
    def error(self) -> Fraction:
        return Fraction(0)

    def to_text(self) -> str:
        return f"surd {self.u} {self.v} {self.d} {self.w}"

    def __float__(self):
        return float(self.exact())


@dataclass(frozen=True)
class DecimalString:
    """A decimal literal with a certified absolute error bound."""

    digits: str
    error_text: str = "0"

    def __post_init__(self):
        try:
            Decimal(self.digits)
            err = Decimal(self.error_text)
        except InvalidOperation as exc:
            raise InvalidParam(f"bad decimal literal: {exc}") from None
        if err < 0:
            raise InvalidParam("decimal error bound must be nonnegative")

    @property
    def value(self) -> Fraction:
        return Fraction(Decimal(self.digits))

    @property
    def error(self) -> Fraction:
        return Fraction(Decimal(self.error_text))

    def exact(self):
        return None

    def to_text(self) -> str:
        return f"decimal {self.digits} {self.error_text}"

    def __float__(self):
        return float(self.value)


RealSpec = Union[Rational, QuadraticSurd, DecimalString]


def coerce_real(x) -> RealSpec:
    """Turn ints, Fractions and floats into exact Rationals; pass RealSpecs through."""
    if isinstance(x, (Rational, QuadraticSurd, DecimalString)):
        return x
    if isinstance(x, bool):
        raise InvalidParam("bool is not a real parameter")
    if isinstance(x, (int, float, Fraction)):
        f = Fraction(x)
        return Rational(f.numerator, f.denominator)
    raise InvalidParam(f"unsupported real parameter type {type(x).__name__}")


def approx(x: RealSpec, bits: int = 96) -> tuple[Fraction, Fraction]:
    """Return (center, radius) with |x - center| <= radius."""
    ex = x.exact()
    if ex is None:
        return x.value, x.error
    if ex.is_rational():
        return ex.rational, Fraction(0)
    lo, hi = ex.enclosure(bits)
    return (lo + hi) / 2, (hi - lo) / 2


def floor_affine(alpha: RealSpec, m: int, beta: RealSpec) -> int:
    """floor(alpha*m + beta), certified or UncertifiableReal."""
    ea, eb = alpha.exact(), beta.exact()
    if ea is not None and eb is not None:
        return (ea * m + eb).floor()
    ca, ra = approx(alpha, 128)
    cb, rb = approx(beta, 128)
    center = ca * m + cb
    radius = ra * abs(m) + rb
    lo, hi = center - radius, center + radius
    f = math.floor(lo)
    if math.floor(hi) != f or hi == f + 1:
        raise UncertifiableReal(
            f"floor of alpha*{m}+beta undecidable: value within {float(radius):.3g} of an integer"
        )
    return f


def reciprocal(x: RealSpec) -> RealSpec:
    ex = x.exact()
    if ex is None:
        raise InvalidParam("reciprocal of a decimal string is not certified; supply it directly")
    inv = ex.reciprocal()
    if inv.is_rational():
        return Rational(inv.rational.numerator, inv.rational.denominator)
    ((d, s),) = inv.surds.items()
    r = inv.rational
    w = math.lcm(r.denominator, s.denominator)
    return QuadraticSurd(int(r * w), int(s * w), d, w)


def real_to_text(x: RealSpec) -> str:
    return coerce_real(x).to_text()


def _int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer, got {tok!r}") from None


def parse_real(tokens: list[str], pos: int) -> tuple[RealSpec, int]:
    """Parse one real starting at ``tokens[pos]``.

    Forms: ``rational p q``, ``surd u v d w``, ``decimal DIGITS ERR`` or a bare
    numeric literal (``3``, ``-0.25``, ``3/7``) read as an exact rational.
    """
    if pos >= len(tokens):
        raise ParseError("expected a real number, got end of input")
    head = tokens[pos]
    try:
        if head == "rational":
            if pos + 2 >= len(tokens):
                raise ParseError("rational needs p q")
            return Rational(_int(tokens[pos + 1]), _int(tokens[pos + 2])), pos + 3
        if head == "surd":
            if pos + 4 >= len(tokens):
                raise ParseError("surd needs u v d w")
            u, v, d, w = (_int(t) for t in tokens[pos + 1 : pos + 5])
            return QuadraticSurd(u, v, d, w), pos + 5
        if head == "decimal":
            if pos + 2 >= len(tokens):
                raise ParseError("decimal needs DIGITS ERR")
            return DecimalString(tokens[pos + 1], tokens[pos + 2]), pos + 3
    except InvalidParam as exc:
        raise ParseError(str(exc)) from None
    try:
        f = Fraction(head)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"expected a real number, got {head!r}") from None
    return Rational(f.numerator, f.denominator), pos + 1


def parse_real_text(text: str) -> RealSpec:
    tokens = text.split()
    x, pos = parse_real(tokens, 0)
    if pos != len(tokens):
        raise ParseError(f"trailing tokens after real: {tokens[pos:]}")
    return x
