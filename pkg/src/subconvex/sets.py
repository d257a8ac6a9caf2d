"""Integer sets as expression trees, materialized to exact bitmaps over [1, N].

Text grammar (prefix, whitespace separated; see README for the full table)::

    naturals
    rfree R
    beatty REAL REAL
    complement E | intersect E E | union E E | difference E E
    affine Q A E
    perturb E REMOVE ADD
    splice K LO HI E ... (K triples, intervals (LO, HI] partitioning (0, 1])
    explicit K n1 ... nK

REAL is ``rational p q``, ``surd u v d w``, ``decimal DIGITS ERR`` or a bare
literal such as ``0.3`` or ``3/7`` (read as an exact rational).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, InvalidParam, ParseError
from .reals import (
    RealSpec,
    approx,
    coerce_real,
    floor_affine,
    parse_real,
)


@dataclass(frozen=True)
class IndicatorSlice:
    """Membership bitmap of a set restricted to [1, n_max].

    ``bits`` has length ``n_max + 1``; ``bits[n]`` is membership of n and
    ``bits[0]`` is always False.
    """

    n_max: int
    bits: np.ndarray = field(repr=False)
    count: int = field(init=False)

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (self.n_max + 1,):
            raise InvalidParam(f"bits must have length n_max+1={self.n_max + 1}")
        if bits[0]:
            bits = bits.copy()
            bits[0] = False
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "count", int(np.count_nonzero(bits)))

    @property
    def N(self) -> int:
        return self.n_max

    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def prefix(self, m: int) -> "IndicatorSlice":
        if not 1 <= m <= self.n_max:
            raise InvalidParam(f"prefix length {m} outside [1, {self.n_max}]")
        return IndicatorSlice(m, self.bits[: m + 1])

    def __contains__(self, n) -> bool:
        return 1 <= n <= self.n_max and bool(self.bits[n])


# ---------------------------------------------------------------- expressions


class SetExpr:
    """Base class; subclasses are frozen dataclasses."""

    def _bits(self, N: int) -> np.ndarray:
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError

    def scale_dependent(self) -> bool:
        return any(c.scale_dependent() for c in self.children())

    def children(self) -> tuple["SetExpr", ...]:
        return ()

    def __str__(self):
        return self.to_text()


def _empty(N: int) -> np.ndarray:
    return np.zeros(N + 1, dtype=bool)


@dataclass(frozen=True)
class Naturals(SetExpr):
    def _bits(self, N):
        b = np.ones(N + 1, dtype=bool)
        b[0] = False
        return b

    def to_text(self):
        return "naturals"


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if s[p]:
            s[p * p :: p] = False
    return np.flatnonzero(s)


def _iroot(n: int, r: int) -> int:
    """floor(n ** (1/r)) for n >= 0."""
    x = int(round(n ** (1.0 / r)))
    while x**r > n:
        x -= 1
    while (x + 1) ** r <= n:
        x += 1
    return x


@dataclass(frozen=True)
class RFree(SetExpr):
    r: int

    def __post_init__(self):
        if not isinstance(self.r, int) or self.r < 2:
            raise InvalidParam(f"rfree needs integer r >= 2, got {self.r!r}")

    def _bits(self, N):
        b = np.ones(N + 1, dtype=bool)
        b[0] = False
        for p in primes_upto(_iroot(N, self.r)):
            pr = int(p) ** self.r
            b[pr::pr] = False
        return b

    def to_text(self):
        return f"rfree {self.r}"


@dataclass(frozen=True)
class Beatty(SetExpr):
    """{floor(alpha*m + beta) : m >= 1} intersected with the naturals."""

    alpha: RealSpec
    beta: RealSpec = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", coerce_real(self.alpha))
        object.__setattr__(self, "beta", coerce_real(self.beta))
        c, r = approx(self.alpha)
        if c - r <= 0:
            ex = self.alpha.exact()
            if ex is None or ex.sign() <= 0:
                raise InvalidParam("beatty needs alpha > 0 (certified)")

    def _bits(self, N):
        alpha, beta = self.alpha, self.beta
        b = _empty(N)
        one = Fraction(1)
        ex = alpha.exact()
        if ex is not None:
            above_one = (ex - one).sign() > 0
        else:
            c, r = approx(alpha)
            if c - r > 1:
                above_one = True
            elif c + r <= 1:
                above_one = False
            else:
                raise InvalidParam("cannot certify whether decimal alpha exceeds 1")
        if not above_one:
            # gaps are 0 or 1, so every integer from the first value on is hit
            start = max(1, floor_affine(alpha, 1, beta))
            if start <= N:
                b[start:] = True
            return b
        return _beatty_direct(alpha, beta, N, b)

    def to_text(self):
        return f"beatty {self.alpha.to_text()} {self.beta.to_text()}"


def _beatty_direct(alpha: RealSpec, beta: RealSpec, N: int, b: np.ndarray) -> np.ndarray:
    ca, ra = approx(alpha)
    cb, rb = approx(beta)
    af, bf = float(ca), float(cb)
    m_hi = int((N + 1 - bf) / af) + 2
    m = np.arange(1, max(m_hi, 1) + 1, dtype=np.float64)
    v = af * m + bf
    fl = np.floor(v)
    # float rounding plus declared error; uncertain entries go to the exact path
    margin = 4e-15 * (abs(af) * m + abs(bf) + 1.0) + float(ra) * m + float(rb) + 2.0**-50 * m
    dist = np.minimum(v - fl, fl + 1.0 - v)
    shaky = np.flatnonzero(dist <= margin)
    vals = fl.astype(np.int64)
    for i in shaky:
        vals[i] = floor_affine(alpha, int(i) + 1, beta)
    vals = vals[(vals >= 1) & (vals <= N)]
    b[vals] = True
    return b


@dataclass(frozen=True)
class Complement(SetExpr):
    inner: SetExpr

    def _bits(self, N):
        b = ~self.inner._bits(N)
        b[0] = False
        return b

    def children(self):
        return (self.inner,)

    def to_text(self):
        return f"complement {self.inner.to_text()}"


@dataclass(frozen=True)
class Intersect(SetExpr):
    left: SetExpr
    right: SetExpr

    def _bits(self, N):
        return self.left._bits(N) & self.right._bits(N)

    def children(self):
        return (self.left, self.right)

    def to_text(self):
        return f"intersect {self.left.to_text()} {self.right.to_text()}"


@dataclass(frozen=True)
class Union(SetExpr):
    left: SetExpr
    right: SetExpr

    def _bits(self, N):
        return self.left._bits(N) | self.right._bits(N)

    def children(self):
        return (self.left, self.right)

    def to_text(self):
        return f"union {self.left.to_text()} {self.right.to_text()}"


@dataclass(frozen=True)
class Difference(SetExpr):
    left: SetExpr
    right: SetExpr

    def _bits(self, N):
        return self.left._bits(N) & ~self.right._bits(N)

    def children(self):
        return (self.left, self.right)

    def to_text(self):
        return f"difference {self.left.to_text()} {self.right.to_text()}"


@dataclass(frozen=True)
class Affine(SetExpr):
    """(q*E + a) intersected with the naturals."""

    q: int
    a: int
    inner: SetExpr

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 1:
            raise InvalidParam(f"affine needs integer q >= 1, got {self.q!r}")

    def _bits(self, N):
        b = _empty(N)
        top = (N - self.a) // self.q
        if top < 1:
            return b
        m = np.flatnonzero(self.inner._bits(top))
        n = self.q * m + self.a
        n = n[(n >= 1) & (n <= N)]
        b[n] = True
        return b

    def children(self):
        return (self.inner,)

    def to_text(self):
        return f"affine {self.q} {self.a} {self.inner.to_text()}"


@dataclass(frozen=True)
class Perturb(SetExpr):
    """(E minus REMOVE) union ADD."""

    base: SetExpr
    remove: SetExpr
    add: SetExpr

    def _bits(self, N):
        return (self.base._bits(N) & ~self.remove._bits(N)) | self.add._bits(N)

    def children(self):
        return (self.base, self.remove, self.add)

    def to_text(self):
        return f"perturb {self.base.to_text()} {self.remove.to_text()} {self.add.to_text()}"


@dataclass(frozen=True)
class Splice(SetExpr):
    """Piecewise set: n belongs iff n is in the part whose interval holds n/N.

    Intervals are (lo, hi], closed on the right, and must partition (0, 1].
    The reference scale is the materialization N, so a Splice is the one
    expression kind whose bitmaps are not prefix consistent.
    """

    parts: tuple[tuple[SetExpr, Fraction, Fraction], ...]

    def __post_init__(self):
        parts = tuple((e, Fraction(lo), Fraction(hi)) for e, lo, hi in self.parts)
        if not parts:
            raise InvalidParam("splice needs at least one part")
        edge = Fraction(0)
        for _, lo, hi in parts:
            if lo != edge or hi <= lo:
                raise InvalidParam("splice intervals must partition (0, 1] in order")
            edge = hi
        if edge != 1:
            raise InvalidParam("splice intervals must end at 1")
        object.__setattr__(self, "parts", parts)

    def scale_dependent(self):
        return True

    def children(self):
        return tuple(e for e, _, _ in self.parts)

    def _bits(self, N):
        b = _empty(N)
        for e, lo, hi in self.parts:
            start = math.floor(lo * N) + 1
            stop = math.floor(hi * N)
            if stop >= start:
                eb = e._bits(N)
                b[start : stop + 1] = eb[start : stop + 1]
        return b

    def to_text(self):
        body = " ".join(f"{lo} {hi} {e.to_text()}" for e, lo, hi in self.parts)
        return f"splice {len(self.parts)} {body}"


@dataclass(frozen=True)
class Explicit(SetExpr):
    elements: tuple[int, ...]

    def __post_init__(self):
        els = tuple(int(x) for x in self.elements)
        if any(b <= a for a, b in zip(els, els[1:])):
            raise InvalidParam("explicit elements must be strictly increasing")
        object.__setattr__(self, "elements", els)

    def _bits(self, N):
        b = _empty(N)
        arr = np.asarray(self.elements, dtype=np.int64)
        arr = arr[(arr >= 1) & (arr <= N)]
        b[arr] = True
        return b

    def to_text(self):
        return " ".join(["explicit", str(len(self.elements)), *map(str, self.elements)])


# ---------------------------------------------------------------- operations


def materialize(expr: SetExpr, N: int) -> IndicatorSlice:
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidParam(f"N must be a positive integer, got {N!r}")
    N = int(N)
    return IndicatorSlice(N, expr._bits(N))


def count_ladder(expr: SetExpr, N_list) -> list[tuple[int, int, float]]:
    """(N, A(N), A(N)/N) for each N of an ascending ladder."""
    Ns = [int(n) for n in N_list]
    if not Ns:
        return []
    if any(b < a for a, b in zip(Ns, Ns[1:])):
        raise InvalidParam("N_list must be sorted ascending")
    if Ns[0] < 1:
        raise InvalidParam("ladder entries must be positive")
    if expr.scale_dependent():
        counts = [materialize(expr, n).count for n in Ns]
    else:
        cum = np.cumsum(materialize(expr, Ns[-1]).bits)
        counts = [int(cum[n]) for n in Ns]
    return [(n, c, c / n) for n, c in zip(Ns, counts)]


def young_exponent(q: float, r: float):
    """p with 1/p = 1/q + 1/r - 1, or None when 3/2 < 1/q + 1/r < 2 fails."""
    if not (1 < q < 2 and 1 < r < 2):
        raise DomainError("young_exponent needs q, r in (1, 2)")
    s = Fraction(q).limit_denominator(10**12) if isinstance(q, float) else Fraction(q)
    t = Fraction(r).limit_denominator(10**12) if isinstance(r, float) else Fraction(r)
    total = 1 / s + 1 / t
    if not (Fraction(3, 2) < total < 2):
        return None
    return float(1 / (total - 1))


# ---------------------------------------------------------------- text format


def _int_tok(tokens, pos, what):
    if pos >= len(tokens):
        raise ParseError(f"{what}: unexpected end of input")
    try:
        return int(tokens[pos])
    except ValueError:
        raise ParseError(f"{what}: expected integer, got {tokens[pos]!r}") from None


def _frac_tok(tokens, pos, what):
    if pos >= len(tokens):
        raise ParseError(f"{what}: unexpected end of input")
    try:
        return Fraction(tokens[pos])
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{what}: expected fraction, got {tokens[pos]!r}") from None


def _parse(tokens: list[str], pos: int) -> tuple[SetExpr, int]:
    if pos >= len(tokens):
        raise ParseError("unexpected end of set expression")
    head = tokens[pos].lower()
    pos += 1
    try:
        if head in ("naturals", "n"):
            return Naturals(), pos
        if head == "rfree":
            return RFree(_int_tok(tokens, pos, "rfree")), pos + 1
        if head == "beatty":
            a, pos = parse_real(tokens, pos)
            b, pos = parse_real(tokens, pos)
            return Beatty(a, b), pos
        if head == "complement":
            e, pos = _parse(tokens, pos)
            return Complement(e), pos
        if head in ("intersect", "union", "difference"):
            left, pos = _parse(tokens, pos)
            right, pos = _parse(tokens, pos)
            cls = {"intersect": Intersect, "union": Union, "difference": Difference}[head]
            return cls(left, right), pos
        if head == "affine":
            q = _int_tok(tokens, pos, "affine q")
            a = _int_tok(tokens, pos + 1, "affine a")
            e, pos = _parse(tokens, pos + 2)
            return Affine(q, a, e), pos
        if head == "perturb":
            base, pos = _parse(tokens, pos)
            rem, pos = _parse(tokens, pos)
            add, pos = _parse(tokens, pos)
            return Perturb(base, rem, add), pos
        if head == "splice":
            k = _int_tok(tokens, pos, "splice count")
            pos += 1
            parts = []
            for _ in range(k):
                lo = _frac_tok(tokens, pos, "splice lo")
                hi = _frac_tok(tokens, pos + 1, "splice hi")
                e, pos = _parse(tokens, pos + 2)
                parts.append((e, lo, hi))
            return Splice(tuple(parts)), pos
        if head == "explicit":
            k = _int_tok(tokens, pos, "explicit count")
            if k < 0:
                raise ParseError("explicit count must be nonnegative")
            els = [_int_tok(tokens, pos + 1 + i, "explicit element") for i in range(k)]
            return Explicit(tuple(els)), pos + 1 + k
    except InvalidParam as exc:
        raise ParseError(str(exc)) from None
    raise ParseError(f"unknown set constructor {tokens[pos - 1]!r}")


def parse_set(text: str) -> SetExpr:
    tokens = text.split()
    expr, pos = _parse(tokens, 0)
    if pos != len(tokens):
        raise ParseError(f"trailing tokens in set expression: {' '.join(tokens[pos:])}")
    return expr
