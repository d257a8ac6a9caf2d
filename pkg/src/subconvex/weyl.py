"""Restricted Weyl sums, the exponents sigma/tau/omega, Dirichlet approximation
and the second-order differencing identity.

Phases ``psi(n) mod 1`` are computed in fixed point: each coefficient is
reduced mod 1 and rounded to ``P`` bits, and ``sum_j A_j n**j`` is taken
modulo ``2**P``.  While ``max(n)**k <= Config.word_phase_limit`` this runs in
wrapping uint64 arithmetic (P = 64); above it, with Python integers and P
large enough that the rounding error stays below ``2**-fixed_point_bits``.
Plain double-precision Horner evaluation is available as ``mode="double"``
and refuses inputs past ``Config.double_phase_limit``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
import numpy as np

from .config import DEFAULT, Config
from .errors import DomainError, InvalidParam, PrecisionLoss, ScaleTooLarge, UncertifiableReal
from .reals import QuadLinear, RealSpec, approx, coerce_real, parse_real
from .sets import IndicatorSlice

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PolyCoeffs:
    """psi(x) = coeffs[k]*x**k + ... + coeffs[1]*x + coeffs[0]."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(coerce_real(c) for c in self.coeffs)
        if len(cs) < 2:
            raise InvalidParam("polynomial needs degree k >= 1 (at least two coefficients)")
        object.__setattr__(self, "coeffs", cs)

    @property
    def k(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> RealSpec:
        return self.coeffs[-1]

    def to_text(self) -> str:
        return " ".join(_coeff_text(c) for c in self.coeffs)

    @classmethod
    def monomial(cls, k: int, alpha, constant=0) -> "PolyCoeffs":
        return cls((constant,) + (0,) * (k - 1) + (alpha,))


def _coeff_text(c: RealSpec) -> str:
    ex = c.exact()
    if ex is not None and ex.is_rational():
        r = ex.rational
        return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"
    return c.to_text()


def parse_poly(text: str) -> PolyCoeffs:
    """Coefficients alpha_0 .. alpha_k in ascending order, each a real token group."""
    tokens = text.split()
    coeffs, pos = [], 0
    while pos < len(tokens):
        c, pos = parse_real(tokens, pos)
        coeffs.append(c)
    return PolyCoeffs(tuple(coeffs))


# ---------------------------------------------------------------- phases


def _reduced(c: RealSpec, bits: int) -> tuple[Fraction, Fraction]:
    center, radius = approx(c, bits)
    return center - math.floor(center), radius


def phases(
    poly: PolyCoeffs,
    n: np.ndarray,
    mode: str = "auto",
    extra_linear: RealSpec | None = None,
    cfg: Config = DEFAULT,
) -> np.ndarray:
    """Fractional parts of psi(n) (+ extra_linear*n) as float64 in [0, 1)."""
    n = np.asarray(n, dtype=np.int64)
    if n.size == 0:
        return np.zeros(0)
    k = poly.k
    top = int(n.max())
    size = float(max(top, 1)) ** k
    coeffs = list(poly.coeffs)
    bits = cfg.fixed_point_bits + max(1, math.ceil(k * math.log2(max(top, 2)))) + 8
    red = [_reduced(c, bits) for c in coeffs]
    if extra_linear is not None:
        ce, re = _reduced(coerce_real(extra_linear), bits)
        c1, r1 = red[1]
        red[1] = ((c1 + ce) % 1, r1 + re)

    declared = sum(float(r) * float(max(top, 1)) ** j for j, (_, r) in enumerate(red))
    if declared > cfg.phase_tolerance:
        raise PrecisionLoss(
            f"declared coefficient errors give phase uncertainty {declared:.3g} at n={top}"
        )

    if mode == "double":
        if size > cfg.double_phase_limit:
            raise PrecisionLoss(
                f"double-precision phase at n^k={size:.3g} exceeds {cfg.double_phase_limit:.3g}"
            )
        nf = n.astype(np.float64)
        acc = np.full(n.shape, float(red[k][0]))
        for j in range(k - 1, -1, -1):
            acc = np.mod(acc * nf + float(red[j][0]), 1.0)
        return acc
    if mode == "auto" and size <= cfg.word_phase_limit:
        return _word_phases(red, n)
    if mode not in ("auto", "exact"):
        raise InvalidParam(f"unknown phase mode {mode!r}")
    return _fixed_point_phases(red, n, bits)


def _word_phases(red, n: np.ndarray) -> np.ndarray:
    # uint64 products wrap, which is exactly reduction mod 2**64
    ints = [np.uint64(math.floor(c * 2**64) % 2**64) for c, _ in red]
    nu = n.astype(np.uint64)
    acc = np.full(n.shape, ints[0], dtype=np.uint64)
    pw = np.ones(n.shape, dtype=np.uint64)
    for A in ints[1:]:
        pw = pw * nu
        if A:
            acc = acc + A * pw
    return (acc >> np.uint64(11)).astype(np.float64) / 2.0**53


def _fixed_point_phases(red, n: np.ndarray, bits: int) -> np.ndarray:
    mod = 1 << bits
    ints = [math.floor(c * mod) for c, _ in red]
    nobj = n.astype(object)
    acc = np.full(n.shape, ints[0], dtype=object)
    pw = np.ones(n.shape, dtype=object)
    for A in ints[1:]:
        pw = pw * nobj
        if A:
            acc = acc + A * pw
    acc = acc % mod
    shift = bits - 53
    top = (acc >> shift).astype(np.float64)
    return top / 2.0**53


def restricted_weyl_sum(
    slice_: IndicatorSlice, poly: PolyCoeffs, mode: str = "auto", cfg: Config = DEFAULT
) -> complex:
    """F_k = sum_{n in A(N)} e(psi(n))."""
    ph = phases(poly, slice_.elements(), mode=mode, cfg=cfg)
    return complex(np.exp(1j * TWO_PI * ph).sum())


def full_weyl_sum(N: int, poly: PolyCoeffs, beta=0, mode: str = "auto", cfg: Config = DEFAULT) -> complex:
    """G_k = sum_{1<=n<=N} e(psi(n) + beta*n)."""
    n = np.arange(1, int(N) + 1, dtype=np.int64)
    ph = phases(poly, n, mode=mode, extra_linear=coerce_real(beta), cfg=cfg)
    return complex(np.exp(1j * TWO_PI * ph).sum())


# ---------------------------------------------------------------- exponents


def _check_kp(k, p):
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise DomainError(f"degree k must be an integer >= 2, got {k!r}")
    if not 1 <= p < 2:
        raise DomainError(f"p must lie in [1, 2), got {p!r}")


def _one(p):
    # keep exact arithmetic for exact inputs
    return Fraction(1) if isinstance(p, (int, Fraction)) else 1.0


def sigma_exponent(k: int, p):
    _check_kp(k, p)
    one = _one(p)
    if k == 2:
        return one / p - one / 2
    if p <= Fraction(4, 3):
        return one / 2 ** (k - 1)
    return (one / p - one / 2) / 2 ** (k - 3)


def tau_exponent(k: int, p):
    _check_kp(k, p)
    one = _one(p)
    if k == 2:
        return 0 * one
    r = k * k - k
    if p <= Fraction(r, r - 1):
        return one / r
    return (2 * one / p - 1) / (r - 2)


def omega_exponent(k: int, p):
    return max(sigma_exponent(k, p), tau_exponent(k, p))


# ---------------------------------------------------------------- rational approximation


@dataclass(frozen=True)
class RationalApprox:
    a: int
    q: int
    err_bound: float
    coprime: bool = True

    @property
    def dirichlet(self) -> bool:
        return self.err_bound <= 1.0 / (self.q * self.q)


def _round_up(x: Fraction) -> float:
    f = float(x)
    return f if Fraction(f) >= x else math.nextafter(f, math.inf)


def _convergents_exact(x, Q: int):
    """Last continued-fraction convergent of exact x with denominator <= Q."""
    h0, h1 = 0, 1  # h_{-2}, h_{-1}
    k0, k1 = 1, 0
    best = None
    while True:
        a = x.floor()
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > Q:
            break
        best = (h1, k1)
        rem = x - a
        if rem == 0:
            break
        x = rem.reciprocal()
    return best


def dirichlet_approx(alpha, Q: int) -> RationalApprox:
    """a/q with q <= Q, gcd(a, q) = 1 and |alpha - a/q| <= 1/(qQ)."""
    if not isinstance(Q, (int, np.integer)) or Q < 1:
        raise InvalidParam(f"Q must be a positive integer, got {Q!r}")
    Q = int(Q)
    alpha = coerce_real(alpha)
    ex = alpha.exact()
    if ex is not None:
        a, q = _convergents_exact(ex, Q)
        lo, hi = (ex - Fraction(a, q)).enclosure(128)
        err = max(abs(lo), abs(hi))
        return RationalApprox(a, q, _round_up(err), math.gcd(a, q) == 1)
    center, radius = alpha.value, alpha.error
    if radius >= Fraction(1, 2 * Q * Q):
        raise UncertifiableReal(
            f"decimal error {float(radius):.3g} not below 1/(2Q^2) = {1 / (2 * Q * Q):.3g}"
        )
    a, q = _convergents_exact(QuadLinear(center), Q)
    err = abs(center - Fraction(a, q)) + radius
    if err > Fraction(1, q * q):
        raise UncertifiableReal("certified error exceeds 1/q^2 for the selected convergent")
    return RationalApprox(a, q, _round_up(err), math.gcd(a, q) == 1)


# ---------------------------------------------------------------- envelopes


def bound_envelope(k: int, p, N: float, approx_: RationalApprox, epsilon: float) -> float:
    """N^(1+eps) * (1/q + 1/N + q/N^k)^omega_p(k)."""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not approx_.dirichlet:
        raise DomainError("approximation does not satisfy |alpha - a/q| <= 1/q^2")
    w = float(omega_exponent(k, p))
    q = approx_.q
    inner = 1.0 / q + 1.0 / N + q / float(N) ** k
    return float(N) ** (1.0 + epsilon) * inner**w


@dataclass(frozen=True)
class WeylBoundReport:
    k: int
    p: float
    N: int
    a: int
    q: int
    epsilon: float
    omega: float
    envelope: float
    observed: float
    ratio: float
    Q: int  # cap used to pick (a, q)


def weyl_screen(
    slice_: IndicatorSlice,
    poly: PolyCoeffs,
    p,
    epsilon: float = DEFAULT.default_epsilon,
    Q: int | None = None,
    cfg: Config = DEFAULT,
) -> WeylBoundReport:
    """Compare |F_k| with the envelope, using the best convergent with q <= N^(k/2)."""
    N, k = slice_.n_max, poly.k
    if Q is None:
        Q = max(1, math.isqrt(N**k))
    ra = dirichlet_approx(poly.leading, Q)
    env = bound_envelope(k, p, N, ra, epsilon)
    obs = abs(restricted_weyl_sum(slice_, poly, cfg=cfg))
    return WeylBoundReport(
        k=k,
        p=float(p),
        N=N,
        a=ra.a,
        q=ra.q,
        epsilon=float(epsilon),
        omega=float(omega_exponent(k, p)),
        envelope=env,
        observed=obs,
        ratio=obs / env,
        Q=Q,
    )


# ---------------------------------------------------------------- differencing identity


def differencing_identity_check(
    N: int, poly: PolyCoeffs, M: int | None = None, cfg: Config = DEFAULT
) -> tuple[float, complex, float]:
    """Fourth moment of G_k(alpha, .) two ways.

    lhs: sum over n1+n2 = n3+n4 of e(psi(n1)+psi(n2)-psi(n3)-psi(n4)), grouped by
    the common value s = n1+n2.  rhs: sum over |h1|, |h2| < N of the second
    difference of psi over the interval I(N; h).  ``M`` is accepted for
    interface symmetry; the integral is evaluated by orthogonality, not a grid.
    """
    if N > 64:
        raise ScaleTooLarge(f"identity check is O(N^3); N={N} exceeds 64")
    if N < 1:
        raise InvalidParam("N must be positive")
    if M is not None and M < 4 * N:
        raise InvalidParam(f"grid M={M} below 4N")
    ph = np.zeros(N + 1)
    ph[1:] = phases(poly, np.arange(1, N + 1), cfg=cfg)
    ev = np.exp(1j * TWO_PI * ph)

    # pair sums P_s = sum_{n1+n2=s} e(psi(n1)+psi(n2))
    P = np.zeros(2 * N + 1, dtype=complex)
    for n1 in range(1, N + 1):
        P[n1 + 1 : n1 + N + 1] += ev[n1] * ev[1 : N + 1]
    lhs = float(np.sum(np.abs(P) ** 2))

    h = np.arange(-N + 1, N)
    h1, h2, n = h[:, None, None], h[None, :, None], np.arange(1, N + 1)[None, None, :]
    # n, n+h1, n+h2, n+h1+h2 all in [1, N]
    ok = (n + np.minimum(0, np.minimum(h1, h2) + np.minimum(0, np.maximum(h1, h2))) >= 1) & (
        n + np.maximum(0, np.maximum(h1, h2) + np.maximum(0, np.minimum(h1, h2))) <= N
    )

    def at(idx):
        return ph[np.clip(idx, 0, N)]

    d2 = at(n + h1 + h2) - at(n + h1) - at(n + h2) + at(n)
    rhs = np.exp(1j * TWO_PI * d2)[np.broadcast_to(ok, d2.shape)].sum()
    return lhs, complex(rhs), abs(lhs - rhs)
