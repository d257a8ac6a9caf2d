"""Arithmetic functions, H_f norms, restricted averages, characters and Gauss sums."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Config
from .errors import (
    DomainError,
    GridTooCoarse,
    InvalidParam,
    LengthMismatch,
    NotPrime,
    PrincipalChar,
    ResourceLimit,
)
from .moments import grid_values
from .reals import coerce_real
from .sets import IndicatorSlice, primes_upto
from .weyl import TWO_PI, PolyCoeffs, dirichlet_approx, phases


@dataclass(frozen=True)
class ArithFn:
    """Values f(0..N) of an arithmetic function; index 0 is unused and zero."""

    name: str
    values: np.ndarray

    @property
    def N(self) -> int:
        return self.values.size - 1

    def __call__(self, n):
        return self.values[n]


def mobius_values(N: int) -> np.ndarray:
    mu = np.ones(N + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes_upto(N):
        p = int(p)
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def mangoldt_values(N: int) -> np.ndarray:
    lam = np.zeros(N + 1)
    for p in primes_upto(N):
        p = int(p)
        lp = math.log(p)
        pk = p
        while pk <= N:
            lam[pk] = lp
            pk *= p
    return lam


def _euler_series(n_terms: int) -> np.ndarray:
    """Coefficients of prod_{n>=1} (1 - q^n) up to q^(n_terms-1) (pentagonal numbers)."""
    e = np.zeros(n_terms, dtype=object)
    e[:] = 0
    k = 0
    while True:
        hit = False
        for m in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2) if k else (0,):
            if m < n_terms:
                e[m] = (-1) ** k
                hit = True
        if not hit:
            break
        k += 1
    return e


def ramanujan_tau(N: int) -> np.ndarray:
    """tau(0..N) from Delta = q * prod (1 - q^n)^24, as Python ints."""
    n_terms = N  # need prod up to q^(N-1)
    e = _euler_series(n_terms)
    support = [i for i in range(n_terms) if e[i] != 0]
    acc = np.zeros(n_terms, dtype=object)
    acc[:] = 0
    acc[0] = 1
    for _ in range(24):
        nxt = np.zeros(n_terms, dtype=object)
        nxt[:] = 0
        for s in support:
            nxt[s:] = nxt[s:] + e[s] * acc[: n_terms - s]
        acc = nxt
    tau = np.zeros(N + 1, dtype=object)
    tau[:] = 0
    tau[1:] = acc
    return tau


def sieve(kind: str, N: int, *, k: int = 1, theta=None, chi=None, cfg: Config = DEFAULT, **_) -> ArithFn:
    """Materialize an arithmetic function on [1, N].

    kind: ``mobius``, ``mangoldt``, ``mobius_phase`` (mu(n) e(n^k theta)),
    ``mangoldt_phase``, ``character`` (needs ``chi``), ``tau`` (Ramanujan).
    """
    if N < 1:
        raise InvalidParam("N must be positive")
    if N > cfg.sieve_ceiling:
        raise ResourceLimit(f"N={N} above sieve ceiling {cfg.sieve_ceiling}")
    kind = kind.lower()
    if kind == "mobius":
        return ArithFn("mobius", mobius_values(N))
    if kind == "mangoldt":
        return ArithFn("mangoldt", mangoldt_values(N))
    if kind in ("mobius_phase", "mangoldt_phase"):
        if theta is None:
            raise InvalidParam(f"{kind} needs theta")
        base = mobius_values(N) if kind == "mobius_phase" else mangoldt_values(N)
        ph = np.zeros(N + 1)
        ph[1:] = phases(PolyCoeffs.monomial(k, coerce_real(theta)), np.arange(1, N + 1), cfg=cfg)
        return ArithFn(f"{kind}(k={k})", base * np.exp(1j * TWO_PI * ph))
    if kind == "character":
        if chi is None:
            raise InvalidParam("character twist needs chi")
        n = np.arange(N + 1)
        return ArithFn(f"chi_{chi.modulus}_{chi.index}", chi.values[n % chi.modulus])
    if kind == "tau":
        if N > cfg.tau_ceiling:
            raise ResourceLimit(f"tau expansion limited to N <= {cfg.tau_ceiling}")
        return ArithFn("tau", ramanujan_tau(N))
    raise InvalidParam(f"unknown arithmetic function {kind!r}")


def explicit_fn(values, name: str = "explicit") -> ArithFn:
    v = np.asarray(values)
    return ArithFn(name, np.concatenate([np.zeros(1, dtype=v.dtype), v]))


# ---------------------------------------------------------------- H_f norms


@dataclass(frozen=True)
class HfNorms:
    sup_norm: float  # grid maximum, a lower bound for the true sup
    l2_norm: float
    grid_size: int
    refinement_delta: float


def _numeric(f: ArithFn) -> np.ndarray:
    v = f.values
    if v.dtype == object:
        v = v.astype(np.float64)
    return v


def hf_grid(f: ArithFn, M: int) -> np.ndarray:
    """H_f(j/M) = (1/N) sum f(n) e(n j / M)."""
    v = _numeric(f)
    return np.fft.ifft(v, M) * (M / f.N)


def hf_norms(f: ArithFn, N: int | None = None, grid_M: int | None = None, cfg: Config = DEFAULT) -> HfNorms:
    if N is not None and N != f.N:
        raise LengthMismatch(f"function materialized to {f.N}, asked for N={N}")
    N = f.N
    if grid_M is None:
        grid_M = 1 << math.ceil(math.log2(cfg.grid_factor * N))
    if grid_M & (grid_M - 1):
        raise InvalidParam("grid size must be a power of two")
    if grid_M < cfg.grid_factor * N:
        raise GridTooCoarse(f"grid M={grid_M} below {cfg.grid_factor}N")
    mod = np.abs(hf_grid(f, grid_M))
    sup = float(mod.max())
    coarse = float(mod[::2].max())
    v = _numeric(f)[1:]
    l2 = math.sqrt(float(np.mean(np.abs(v) ** 2)))
    return HfNorms(sup, l2, grid_M, sup - coarse)


def restricted_average(f: ArithFn, slice_: IndicatorSlice) -> complex:
    """(1/N) sum_{n in A(N)} f(n)."""
    if f.N != slice_.n_max:
        raise LengthMismatch(f"function has N={f.N}, slice has N={slice_.n_max}")
    vals = f.values[slice_.bits]
    total = sum(vals.tolist()) if f.values.dtype == object else vals.sum()
    return complex(total) / slice_.n_max


@dataclass(frozen=True)
class HolderCheck:
    lhs: float
    rhs: float
    slack: float
    sup: float
    l2_grid: float
    lp_grid: float


def holder_chain_check(
    f: ArithFn, slice_: IndicatorSlice, p: float, grid_M: int | None = None, cfg: Config = DEFAULT
) -> HolderCheck:
    """|avg_A f| <= sup|H|^(2/p-1) * (mean|H|^2)^(1-1/p) * (mean|g|^p)^(1/p) on one grid."""
    if not 1 <= p < 2:
        raise DomainError(f"p must lie in [1, 2), got {p}")
    if f.N != slice_.n_max:
        raise LengthMismatch(f"function has N={f.N}, slice has N={slice_.n_max}")
    N = f.N
    if grid_M is None:
        grid_M = 1 << math.ceil(math.log2(cfg.grid_factor * N))
    if grid_M < cfg.grid_factor * N:
        raise GridTooCoarse(f"grid M={grid_M} below {cfg.grid_factor}N")
    H = np.abs(hf_grid(f, grid_M))
    g = np.abs(grid_values(slice_, grid_M))
    sup = float(H.max())
    l2 = float(np.mean(H**2))
    lp = float(np.mean(g**p))
    rhs = sup ** (2 / p - 1) * l2 ** (1 - 1 / p) * lp ** (1 / p)
    lhs = abs(restricted_average(f, slice_))
    return HolderCheck(lhs, rhs, rhs - lhs, sup, l2, lp)


# ---------------------------------------------------------------- characters


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def primitive_root(q: int) -> int:
    if q == 2:
        return 1
    fac = _prime_factors(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // r, q) != 1 for r in fac):
            return g
    raise NotPrime(f"no primitive root modulo {q}")


@dataclass(frozen=True)
class DirichletChar:
    modulus: int
    index: int
    generator: int
    values: np.ndarray  # chi(0..q-1)

    @property
    def is_principal(self) -> bool:
        return self.index == 0

    def __call__(self, n):
        return self.values[np.asarray(n) % self.modulus]


def dirichlet_char(q: int, t: int) -> DirichletChar:
    """chi(g^j) = e(t j / (q-1)) with g the least primitive root mod prime q."""
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    if not 0 <= t <= q - 2 and not (q == 2 and t == 0):
        raise InvalidParam(f"index t must lie in [0, {q - 2}]")
    g = primitive_root(q)
    ind = np.zeros(q, dtype=np.int64)
    x = 1
    for j in range(q - 1):
        ind[x] = j
        x = x * g % q
    vals = np.exp(1j * TWO_PI * ((t * ind) % (q - 1)) / (q - 1)) if q > 2 else np.ones(q, complex)
    vals[0] = 0
    return DirichletChar(q, t, g, vals)


def gauss_sum(chi: DirichletChar, a: int) -> complex:
    """T(a) = sum_{m=1}^q chi(m) e(m a / q)."""
    if chi.is_principal:
        raise PrincipalChar("Gauss sum requested for the principal character")
    q = chi.modulus
    m = np.arange(1, q + 1)
    return complex(np.sum(chi.values[m % q] * np.exp(1j * TWO_PI * ((m * a) % q) / q)))


@dataclass(frozen=True)
class CharSumReport:
    value: complex
    envelope: float
    ratio: float
    p: float


def restricted_char_sum(chi: DirichletChar, slice_: IndicatorSlice, p: float = 1.5) -> CharSumReport:
    """sum_{n in A(N)} chi(n) against q^(1/2) N^(1-1/p) (1 + N/q)^(1/p)."""
    if chi.is_principal:
        raise PrincipalChar("character sum screen needs a non-principal character")
    if not 1 < p < 2:
        raise DomainError(f"p must lie in (1, 2), got {p}")
    n = slice_.elements()
    value = complex(chi.values[n % chi.modulus].sum()) if n.size else 0j
    q, N = chi.modulus, slice_.n_max
    env = math.sqrt(q) * N ** (1 - 1 / p) * (1 + N / q) ** (1 / p)
    return CharSumReport(value, env, abs(value) / env, float(p))


# ---------------------------------------------------------------- minor arcs


def minor_arc_ok(theta, N: int, A: float) -> bool:
    """True when the Dirichlet approximation of theta at Q = L*N has q > L, L = log^A(2N)."""
    L = math.log(2 * N) ** A
    ra = dirichlet_approx(coerce_real(theta), max(1, math.ceil(L * N)))
    return ra.q > L
