"""Continuous and discrete moments of exponential sums over indicator slices.

The continuous moment ``I_p(N) = int_0^1 |f_N(a)|^p da`` with
``f_N(a) = sum_{n in A(N)} e(n a)`` is approximated by the uniform Riemann
sum on ``M`` points, all of which come from one FFT of the zero-padded
indicator.  Every estimate carries the gap to the ``M/2`` sub-grid (which is
the even-indexed half of the same FFT, so costs nothing extra).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Config
from .errors import DomainError, GridTooCoarse, InvalidParam
from .sets import IndicatorSlice, SetExpr, materialize

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MomentEstimate:
    p: float
    N: int
    value: float
    grid_size: int
    refinement_delta: float
    count: int
    low_p: bool = False  # p < 1 is accepted but flagged


@dataclass(frozen=True)
class SlopeFit:
    p: float
    points: list[tuple[int, float]]
    counts: list[int]
    slope: float
    intercept: float
    residual_rms: float
    ratios: list[float]  # I_p(N) / (A(N)^p / N)
    ratio_spread: float
    passes: bool
    estimates: list[MomentEstimate] = field(default_factory=list, repr=False)


def default_grid(N: int, factor: int = DEFAULT.grid_factor) -> int:
    return 1 << max(1, math.ceil(math.log2(factor * N)))


def _check_grid(N: int, M: int, cfg: Config) -> None:
    if M < 2 or M & (M - 1):
        raise InvalidParam(f"grid size must be a power of two, got {M}")
    if M < cfg.min_grid_factor * N:
        raise GridTooCoarse(f"grid M={M} below {cfg.min_grid_factor}N={cfg.min_grid_factor * N}")


def grid_values(slice_: IndicatorSlice, M: int) -> np.ndarray:
    """f_N(j/M) for j = 0..M-1."""
    if M < slice_.n_max + 1:
        raise GridTooCoarse("grid shorter than the slice")
    return np.fft.ifft(slice_.bits.astype(np.float64), M) * M


def _half_spectrum(slice_: IndicatorSlice, M: int) -> np.ndarray:
    # |f(-a)| = |f(a)| for a real indicator, so j = 0..M/2 suffices
    return np.abs(np.fft.rfft(slice_.bits.astype(np.float64), M))


def _power_mean(mod: np.ndarray, p: float, M: int, tiny: float) -> float:
    """Mean of |f|^p over the full M-grid given |f| at j = 0..M/2."""
    if p == 2.0:
        powed = mod * mod
    else:
        powed = np.where(mod < tiny, 0.0, mod**p)
    weights_sum = powed[0] + powed[-1] + 2.0 * powed[1:-1].sum()
    return float(weights_sum / M)


def exp_sum_at(slice_: IndicatorSlice, alpha: float) -> complex:
    """sum_{n in A(N)} e(n*alpha), summed directly."""
    n = slice_.elements().astype(np.float64)
    phase = np.mod(n * alpha, 1.0)
    return complex(np.exp(1j * TWO_PI * phase).sum())


def moment_lp(
    slice_: IndicatorSlice, p: float, M: int | None = None, cfg: Config = DEFAULT
) -> MomentEstimate:
    if not p > 0:
        raise DomainError(f"moment exponent must be positive, got {p}")
    N = slice_.n_max
    if M is None:
        M = default_grid(N, cfg.grid_factor)
    _check_grid(N, M, cfg)
    mod = _half_spectrum(slice_, M)
    value = _power_mean(mod, p, M, cfg.tiny_modulus)
    coarse = _power_mean(mod[::2], p, M // 2, cfg.tiny_modulus)
    return MomentEstimate(
        p=float(p),
        N=N,
        value=value,
        grid_size=M,
        refinement_delta=abs(value - coarse),
        count=slice_.count,
        low_p=p < 1,
    )


def moments_many(
    slice_: IndicatorSlice, ps, M: int | None = None, cfg: Config = DEFAULT
) -> list[MomentEstimate]:
    """Several exponents from a single FFT."""
    N = slice_.n_max
    if M is None:
        M = default_grid(N, cfg.grid_factor)
    _check_grid(N, M, cfg)
    mod = _half_spectrum(slice_, M)
    out = []
    for p in ps:
        if not p > 0:
            raise DomainError(f"moment exponent must be positive, got {p}")
        v = _power_mean(mod, p, M, cfg.tiny_modulus)
        c = _power_mean(mod[::2], p, M // 2, cfg.tiny_modulus)
        out.append(MomentEstimate(float(p), N, v, M, abs(v - c), slice_.count, p < 1))
    return out


def residue_counts(slice_: IndicatorSlice, q: int) -> np.ndarray:
    return np.bincount(slice_.elements() % q, minlength=q)[:q]


def discrete_values(slice_: IndicatorSlice, q: int) -> np.ndarray:
    """f_N(a/q) for a = 0..q-1 (a = 0 stands for a = q)."""
    counts = residue_counts(slice_, q).astype(np.float64)
    return np.fft.ifft(counts) * q


def discrete_moment(slice_: IndicatorSlice, p: float, q: int) -> float:
    """S_p(N; A; q) = (1/q) sum_{a=1}^q |f_N(a/q)|^p."""
    if not isinstance(q, (int, np.integer)) or q < 1:
        raise InvalidParam(f"q must be a positive integer, got {q!r}")
    if not p > 0:
        raise DomainError(f"moment exponent must be positive, got {p}")
    mod = np.abs(discrete_values(slice_, int(q)))
    return float(np.mean(mod**p))


def fit_slope(Ns, values) -> tuple[float, float, float]:
    x = np.log(np.asarray(Ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def subconvexity_fit(
    expr: SetExpr, p: float, N_ladder, grid_factor: int | None = None, cfg: Config = DEFAULT
) -> SlopeFit:
    """Log-log slope of I_p against N plus the strong-subconvexity ratio table."""
    Ns = [int(n) for n in N_ladder]
    if len(Ns) < cfg.min_ladder_points:
        raise InvalidParam(f"slope fit needs at least {cfg.min_ladder_points} ladder points")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise InvalidParam("ladder must be strictly increasing")
    gf = grid_factor or cfg.grid_factor
    ests, counts = [], []
    for N in Ns:
        s = materialize(expr, N)
        est = moment_lp(s, p, default_grid(N, gf), cfg)
        ests.append(est)
        counts.append(s.count)
    values = [e.value for e in ests]
    slope, intercept, rms = fit_slope(Ns, values)
    ratios = [
        v / (c**p / N) if c > 0 else math.inf for v, c, N in zip(values, counts, Ns)
    ]
    spread = max(ratios) / min(ratios) if min(ratios) > 0 else math.inf
    return SlopeFit(
        p=float(p),
        points=list(zip(Ns, values)),
        counts=counts,
        slope=slope,
        intercept=intercept,
        residual_rms=rms,
        ratios=ratios,
        ratio_spread=spread,
        passes=spread <= cfg.ratio_spread_factor,
        estimates=ests,
    )


@dataclass(frozen=True)
class LittlewoodCheck:
    i1: float
    log_count: float
    ratio: float
    floor: float

    @property
    def passes(self) -> bool:
        return self.ratio > self.floor


def littlewood_floor_check(
    slice_: IndicatorSlice, M: int | None = None, cfg: Config = DEFAULT
) -> LittlewoodCheck:
    """I_1 against log A(N)."""
    if slice_.count < 2:
        raise DomainError(f"Littlewood check needs A(N) >= 2, got {slice_.count}")
    i1 = moment_lp(slice_, 1.0, M, cfg).value
    lg = math.log(slice_.count)
    return LittlewoodCheck(i1, lg, i1 / lg, cfg.littlewood_floor)


@dataclass(frozen=True)
class DiscreteScreenRow:
    q: int
    value: float
    bound: float
    ratio: float


def discrete_screen(slice_: IndicatorSlice, p: float, qs) -> list[DiscreteScreenRow]:
    """S_p(N; A; q) / (N^(p-1) + N^p / q) across moduli."""
    N = slice_.n_max
    rows = []
    for q in qs:
        v = discrete_moment(slice_, p, int(q))
        bound = N ** (p - 1) + N**p / q
        rows.append(DiscreteScreenRow(int(q), v, bound, v / bound))
    return rows
