"""Equidistribution modulo 1 of psi(a_n) along restricted index sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Config
from .errors import InvalidParam, SetTooSparse
from .reals import RealSpec, coerce_real, floor_affine, reciprocal
from .sets import Beatty, SetExpr, materialize
from .weyl import TWO_PI, PolyCoeffs, phases


@dataclass(frozen=True)
class FracSequence:
    source: SetExpr
    poly: PolyCoeffs
    M: int
    values: np.ndarray
    terms: np.ndarray  # a_1 < ... < a_M


@dataclass(frozen=True)
class EquidistReport:
    M: int
    weyl_stats: list[tuple[int, float]]
    star_discrepancy: float


def first_elements(expr: SetExpr, M: int, cfg: Config = DEFAULT) -> np.ndarray:
    """The M smallest elements, doubling the materialization ceiling as needed."""
    if M < 1:
        raise InvalidParam("M must be positive")
    ceiling = max(64, 2 * M)
    while True:
        els = materialize(expr, ceiling).elements()
        if els.size >= M:
            return els[:M]
        if ceiling >= cfg.max_ceiling:
            raise SetTooSparse(
                f"only {els.size} elements below ceiling {ceiling}, needed {M}"
            )
        ceiling = min(2 * ceiling, cfg.max_ceiling)


def frac_sequence(expr: SetExpr, poly: PolyCoeffs, M: int, cfg: Config = DEFAULT) -> FracSequence:
    terms = first_elements(expr, M, cfg)
    vals = phases(poly, terms, cfg=cfg)
    vals = np.where(vals >= 1.0, 0.0, vals)
    return FracSequence(expr, poly, M, vals, terms)


def weyl_criterion_stats(seq: FracSequence, m_max: int) -> list[tuple[int, float]]:
    """(m, |mean e(m x_n)|) for m = 1..m_max."""
    if m_max < 1:
        raise InvalidParam("m_max must be >= 1")
    x = np.asarray(seq.values)
    out = []
    for m in range(1, m_max + 1):
        z = np.exp(1j * TWO_PI * np.mod(m * x, 1.0)).mean()
        out.append((m, min(1.0, float(abs(z)))))
    return out


def star_discrepancy(seq) -> float:
    """Exact D*_M of points in [0, 1) from the sorted breakpoint formula."""
    x = np.sort(np.asarray(getattr(seq, "values", seq), dtype=np.float64))
    M = x.size
    if M < 1:
        raise InvalidParam("star discrepancy needs at least one point")
    i = np.arange(1, M + 1)
    return float(max(np.max(i / M - x), np.max(x - (i - 1) / M)))


def equidist_experiment(
    expr: SetExpr, poly: PolyCoeffs, M_ladder, m_max: int = DEFAULT.default_mmax, cfg: Config = DEFAULT
) -> list[EquidistReport]:
    Ms = [int(m) for m in M_ladder]
    if any(b < a for a, b in zip(Ms, Ms[1:])):
        raise InvalidParam("M ladder must be ascending")
    # the longest sequence contains every shorter one as a prefix
    full = frac_sequence(expr, poly, Ms[-1], cfg)
    reports = []
    for M in Ms:
        seq = FracSequence(expr, poly, M, full.values[:M], full.terms[:M])
        reports.append(EquidistReport(M, weyl_criterion_stats(seq, m_max), star_discrepancy(seq)))
    return reports


def beatty_counterexample(theta: RealSpec) -> tuple[Beatty, PolyCoeffs]:
    """The set {floor(n/theta)} and the linear phase theta*n."""
    theta = coerce_real(theta)
    return Beatty(reciprocal(theta), 0), PolyCoeffs((0, theta))


def beatty_containment_check(theta: RealSpec, M: int, cfg: Config = DEFAULT) -> tuple[bool, int]:
    """Exactly verify {a_n theta} in (1 - theta, 1) for the first M Beatty terms.

    Returns (all_contained, first_failing_index or -1).  Uses the identity
    {a theta} > 1 - theta  <=>  floor((a+1) theta) = floor(a theta) + 1, and
    {a theta} != 0 whenever theta is irrational or a theta is not an integer.
    """
    theta = coerce_real(theta)
    expr, _ = beatty_counterexample(theta)
    terms = first_elements(expr, M, cfg)
    zero = coerce_real(0)
    for idx, a in enumerate(terms.tolist()):
        f0 = floor_affine(theta, a, zero)
        f1 = floor_affine(theta, a + 1, zero)
        if f1 != f0 + 1:
            return False, idx
        ex = theta.exact()
        if ex is not None and (ex * a).is_rational() and (ex * a).rational == f0:
            return False, idx
    return True, -1
