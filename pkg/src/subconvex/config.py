"""Tunable thresholds.

None of these are constants of the underlying theorems (which only give
``<<`` bounds with unspecified constants).  They are screening conventions
and ceilings pinned from reference runs in ``reference/reference_values.json``.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Config:
    # quadrature
    grid_factor: int = 32
    min_grid_factor: int = 4
    tiny_modulus: float = 1e-30

    # slope screens
    slope_tol_clean: float = 0.05
    slope_tol_log: float = 0.1
    ratio_spread_factor: float = 4.0
    min_ladder_points: int = 4

    littlewood_floor: float = 0.3

    # weyl
    # Horner in doubles errs by about n^k * 2^-53; 2^23 keeps that below 1e-9
    double_phase_limit: float = 2.0**23
    # uint64 fixed point errs by about n^k * 2^-64; 2^24 keeps that below 1e-12
    word_phase_limit: float = 2.0**24
    fixed_point_bits: int = 64
    phase_tolerance: float = 1e-6  # max phase error allowed from declared decimal errors
    default_epsilon: float = 0.1

    # equidist
    default_mmax: int = 8
    max_ceiling: int = 1 << 26

    # arith
    sieve_ceiling: int = 50_000_000
    tau_ceiling: int = 20_000

    # S_p / (N^(p-1) + N^p/q) on naturals and squarefrees, N = 10^4; 1.2x the reference max
    discrete_ratio_ceiling: float = 2.08


DEFAULT = Config()
