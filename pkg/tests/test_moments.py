import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subconvex.errors import DomainError, GridTooCoarse, InvalidParam
from subconvex.moments import (
    default_grid,
    discrete_moment,
    discrete_values,
    exp_sum_at,
    grid_values,
    littlewood_floor_check,
    moment_lp,
    moments_many,
    residue_counts,
    subconvexity_fit,
)
from subconvex.sets import Explicit, IndicatorSlice, Naturals, RFree, materialize


def random_slice(seed, N, density=0.5):
    r = np.random.default_rng(seed)
    bits = np.r_[False, r.random(N) < density]
    return IndicatorSlice(N, bits)


def shuffled_sum(slice_, alpha, seed=0):
    """Direct sum in random order with compensated real/imag accumulation."""
    n = slice_.elements().tolist()
    np.random.default_rng(seed).shuffle(n)
    terms = [cmath.exp(2j * math.pi * ((k * alpha) % 1.0)) for k in n]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def brute_discrete(slice_, p, q):
    n = slice_.elements()
    total = 0.0
    for a in range(1, q + 1):
        total += abs(sum(cmath.exp(2j * math.pi * ((int(k) * a) % q) / q) for k in n)) ** p
    return total / q


slices = st.builds(random_slice, st.integers(0, 10**6), st.integers(1, 300), st.floats(0.05, 0.95))


# ---- exp_sum_at


def test_exp_sum_at_zero_and_half():
    s = materialize(RFree(2), 500)
    assert exp_sum_at(s, 0.0) == complex(s.count, 0)
    assert abs(exp_sum_at(materialize(Naturals(), 10), 0.5)) < 1e-12
    assert abs(exp_sum_at(materialize(Naturals(), 11), 0.5) - (-1)) < 1e-12


def test_exp_sum_against_shuffled_oracle():
    s = materialize(RFree(2), 100)
    got, ref = exp_sum_at(s, 0.3183), shuffled_sum(s, 0.3183)
    assert abs(got - ref) <= 1e-10 * abs(ref)


# ---- moment_lp


def test_orthogonality_naturals():
    est = moment_lp(materialize(Naturals(), 1024), 2)
    assert est.value == pytest.approx(1024, rel=1e-6)
    assert est.grid_size == default_grid(1024) == 32768


def test_l1_naturals_against_dense_quadrature():
    N = 256
    M = 1 << 22
    # midpoint rule on the closed-form Dirichlet kernel, independent of the FFT path
    a = (np.arange(M) + 0.5) / M
    dense = np.mean(np.abs(np.sin(np.pi * N * a) / np.sin(np.pi * a)))
    est = moment_lp(materialize(Naturals(), N), 1)
    assert est.value == pytest.approx(dense, rel=1e-3)


@pytest.mark.parametrize("p", [0.5, 1, 1.5, 3])
def test_single_point_has_unit_moment(p):
    est = moment_lp(materialize(Explicit((1,)), 17), p)
    assert est.value == pytest.approx(1.0, abs=1e-12)
    assert est.low_p is (p < 1)


def test_grid_errors():
    s = materialize(Naturals(), 100)
    with pytest.raises(GridTooCoarse):
        moment_lp(s, 1.5, 256)
    with pytest.raises(InvalidParam):
        moment_lp(s, 1.5, 1000)
    with pytest.raises(DomainError):
        moment_lp(s, 0)


def test_moments_many_matches_single():
    s = materialize(RFree(3), 777)
    many = moments_many(s, [1, 1.5, 2])
    for e in many:
        assert e.value == moment_lp(s, e.p).value


@given(slices)
def test_orthogonality_property(s):
    est = moment_lp(s, 2)
    assert abs(est.value - s.count) <= est.refinement_delta + 1e-9 * max(s.count, 1)


@given(slices, st.floats(0.3, 3.0))
def test_subconvexity_floor(s, p):
    if s.count == 0:
        return
    assert moment_lp(s, p).value >= (s.count / 2) ** p / (100 * s.n_max)


@given(slices, st.floats(0.5, 1.9), st.floats(0.01, 1.5))
def test_holder_monotonicity(s, p, dp):
    if s.count == 0:
        return
    lo, hi = moments_many(s, [p, p + dp])
    assert hi.value <= s.count**dp * lo.value * (1 + 1e-9) + 1e-12


@settings(max_examples=15)
@given(slices, st.integers(0, 2**31))
def test_grid_consistency(s, seed):
    M = default_grid(s.n_max)
    F = grid_values(s, M)
    js = np.random.default_rng(seed).integers(0, M, size=32)
    for j in js:
        direct = exp_sum_at(s, j / M)
        assert abs(F[j] - direct) <= 1e-9 * max(1.0, abs(direct)) + 1e-9 * s.count


# ---- discrete moments


def test_discrete_trivial_cases():
    s = materialize(RFree(2), 200)
    assert discrete_moment(s, 1.7, 1) == pytest.approx(s.count**1.7, rel=1e-12)
    for q in (1, 5, 64):
        assert discrete_moment(materialize(Explicit((1,)), 50), 1.3, q) == pytest.approx(1.0, abs=1e-12)


def test_discrete_against_double_loop():
    s = materialize(RFree(2), 100)
    assert discrete_moment(s, 1.5, 7) == pytest.approx(brute_discrete(s, 1.5, 7), rel=1e-9)


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.integers(1, 200), st.integers(1, 64), st.floats(0.5, 2.5))
def test_discrete_brute_force_property(seed, N, q, p):
    s = random_slice(seed, N)
    assert discrete_moment(s, p, q) == pytest.approx(brute_discrete(s, p, q), rel=1e-9, abs=1e-12)


@given(slices, st.integers(1, 256))
def test_discrete_parseval(s, q):
    lhs = float(np.mean(np.abs(discrete_values(s, q)) ** 2))
    rhs = float(np.sum(residue_counts(s, q).astype(float) ** 2))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


# ---- Littlewood and slope fits


def test_littlewood_examples():
    chk = littlewood_floor_check(materialize(Naturals(), 4096))
    assert chk.ratio >= 0.3 and chk.passes
    two = littlewood_floor_check(materialize(Explicit((1, 2)), 2), M=1 << 16)
    assert two.i1 == pytest.approx(4 / math.pi, rel=1e-6)
    assert two.log_count == pytest.approx(math.log(2))
    assert two.ratio == pytest.approx(4 / math.pi / math.log(2), rel=1e-6)
    with pytest.raises(DomainError):
        littlewood_floor_check(materialize(Explicit((5,)), 5))


def test_slope_fit_small_ladder():
    fit = subconvexity_fit(Naturals(), 1.5, [2**j for j in range(8, 13)])
    assert fit.slope == pytest.approx(0.5, abs=0.05)
    assert fit.passes and len(fit.ratios) == 5
    assert fit.residual_rms < 0.05


def test_slope_fit_needs_four_points():
    with pytest.raises(InvalidParam):
        subconvexity_fit(Naturals(), 1.5, [256, 512, 1024])
