import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subconvex.arith import (
    dirichlet_char,
    explicit_fn,
    gauss_sum,
    hf_norms,
    holder_chain_check,
    is_prime,
    minor_arc_ok,
    primitive_root,
    ramanujan_tau,
    restricted_average,
    restricted_char_sum,
    sieve,
)
from subconvex.config import Config
from subconvex.errors import (
    DomainError,
    GridTooCoarse,
    LengthMismatch,
    NotPrime,
    PrincipalChar,
    ResourceLimit,
)
from subconvex.reals import QuadraticSurd, Rational
from subconvex.sets import Explicit, IndicatorSlice, Naturals, RFree, materialize

PRIMES_TO_101 = [q for q in range(2, 102) if all(q % d for d in range(2, int(q**0.5) + 1))]


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


# ---- sieves


def test_small_values():
    assert sieve("mobius", 6).values[1:].tolist() == [1, -1, -1, 0, -1, 1]
    lam = sieve("mangoldt", 8).values
    assert lam[8] == pytest.approx(math.log(2)) and lam[6] == 0
    tau = sieve("tau", 10).values
    assert tau[1] == 1 and tau[2] == -24 and tau[3] == 252 and tau[10] == -115920


def test_divisor_sums_up_to_1e4():
    N = 10**4
    mu = sieve("mobius", N).values.astype(np.int64)
    lam = sieve("mangoldt", N).values
    mu_acc = np.zeros(N + 1, dtype=np.int64)
    lam_acc = np.zeros(N + 1)
    for d in range(1, N + 1):
        mu_acc[d::d] += mu[d]
        lam_acc[d::d] += lam[d]
    assert mu_acc[1] == 1 and not mu_acc[2:].any()
    assert np.allclose(lam_acc[1:], np.log(np.arange(1, N + 1)), atol=1e-9)


def test_tau_multiplicative():
    tau = ramanujan_tau(200 * 200 // 4)
    for m in range(1, 201):
        for n in range(m, 201):
            if math.gcd(m, n) == 1 and m * n < tau.size:
                assert tau[m * n] == tau[m] * tau[n]


def test_sieve_limits():
    with pytest.raises(ResourceLimit):
        sieve("tau", 10**5)
    with pytest.raises(ResourceLimit):
        sieve("mobius", 10**6, cfg=Config(sieve_ceiling=10**5))


def test_phase_twist_values():
    f = sieve("mobius_phase", 50, k=2, theta=Rational(1, 4))
    mu = sieve("mobius", 50).values
    n = np.arange(51)
    assert np.allclose(f.values, mu * np.exp(2j * np.pi * (n**2 % 4) / 4))


# ---- H_f norms and averages


def test_hf_norm_examples():
    h = hf_norms(explicit_fn(np.ones(100)))
    assert h.sup_norm == pytest.approx(1.0) and h.l2_norm == pytest.approx(1.0)
    N, M = 64, 4096
    j0 = 333
    f = explicit_fn(np.exp(-2j * np.pi * np.arange(1, N + 1) * j0 / M))
    h = hf_norms(f, grid_M=M)
    assert h.sup_norm == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(GridTooCoarse):
        hf_norms(f, grid_M=1024)
    with pytest.raises(LengthMismatch):
        hf_norms(f, N=65)


def test_hf_sup_monotone_under_refinement(rng):
    for _ in range(10):
        f = explicit_fn(rng.normal(size=200) + 1j * rng.normal(size=200))
        a, b = hf_norms(f, grid_M=8192), hf_norms(f, grid_M=16384)
        assert a.sup_norm <= b.sup_norm + 1e-12
        assert a.sup_norm <= np.abs(f.values).sum() / 200 + 1e-12


@pytest.mark.slow
def test_mobius_sup_stable_on_finer_grid():
    mu = sieve("mobius", 10**5)
    coarse = hf_norms(mu)
    fine = hf_norms(mu, grid_M=4 * coarse.grid_size)
    assert fine.sup_norm == pytest.approx(coarse.sup_norm, rel=0.02)


def test_restricted_average_examples():
    s = materialize(RFree(2), 1000)
    assert restricted_average(explicit_fn(np.ones(1000)), s) == pytest.approx(s.count / 1000)
    mu = sieve("mobius", 10**6)
    assert abs(restricted_average(mu, materialize(Naturals(), 10**6))) <= 1e-3
    with pytest.raises(LengthMismatch):
        restricted_average(mu, s)


# ---- Hoelder chain


def random_trial(seed, N=256):
    r = np.random.default_rng(seed)
    f = explicit_fn(r.choice([-1.0, 1.0], size=N) * (r.random(N) < 0.9))
    s = IndicatorSlice(N, np.r_[False, r.random(N) < r.uniform(0.05, 0.95)])
    return f, s, float(r.uniform(1.0, 1.999))


def test_holder_examples():
    s = materialize(Naturals(), 128)
    chk = holder_chain_check(explicit_fn(np.ones(128)), s, 1.5)
    assert chk.lhs == pytest.approx(1.0) and chk.rhs >= 1 - 1e-12
    zero = holder_chain_check(explicit_fn(np.zeros(128)), s, 1.5)
    assert zero.lhs == 0 and zero.rhs == 0
    with pytest.raises(DomainError):
        holder_chain_check(explicit_fn(np.ones(128)), s, 2.0)


@settings(max_examples=100)
@given(st.integers(0, 2**32))
def test_holder_slack_nonnegative(seed):
    f, s, p = random_trial(seed)
    assert holder_chain_check(f, s, p).slack >= -1e-9


def test_holder_slack_at_fixed_p():
    for seed in range(100):
        f, s, _ = random_trial(seed)
        assert holder_chain_check(f, s, 1.2).slack >= -1e-9


# ---- characters and Gauss sums


def test_primitive_roots():
    assert [primitive_root(q) for q in (3, 5, 7, 11, 13)] == [2, 2, 3, 2, 2]
    assert is_prime(10007) and not is_prime(10005)


def test_legendre_mod_5():
    chi = dirichlet_char(5, 2)
    assert np.allclose(chi.values, [0, 1, -1, -1, 1])
    principal = dirichlet_char(3, 0)
    assert principal.is_principal and np.allclose(principal.values, [0, 1, 1])
    with pytest.raises(NotPrime):
        dirichlet_char(15, 1)


@pytest.mark.parametrize("q", [7, 11, 13, 101])
def test_character_multiplicative_and_orthogonal(q, rng):
    for t in range(1, q - 1):
        chi = dirichlet_char(q, t)
        assert abs(chi.values[1:].sum()) < 1e-9
        m, n = rng.integers(1, 10**6, size=(2, 1000))
        assert np.allclose(chi(m * n), chi(m) * chi(n))
        assert np.allclose(np.abs(chi.values[1:]), 1)


def test_gauss_sum_examples():
    assert abs(gauss_sum(dirichlet_char(5, 2), 1)) == pytest.approx(math.sqrt(5), abs=1e-10)
    assert abs(gauss_sum(dirichlet_char(7, 3), 7)) < 1e-12
    chi = dirichlet_char(11, 4)
    assert abs(gauss_sum(chi, 6)) == pytest.approx(math.sqrt(11), abs=1e-9)
    with pytest.raises(PrincipalChar):
        gauss_sum(dirichlet_char(11, 0), 1)


def test_gauss_sum_bound_exhaustive():
    for q in PRIMES_TO_101[1:]:
        for t in range(1, q - 1):
            chi = dirichlet_char(q, t)
            for a in range(q):
                assert abs(gauss_sum(chi, a)) <= math.sqrt(q) + 1e-9


def test_gauss_sum_against_cmath():
    chi = dirichlet_char(13, 5)
    direct = sum(chi.values[m % 13] * cmath.exp(2j * math.pi * m * 3 / 13) for m in range(1, 14))
    assert gauss_sum(chi, 3) == pytest.approx(direct, abs=1e-12)


def test_character_sum_screen():
    chi = dirichlet_char(10007, (10007 - 1) // 2)
    assert np.allclose(chi.values[1:] ** 2, 1)
    rep = restricted_char_sum(chi, materialize(RFree(2), 10**5), p=1.1)
    assert rep.ratio < 1
    empty = restricted_char_sum(chi, materialize(Explicit(()), 100))
    assert empty.value == 0
    with pytest.raises(PrincipalChar):
        restricted_char_sum(dirichlet_char(7, 0), materialize(Naturals(), 10))


def test_minor_arc_predicate():
    assert not minor_arc_ok(Rational(1, 3), 10**4, 1.0)
    assert minor_arc_ok(QuadraticSurd(0, 1, 2, 1), 10**4, 1.0)
