import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subconvex.errors import DomainError, InvalidParam, ParseError
from subconvex.reals import DecimalString, QuadraticSurd, Rational
from subconvex.sets import (
    Affine,
    Beatty,
    Complement,
    Difference,
    Explicit,
    Intersect,
    Naturals,
    Perturb,
    RFree,
    Splice,
    Union,
    count_ladder,
    materialize,
    parse_set,
    young_exponent,
)

SQRT2 = QuadraticSurd(0, 1, 2)
PHI = QuadraticSurd(1, 1, 5, 2)


def is_rfree_brute(n, r):
    return all(n % (d**r) for d in range(2, int(round(n ** (1 / r))) + 2))


# ---- worked examples


def test_squarefree_upto_10():
    s = materialize(RFree(2), 10)
    assert s.elements().tolist() == [1, 2, 3, 5, 6, 7, 10]
    assert s.count == 7


def test_beatty_sqrt2_upto_10():
    oracle = sorted({math.isqrt(2 * m * m) for m in range(1, 9)} & set(range(1, 11)))
    assert oracle == [1, 2, 4, 5, 7, 8, 9]
    s = materialize(Beatty(SQRT2, 0), 10)
    assert s.elements().tolist() == oracle and s.count == 7


def test_affine_odd_numbers():
    s = materialize(Affine(2, 1, Naturals()), 9)
    assert s.elements().tolist() == [3, 5, 7, 9]


def test_count_ladder_examples():
    assert count_ladder(Naturals(), [10, 100]) == [(10, 10, 1.0), (100, 100, 1.0)]
    assert count_ladder(Explicit((5,)), [4]) == [(4, 0, 0.0)]
    ((N, c, d),) = count_ladder(RFree(2), [10**6])
    assert abs(d - 6 / math.pi**2) < 0.002


def test_count_ladder_requires_ascending():
    with pytest.raises(InvalidParam):
        count_ladder(Naturals(), [100, 10])


@pytest.mark.parametrize("r", [2, 3, 4])
def test_rfree_matches_brute_force(r):
    s = materialize(RFree(r), 3000)
    brute = [n for n in range(1, 3001) if is_rfree_brute(n, r)]
    assert s.elements().tolist() == brute


def test_beatty_small_alpha_contains_tail():
    s = materialize(Beatty(Rational(1, 2), Rational(5, 2)), 20)
    # floor(m/2 + 5/2) for m >= 1 starts at 3 and hits every integer after it
    assert s.elements().tolist() == list(range(3, 21))


def test_beatty_negative_shift_skips_nonpositive():
    s = materialize(Beatty(Rational(3), Rational(-5)), 20)
    assert s.elements().tolist() == [1, 4, 7, 10, 13, 16, 19]


def test_beatty_decimal_alpha_certified():
    exact = materialize(Beatty(SQRT2, 0), 5000)
    dec = materialize(Beatty(DecimalString("1.4142135623730950488016887", "1e-24"), 0), 5000)
    assert np.array_equal(exact.bits, dec.bits)


def test_beatty_rejects_nonpositive_alpha():
    with pytest.raises(InvalidParam):
        Beatty(Rational(-1), 0)
    with pytest.raises(InvalidParam):
        Beatty(0, 0)


def test_rfree_rejects_small_r():
    with pytest.raises(InvalidParam):
        RFree(1)


def test_explicit_and_perturb():
    base = Explicit((2, 4, 6, 8))
    p = Perturb(base, Explicit((4,)), Explicit((5, 11)))
    assert materialize(p, 10).elements().tolist() == [2, 5, 6, 8]


def test_splice_uses_right_closed_pieces():
    e = Splice(((Explicit((1, 2, 3, 4)), 0, Fraction(1, 3)), (Naturals(), Fraction(1, 3), Fraction(2, 3)), (Explicit(()), Fraction(2, 3), 1)))
    # N = 9: (0,3] from the explicit set, (3,6] all, (6,9] empty
    assert materialize(e, 9).elements().tolist() == [1, 2, 3, 4, 5, 6]


def test_splice_must_partition():
    with pytest.raises(InvalidParam):
        Splice(((Naturals(), 0, Fraction(1, 2)), (Naturals(), Fraction(2, 3), 1)))


# ---- young exponent


def test_young_exponent_examples():
    assert young_exponent(Fraction(4, 3), Fraction(4, 3)) is None
    assert young_exponent(4 / 3, 4 / 3) is None
    assert young_exponent(1.2, 1.2) == pytest.approx(1.5, abs=1e-12)
    assert young_exponent(1.9, 1.9) is None
    with pytest.raises(DomainError):
        young_exponent(2.0, 1.5)


# ---- parsing


@pytest.mark.parametrize(
    "text",
    [
        "naturals",
        "rfree 2",
        "beatty surd 0 1 2 1 rational 0 1",
        "intersect rfree 2 beatty surd 1 1 5 2 rational 3 10",
        "affine 3 1 rfree 2",
        "difference rfree 3 rfree 2",
        "perturb naturals explicit 2 1 2 explicit 0",
        "splice 2 0 1/2 rfree 2 1/2 1 naturals",
        "complement union explicit 1 7 rfree 3",
    ],
)
def test_parse_round_trip(text):
    e = parse_set(text)
    assert e.to_text() == text
    assert parse_set(e.to_text()) == e


@pytest.mark.parametrize("text", ["bogus", "rfree", "rfree x", "rfree 1", "intersect naturals", "naturals naturals", "explicit 2 5 3", ""])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_set(text)


# ---- invariants

leaves = st.one_of(
    st.just(Naturals()),
    st.integers(2, 4).map(RFree),
    st.sampled_from([Beatty(SQRT2, 0), Beatty(PHI, Rational(3, 10)), Beatty(Rational(7, 3), Rational(-1, 2)), Beatty(Rational(2, 3), 0)]),
    st.lists(st.integers(1, 300), max_size=20, unique=True).map(lambda xs: Explicit(tuple(sorted(xs)))),
)


def _extend(children):
    return st.one_of(
        children.map(Complement),
        st.tuples(children, children).map(lambda t: Intersect(*t)),
        st.tuples(children, children).map(lambda t: Union(*t)),
        st.tuples(children, children).map(lambda t: Difference(*t)),
        st.tuples(st.integers(1, 4), st.integers(-3, 3), children).map(lambda t: Affine(*t)),
        st.tuples(children, children, children).map(lambda t: Perturb(*t)),
    )


exprs = st.recursive(leaves, _extend, max_leaves=6)


@given(exprs, st.integers(1, 400), st.data())
def test_prefix_consistency(e, N, data):
    M = data.draw(st.integers(1, N))
    big, small = materialize(e, N), materialize(e, M)
    assert np.array_equal(big.bits[: M + 1], small.bits)


@given(exprs, st.integers(1, 400))
def test_algebraic_identities(e, N):
    s = materialize(e, N)
    assert np.array_equal(materialize(Complement(Complement(e)), N).bits, s.bits)
    assert np.array_equal(materialize(Intersect(e, Naturals()), N).bits, s.bits)
    assert materialize(Difference(e, e), N).count == 0
    assert s.count == int(np.count_nonzero(s.bits))
    assert not s.bits[0]


@given(exprs, st.integers(1, 300))
def test_text_round_trip_materializes_identically(e, N):
    assert np.array_equal(materialize(parse_set(e.to_text()), N).bits, materialize(e, N).bits)


@given(st.integers(2, 5), st.integers(0, 3), st.integers(10, 5000))
def test_rfree_nested(r, extra, N):
    a, b = materialize(RFree(r), N), materialize(RFree(r + extra), N)
    assert not np.any(a.bits & ~b.bits)


@settings(max_examples=30)
@given(
    st.sampled_from([SQRT2, PHI, QuadraticSurd(1, 2, 3, 1), Rational(17, 5), QuadraticSurd(2, 1, 7, 3)]),
    st.fractions(Fraction(-3), Fraction(3), max_denominator=50),
)
def test_beatty_gaps(alpha, beta):
    s = materialize(Beatty(alpha, Rational(beta.numerator, beta.denominator)), 4000)
    gaps = set(np.diff(s.elements()).tolist())
    a = float(alpha)
    assert gaps <= {math.floor(a), math.ceil(a)}


def test_materialize_deterministic():
    e = parse_set("intersect rfree 2 beatty surd 1 1 5 2 0.3")
    a, b = materialize(e, 10**5), materialize(e, 10**5)
    assert np.array_equal(a.bits, b.bits)


def test_slice_is_immutable():
    s = materialize(Naturals(), 10)
    with pytest.raises(ValueError):
        s.bits[3] = False
