import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gosszeta.config import Config
from gosszeta.exceptions import PrecisionError
from gosszeta.padic import PadicExponent, d, decompose, is_q_full, \
    parse_exponent, profile_for_depth, random_exponent, y_partial, y_window
from gosszeta.util import split_prime_power


def build_test_profiles(q, count=20, J=40):
    rng = np.random.default_rng(Config.DEFAULT_SEED)
    p, b = split_prime_power(q)
    out = []
    for _ in range(count):
        y = random_exponent(p, b * J, rng, low=1)
        out.append(decompose(y, p, b, J))
    return out


def test_minus_one_digits():
    y = PadicExponent.from_int(-1, 3)
    assert y.digits_upto(5) == (2, 2, 2, 2, 2)
    assert y.residue(2) == 8
    assert y.precision is None


def test_ratio_digits():
    y = parse_exponent('ratio:1/2', 3)
    assert y.digits_upto(4) == (2, 1, 1, 1)
    assert parse_exponent(y.descriptor(), 3) == y


def test_parse_grammar():
    assert parse_exponent('-1', 2).tag == -1
    y = parse_exponent('digits:3:1,2,0', 3)
    assert y.digits == (1, 2, 0)
    assert y.precision == 3
    with pytest.raises(PrecisionError):
        y.digits_upto(4)
    with pytest.raises(ValueError):
        parse_exponent('digits:5:1,2', 3)
    with pytest.raises(ValueError):
        parse_exponent('ratio:1/3', 3)
    with pytest.raises(ValueError):
        parse_exponent('one half', 3)


def test_exponent_arithmetic():
    y = PadicExponent.from_int(5, 7) + 3
    assert y.tag == 8
    z = PadicExponent.from_digits(3, [2, 2, 2]) + 1
    assert z.residue(3) == 0


@given(st.integers(-50, 50), st.integers(1, 40), st.integers(1, 6))
def test_ratio_residues(a, c, k):
    p = 5
    if c % p == 0:
        return
    y = PadicExponent.from_ratio(a, c, p)
    assert (y.residue(k) * c - a) % p ** k == 0


def test_decompose_minus_one_q4():
    y = PadicExponent.from_int(-1, 2)
    profile = decompose(y, 2, 2, 4)
    assert profile.components == ((1, 1, 1, 1), (1, 1, 1, 1))
    assert profile.q_full
    assert not profile.caveat
    assert profile.certified == [4, 4]
    assert profile.y(1, 2) == 5
    assert profile.y(2, 2) == 10
    assert profile.d(1, 3) == 16
    assert profile.recompose() == 2 ** 8 - 1
    with pytest.raises(PrecisionError):
        profile.y(1, 5)


def test_positive_integer_is_exhausted():
    y = PadicExponent.from_int(5, 2)
    profile = decompose(y, 2, 1, 8)
    assert not profile.q_full
    assert profile.exhausted == (True,)
    assert profile.certified == [2]
    with pytest.raises(PrecisionError, match='exhausted'):
        profile.y(1, 3)


def test_zero_is_degenerate():
    profile = decompose(PadicExponent.from_int(0, 3), 3, 1, 8)
    assert profile.degenerate
    assert not profile.q_full


def test_profile_for_depth_certifies():
    y = PadicExponent.from_int(-1, 3)
    profile = profile_for_depth(y, 3, 1, 50)
    assert profile.certified[0] >= 50


def test_digit_growth():
    for q in (2, 3, 4, 5, 8, 9):
        for profile in build_test_profiles(q):
            p = profile.p
            for i in range(1, profile.b + 1):
                top = profile.certified[i - 1] - (p - 1)
                for n in range(1, top + 1):
                    assert profile.d(i, n + p - 1) >= q * profile.d(i, n)
                for m in range(0, top + 1):
                    assert profile.y(i, m + p - 1) > q * profile.y(i, m)


def test_digit_sequence_functions():
    profile = decompose(PadicExponent.from_int(-1, 3), 3, 1, 8)
    assert [d(profile, 1, n) for n in range(6)] == [0, 1, 1, 3, 3, 9]
    assert y_partial(profile, 1, 4) == 8
    assert y_partial(profile, 1, -2) == 0
    assert y_window(profile, 1, 2, 2) == y_partial(profile, 1, 4) - 2
    assert 2 * y_window(profile, 1, 0, 2) <= y_partial(profile, 1, 4)


def test_q_full_flags():
    assert is_q_full(decompose(PadicExponent.from_int(-1, 3), 3, 1, 8)) == \
        (True, False)
    assert not is_q_full(decompose(PadicExponent.from_int(5, 3), 3, 1, 8))[0]
    assert is_q_full(decompose(PadicExponent.from_ratio(-1, 2, 3), 3, 1,
                               8)) == (True, False)
    untagged = PadicExponent.from_digits(3, [2] * 16)
    assert is_q_full(decompose(untagged, 3, 1, 16)) == (True, True)


def build_test_digit_profile(data, q, J=12):
    p, b = split_prime_power(q)
    digits = data.draw(st.lists(st.integers(0, p - 1), min_size=b * J,
                                max_size=b * J))
    return decompose(PadicExponent.from_digits(p, digits), p, b, J)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([4, 8, 9, 25]), st.data())
def test_d_dominates_lagged_sums(q, data):
    profile = build_test_digit_profile(data, q)
    p = profile.p
    for i in range(1, profile.b + 1):
        for n in range(1, profile.certified[i - 1] + 1):
            lagged = sum(profile.y(i, n - k * (p - 1))
                         for k in range(1, n // (p - 1) + 1))
            assert p * profile.d(i, n) > lagged


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 9]), st.data())
def test_y_is_superadditive(q, data):
    profile = build_test_digit_profile(data, q)
    for i in range(1, profile.b + 1):
        top = profile.certified[i - 1]
        for m in range(top + 1):
            for m2 in range(top - m + 1):
                assert profile.y(i, m + m2) >= \
                    profile.y(i, m) + profile.y(i, m2)
