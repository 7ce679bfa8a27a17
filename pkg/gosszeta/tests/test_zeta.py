import numpy as np
import pytest

from gosszeta.config import Config
from gosszeta.dwork import char_series_stabilized, profile_for_precision, \
    zeta_np_from_charseries
from gosszeta.exceptions import BudgetError
from gosszeta.ff import Poly, field_from_order
from gosszeta.minperm import slopes_for_exponent
from gosszeta.padic import PadicExponent, parse_exponent
from gosszeta.series import AtLeast, TruncSeries
from gosszeta.zeta import TrivialZero, one_unit_of_monic, \
    special_value_poly, trivial_zero_order, zeta_direct

ROUTE_CASES = [(2, '-1'), (2, 'ratio:-1/3'), (3, '-1'), (3, 'ratio:-1/2'),
               (4, '-1'), (5, '-1')]


def build_test_exponent(q, descriptor):
    field = field_from_order(q)
    return field, parse_exponent(descriptor, field.p)


def test_one_unit_of_monic():
    field = field_from_order(3)
    u = one_unit_of_monic(Poly(field, [1, 2, 1]), 4)
    assert u.codes() == [1, 2, 1, 0]
    with pytest.raises(ValueError):
        one_unit_of_monic(Poly(field, [1, 2]), 4)


def test_zeta_at_zero_is_one():
    for q in (2, 3, 4):
        field, y = build_test_exponent(q, '0')
        zs = zeta_direct(y, field, 3, 8)
        assert zs[0] == TruncSeries.one(field, 8)
        assert all(s.is_zero() for s in zs.coeffs[1:])


def test_zeta_minus_one_q3():
    field, y = build_test_exponent(3, '-1')
    zs = zeta_direct(y, field, 3, 32)
    assert zs.degree == 3
    assert zs.valuations()[:3] == [0, 2, 10]
    assert zs.valuations()[3] == AtLeast(32)
    polygon = zs.newton_polygon()
    assert polygon.expanded() == [2, 8]
    assert polygon.certified_through == 2


def test_three_routes_agree():
    for q, descriptor in ROUTE_CASES:
        field, y = build_test_exponent(q, descriptor)
        nu, _ = slopes_for_exponent(y, field.p, field.m, 2)
        n = sum(nu.nu) + 4
        direct = zeta_direct(y, field, 2, n).newton_polygon()
        profile = profile_for_precision(y, field.p, field.m, n)
        cs = char_series_stabilized(profile, 2, n)
        fredholm = zeta_np_from_charseries(cs, field.m)
        assert direct.expanded() == fredholm.expanded() == list(nu.nu)
        assert all(k == 1 for _, k in direct.slopes)
        assert all(v % (q - 1) == 0 for v in nu.nu)


def test_zeta_checks_inputs():
    field = field_from_order(3)
    with pytest.raises(ValueError):
        zeta_direct(PadicExponent.from_int(-1, 2), field, 2, 8)
    with pytest.raises(BudgetError):
        zeta_direct(PadicExponent.from_int(-1, 3), field_from_order(9), 6, 8)


def test_special_value_q3_minus_two():
    field = field_from_order(3)
    sp = special_value_poly(3, -2)
    assert sp.coeffs == (Poly(field, [1]), Poly(field, [2]))
    assert sp.degree == 1
    assert not sp.evaluate(Poly(field, [1]))
    assert sp.root_order_at_one() == 1
    assert trivial_zero_order(3, -2) == TrivialZero('even', 1)


def test_special_value_q3_minus_one():
    sp = special_value_poly(3, -1)
    assert sp.evaluate(Poly(field_from_order(3), [1]))
    assert trivial_zero_order(3, -1) == TrivialZero('odd', 0)


def test_trivial_zero_orders():
    for q, j in ((2, -1), (2, -2), (2, -3), (3, -4), (3, -6), (4, -3),
                 (5, -4)):
        assert trivial_zero_order(q, j) == TrivialZero('even', 1)
    for q, j in ((3, -3), (3, -5), (5, -1), (5, -2), (4, -1)):
        assert trivial_zero_order(q, j) == TrivialZero('odd', 0)


def test_special_value_rejects_nonnegative():
    with pytest.raises(ValueError):
        special_value_poly(3, 0)
    with pytest.raises(BudgetError):
        special_value_poly(9, -728)


def build_test_route_exponents(q, count, seed=Config.DEFAULT_SEED):
    """Distinct negative integers -k, each q-full."""
    field = field_from_order(q)
    rng = np.random.default_rng(seed + q)
    ks = rng.permutation(np.arange(1, 61))[:count]
    return field, [PadicExponent.from_int(-int(k), field.p) for k in ks]


@pytest.mark.slow
def test_three_routes_agree_full_sample():
    for q in (2, 3, 4, 5):
        field, exponents = build_test_route_exponents(q, 5)
        for y in exponents:
            nu, _ = slopes_for_exponent(y, field.p, field.m, 4)
            n = min(sum(nu.nu) + 4, 200)
            direct = zeta_direct(y, field, 4, n).newton_polygon()
            profile = profile_for_precision(y, field.p, field.m, n)
            cs = char_series_stabilized(profile, 4, n)
            fredholm = zeta_np_from_charseries(cs, field.m)
            through = min(direct.certified_through,
                          fredholm.certified_through)
            assert through >= 1
            assert direct.expanded()[:through] == \
                fredholm.expanded()[:through] == list(nu.nu[:through])
            assert all(k == 1 for _, k in direct.certified().slopes)
            assert all(v % (q - 1) == 0 for v in nu.nu)


def test_raising_precision_keeps_coefficients():
    for q, descriptor in ROUTE_CASES:
        field, y = build_test_exponent(q, descriptor)
        low = zeta_direct(y, field, 2, 12)
        high = zeta_direct(y, field, 2, 40)
        assert [s.truncate(12) for s in high.coeffs] == list(low.coeffs)


def test_congruent_exponents_agree():
    # y and y + p^k u differ by a factor = 1 mod pi^{p^k} in every term
    for q in (2, 3, 4):
        field = field_from_order(q)
        p = field.p
        for k, u in ((1, 1), (2, 1), (2, p + 1), (3, 2 * p - 1)):
            y = PadicExponent.from_int(-1, p)
            shifted = PadicExponent.from_int(-1 + p ** k * u, p)
            n = p ** k
            a = zeta_direct(y, field, 3, n + 8)
            b = zeta_direct(shifted, field, 3, n + 8)
            assert [s.truncate(n) for s in a.coeffs] == \
                [s.truncate(n) for s in b.coeffs]


def test_trivial_zero_parity_random():
    rng = np.random.default_rng(Config.DEFAULT_SEED)
    even = odd = 0
    while even < 30 or odd < 30:
        q = int(rng.choice([2, 3, 4, 5, 7]))
        j = -int(rng.integers(1, 41))
        if j % (q - 1) == 0:
            if even == 30:
                continue
            even += 1
            assert trivial_zero_order(q, j) == TrivialZero('even', 1)
        else:
            if odd == 30:
                continue
            odd += 1
            assert trivial_zero_order(q, j) == TrivialZero('odd', 0)
