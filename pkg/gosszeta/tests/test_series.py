from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gosszeta.exceptions import PrecisionError
from gosszeta.ff import field_from_order
from gosszeta.padic import PadicExponent
from gosszeta.series import AtLeast, NewtonPolygon, OneUnit, TruncSeries, \
    as_one_unit, newton_polygon, one_unit_pow

PRECISION = 9


def build_test_unit(field, codes):
    coeffs = [field.one] + [field.element(c) for c in codes]
    coeffs += [field.zero] * (PRECISION - len(coeffs))
    return as_one_unit(TruncSeries(field, coeffs[:PRECISION]))


unit_codes = st.lists(st.integers(0, 3), min_size=1, max_size=PRECISION - 1)


def test_inverse():
    field = field_from_order(3)
    u = build_test_unit(field, [1, 2, 0, 1])
    assert u * u.inverse() == TruncSeries.one(field, PRECISION)
    assert u ** -2 * u ** 2 == TruncSeries.one(field, PRECISION)


def test_minus_one_power_is_inverse():
    for q in (2, 3, 4, 9):
        field = field_from_order(q)
        u = build_test_unit(field, [1, 0, q - 1, 1])
        y = PadicExponent.from_int(-1, field.p)
        assert one_unit_pow(u, y) == u.inverse()


def test_integer_power_matches_repeated_product():
    field = field_from_order(4)
    u = build_test_unit(field, [2, 3, 1])
    for k in range(7):
        assert one_unit_pow(u, PadicExponent.from_int(k, 2)) == u ** k


@settings(max_examples=30, deadline=None)
@given(unit_codes, unit_codes, st.integers(0, 40), st.integers(0, 40))
def test_power_is_a_group_action(a_codes, b_codes, j, k):
    field = field_from_order(4)
    u, v = build_test_unit(field, a_codes), build_test_unit(field, b_codes)
    yj, yk = PadicExponent.from_int(j, 2), PadicExponent.from_int(k, 2)
    assert one_unit_pow(u, yj + yk) == one_unit_pow(u, yj) * \
        one_unit_pow(u, yk)
    assert one_unit_pow(u * v, yj) == one_unit_pow(u, yj) * \
        one_unit_pow(v, yj)


def test_one_unit_needs_constant_one():
    field = field_from_order(3)
    with pytest.raises(ValueError):
        OneUnit(field, TruncSeries.monomial(field, 4, 1).coeffs)


def test_short_exponent():
    field = field_from_order(3)
    u = build_test_unit(field, [1])
    y = PadicExponent.from_digits(3, [2])
    with pytest.raises(PrecisionError):
        one_unit_pow(u, y)


def test_valuation():
    field = field_from_order(9)
    assert TruncSeries.monomial(field, 8, 3).valuation() == 3
    assert TruncSeries.zero(field, 8).valuation() == AtLeast(8)
    s = TruncSeries.monomial(field, 8, 2).shift(3)
    assert s.valuation() == 5
    assert s.shift(4).is_zero()


def test_newton_polygon_two_slopes():
    polygon = newton_polygon([(0, 0), (1, 2), (2, 10)])
    assert polygon.slopes == ((Fraction(2), 1), (Fraction(8), 1))
    assert polygon.certified_through == 2
    assert polygon.expanded() == [2, 8]


def test_newton_polygon_unknown_points():
    polygon = newton_polygon([(0, 0), (1, AtLeast(5)), (2, 4)])
    assert polygon.slopes == ((Fraction(2), 2),)
    assert polygon.certified_through == 2
    polygon = newton_polygon([(0, 0), (1, 3), (2, AtLeast(4))])
    assert polygon.certified_through == 0


def test_newton_polygon_must_start_at_origin():
    with pytest.raises(ValueError):
        newton_polygon([(0, 1), (1, 2)])


def test_polygon_from_slopes():
    polygon = NewtonPolygon.from_slopes([0, 4, 4, 24])
    assert polygon.slopes == ((0, 1), (4, 2), (24, 1))
    assert polygon.degree == 4
    assert polygon.agrees_with(NewtonPolygon.from_slopes([0, 4, 4, 30]), 3)
    assert NewtonPolygon.from_json(polygon.to_json()) == polygon
    with pytest.raises(ValueError):
        NewtonPolygon.from_slopes([3, 1])
