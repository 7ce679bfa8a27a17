from fractions import Fraction

import pytest

from gosszeta.exceptions import BudgetError
from gosszeta.ff import Poly, field_from_order
from gosszeta.padic import PadicExponent
from gosszeta.series import AtLeast
from gosszeta.vadic import LocalRing, comparison_check_dv1, taylor_shift, \
    teichmuller, vadic_predicted_slopes, vadic_predicted_valuation_slopes, \
    vadic_real_parts, zeta_vadic


def build_test_place(q, coeffs):
    field = field_from_order(q)
    return field, Poly(field, coeffs)


def test_local_ring_rejects_bad_places():
    field, f = build_test_place(5, [1, 0, 1])
    with pytest.raises(ValueError):
        LocalRing(f, 3)
    with pytest.raises(ValueError):
        LocalRing(Poly(field, [1, 2]), 3)


def test_local_arithmetic():
    field, f = build_test_place(3, [1, 0, 1])
    ring = LocalRing(f, 4)
    theta = ring.element(Poly(field, [0, 1]))
    one = ring.element(1)
    assert ring.r_v == 9
    assert theta * theta.inverse() == one
    assert (theta * theta + one).valuation() == 1
    assert ring.element(f * f).valuation() == 2
    assert ring.element(0).valuation() == AtLeast(4)
    with pytest.raises(ValueError):
        ring.element(f).inverse()


def test_teichmuller_split():
    field, f = build_test_place(3, [1, 0, 1])
    ring = LocalRing(f, 4)
    one = ring.element(1)
    for coeffs in ([0, 1], [1, 1], [2, 0, 1, 1]):
        a = ring.element(Poly(field, coeffs))
        parts = teichmuller(a)
        assert parts.omega ** ring.r_v == parts.omega
        assert parts.omega * parts.unit == a
        assert not (parts.unit - one).is_unit()
    with pytest.raises(ValueError):
        teichmuller(ring.element(f))


def test_vadic_slopes_degree_one_place():
    field, f = build_test_place(3, [0, 1])
    y = PadicExponent.from_int(-1, 3)
    zs = zeta_vadic(f, y, 3, 16)
    assert zs.valuations() == [0, 0, 2, 10]
    polygon = zs.newton_polygon()
    assert polygon.expanded() == [0, 2, 8]
    assert vadic_predicted_valuation_slopes(f, y, 2).expanded() == [0, 2, 8]
    predicted = vadic_predicted_slopes(f, y, 2)
    assert predicted.expanded() == [0, 1, 4]
    assert vadic_real_parts(polygon, f).expanded() == predicted.expanded()


def test_vadic_slopes_degree_two_place():
    field, f = build_test_place(3, [1, 0, 1])
    y = PadicExponent.from_int(-1, 3)
    zs = zeta_vadic(f, y, 4, 12)
    polygon = zs.newton_polygon()
    assert polygon.expanded() == [0, 0, 4, 4]
    assert vadic_predicted_valuation_slopes(f, y, 1).expanded() == \
        polygon.expanded()
    predicted = vadic_predicted_slopes(f, y, 1)
    assert predicted.expanded() == [0, 0, Fraction(1, 2), Fraction(1, 2)]
    assert vadic_real_parts(polygon, f).expanded() == predicted.expanded()


def test_predicted_slopes_without_count():
    _, f = build_test_place(3, [1, 0, 1])
    assert vadic_predicted_slopes(f, PadicExponent.from_int(-1, 3),
                                  0).expanded() == [0, 0]


def test_comparison_identity():
    for q, c in ((3, 0), (3, 1), (2, 1)):
        field = field_from_order(q)
        y = PadicExponent.from_int(-1, field.p)
        report = comparison_check_dv1(c, y, 4, 12, field)
        assert report.verdict
        assert report.first_mismatch is None
        assert report.lhs == report.rhs


def test_taylor_shift_needs_linear_place():
    field, f = build_test_place(3, [1, 0, 1])
    ring = LocalRing(f, 2)
    with pytest.raises(ValueError):
        taylor_shift(ring.element(1), 0)


def test_vadic_budget():
    _, f = build_test_place(9, [0, 1])
    with pytest.raises(BudgetError):
        zeta_vadic(f, PadicExponent.from_int(-1, 3), 6, 4)


def test_vadic_zeta_at_zero():
    # only the Euler factor at v survives: 1 - x^{d_v}
    for coeffs, expected in (([0, 1], [0, 0, AtLeast(8), AtLeast(8)]),
                             ([1, 0, 1], [0, AtLeast(8), 0, AtLeast(8)])):
        _, f = build_test_place(3, coeffs)
        zs = zeta_vadic(f, PadicExponent.from_int(0, 3), 3, 8)
        assert zs.valuations() == expected
