import numpy as np
import pytest
from hypothesis import given, strategies as st

from gosszeta.ff import Poly, element_degree, embed, field_construct, \
    field_from_order, frobenius_iter, irreducible_polys, monic_batches, \
    monic_polys


def build_test_field(q=9):
    return field_from_order(q)


def test_field_orders():
    for q, (p, m) in {2: (2, 1), 4: (2, 2), 8: (2, 3), 9: (3, 2),
                      5: (5, 1)}.items():
        field = field_from_order(q)
        assert (field.p, field.m, field.q) == (p, m, q)
        assert len(list(field.elements())) == q


def test_not_a_prime_power():
    with pytest.raises(ValueError):
        field_from_order(6)
    with pytest.raises(ValueError):
        field_construct(4)


def test_field_construct_accepts_numpy_ints():
    assert field_construct(np.int64(3), np.int32(2)) is field_construct(3, 2)
    assert field_construct(np.int64(5)).p == 5
    assert type(field_construct(np.int64(5)).p) is int
    with pytest.raises(ValueError):
        field_construct(3.0)
    with pytest.raises(ValueError):
        field_construct(3, 0)


def test_unit_group_order():
    field = build_test_field(9)
    for x in field.units():
        assert x ** (field.q - 1) == field.one
        assert x * x.inverse() == field.one


def test_frobenius_fixes_prime_field():
    field = build_test_field(8)
    for x in field.elements():
        assert frobenius_iter(x, field.m) == x
        assert (frobenius_iter(x, 1) == x) == x.in_prime_field()
        assert field.m % element_degree(x) == 0


def test_codes_round_trip_through_vectors():
    field = build_test_field(9)
    for x in field.elements():
        assert field.element(x.code) == x
        assert field.from_vector(field.vector(x)) == x


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
def test_field_axioms(a, b, c):
    field = build_test_field(9)
    x, y, z = field.element(a), field.element(b), field.element(c)
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x - x == field.zero


def test_poly_divmod():
    field = field_construct(3)
    a = Poly(field, [1, 2, 0, 1, 1])
    b = Poly(field, [2, 1, 1])
    quotient, rest = divmod(a, b)
    assert quotient * b + rest == a
    assert rest.degree < b.degree


def test_irreducibility():
    f3 = field_construct(3)
    f5 = field_construct(5)
    f2 = field_construct(2)
    assert Poly(f3, [1, 0, 1]).is_irreducible()
    assert not Poly(f5, [1, 0, 1]).is_irreducible()
    assert not Poly(f2, [1, 0, 1]).is_irreducible()
    assert Poly(f2, [1, 1, 1]).is_irreducible()
    # monic irreducible quadratics over F_3: (9 - 3) / 2
    assert len(list(irreducible_polys(f3, 2))) == 3


def test_monic_enumeration_counts():
    field = build_test_field(4)
    for d in range(4):
        assert sum(len(batch) for batch in monic_batches(field, d, 7)) \
            == field.q ** d
        assert len(list(monic_polys(field, d))) == field.q ** d


def test_monic_batches_shape():
    field = build_test_field(9)
    batch = next(monic_batches(field, 2, 100))
    assert batch.shape == (81, 2, 2)
    assert batch.max() < field.p


def test_embedding_is_a_field_map():
    for small, big in ((4, 16), (3, 9), (2, 8)):
        e = embed(field_from_order(small), field_from_order(big))
        elements = list(e.small.elements())
        assert len({e(x) for x in elements}) == small
        assert e(e.small.one) == e.big.one
        for x in elements:
            for y in elements:
                assert e(x + y) == e(x) + e(y)
                assert e(x * y) == e(x) * e(y)
    with pytest.raises(ValueError):
        embed(field_from_order(4), field_from_order(8))
