"""
Goss zeta of A = F_q[theta] by direct sums over monic polynomials, and its
special values at negative integers.
"""
import logging
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .config import Config
from .exceptions import BudgetError, ConsistencyError
from .ff import Poly, field_from_order, monic_batches
from .padic import DigitProfile
from .series import OneUnit, TruncSeries, digits_needed, newton_polygon, \
    power_by_digits, unit_array

log = logging.getLogger(__name__)

TrivialZero = namedtuple('TrivialZero', 'parity order')


@dataclass(frozen=True)
class ZetaSeries:
    """
    x-coefficients S_0 = 1, S_1, ..., S_D of a zeta function mod pi^N.

    :var coeffs: tuple of TruncSeries
    """
    coeffs: tuple
    precision: int

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def valuations(self):
        return [s.valuation() for s in self.coeffs]

    def valuation_rows(self):
        return [(d, repr(v)) for d, v in enumerate(self.valuations())]

    def newton_polygon(self):
        return newton_polygon(enumerate(self.valuations()))

    def __getitem__(self, d):
        return self.coeffs[d]

    def __len__(self):
        return len(self.coeffs)


def one_unit_of_monic(a, n):
    """
    <a> = a / theta^deg(a) written in pi = 1/theta: 1 + a_{d-1} pi + ...

    :type a: Poly
    :param n: pi-adic precision
    :rtype: OneUnit
    """
    if not a.is_monic():
        raise ValueError(f'{a!r} is not monic')
    field = a.field
    out = np.zeros((n, field.m), dtype=np.int64)
    for t in range(min(a.degree + 1, n)):
        out[t] = field.vector(a.coeff(a.degree - t))
    return OneUnit(field, out)


def _exponent(y):
    return y.exponent if isinstance(y, DigitProfile) else y


def _monic_count(q, D):
    return sum(q ** d for d in range(D + 1))


def degree_sum(field, digits, d, n):
    """sum over monics a of degree d of <a>^y mod pi^n, as an (n, m) array."""
    total = np.zeros((n, field.m), dtype=np.int64)
    if d == 0:
        total[0, 0] = 1
        return total
    width = min(d, n - 1)
    for batch in monic_batches(field, d, Config.MONIC_CHUNK):
        units = unit_array(field, n, (len(batch),))
        if width:
            units[:, 1:width + 1] = batch[:, ::-1][:, :width]
        total += power_by_digits(field, units, digits).sum(axis=0)
        total %= field.p
    return total


def zeta_direct(y, field, D, n):
    """
    S_d(y) = sum over monic a of degree d of <a>^y, for d <= D.

    :param y: exponent or digit profile
    :param field: F_q
    :param D: x-degree
    :param n: pi-adic precision N
    :rtype: ZetaSeries
    """
    y = _exponent(y)
    if y.p != field.p:
        raise ValueError(f'{y.p}-adic exponent over F_{field.q}')
    count = _monic_count(field.q, D)
    if count > Config.MONIC_BUDGET:
        raise BudgetError(f'{count} monics up to degree {D} over F_{field.q} '
                          f'exceed the budget {Config.MONIC_BUDGET}')
    digits = y.digits_upto(digits_needed(field.p, n))
    coeffs = []
    for d in range(D + 1):
        coeffs.append(TruncSeries(field, degree_sum(field, digits, d, n)))
        log.debug('S_%d over F_%d: valuation %r', d, field.q,
                  coeffs[-1].valuation())
    return ZetaSeries(tuple(coeffs), n)


def _digit_sum(k, q):
    total = 0
    while k:
        k, r = divmod(k, q)
        total += r
    return total


def _power_sum(field, k, n):
    """sum over monics of degree n of a^k, as a Poly in theta."""
    length = k * n + 1
    digits = []
    rest = k
    while rest:
        rest, r = divmod(rest, field.p)
        digits.append(r)
    total = np.zeros((length, field.m), dtype=np.int64)
    for batch in monic_batches(field, n, Config.MONIC_CHUNK):
        polys = np.zeros((len(batch), length, field.m), dtype=np.int64)
        polys[:, :n] = batch
        polys[:, n, 0] = 1
        total += power_by_digits(field, polys, digits).sum(axis=0)
        total %= field.p
    return Poly(field, [field.from_vector(v) for v in total])


@dataclass(frozen=True)
class SpecialPolynomial:
    """
    P_j(x) = sum_n x^n sum_{deg a = n} a^{-j} over F_q[theta].

    :var coeffs: tuple of Poly in theta, lowest x-degree first
    """
    q: int
    j: int
    coeffs: tuple

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def evaluate(self, x):
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        return acc

    def root_order_at_one(self):
        """Multiplicity of x = 1 as a root, by repeated division by x - 1."""
        coeffs = list(self.coeffs)
        order = 0
        while coeffs:
            quotient = [None] * (len(coeffs) - 1)
            carry = None
            for i in range(len(coeffs) - 1, 0, -1):
                carry = coeffs[i] if carry is None else coeffs[i] + carry
                quotient[i - 1] = carry
            remainder = coeffs[0] if carry is None else coeffs[0] + carry
            if remainder:
                return order
            order += 1
            coeffs = quotient
        return order

    def __repr__(self):
        terms = []
        for n, c in enumerate(self.coeffs):
            if c:
                terms.append(f'({c!r})' + (f'x^{n}' if n else ''))
        return ' + '.join(terms or ['0'])


def special_value_poly(q, j):
    """
    The polynomial P_j for j < 0 over A = F_q[theta].

    Inner sums vanish once n exceeds l/(q-1), l the q-digit sum of -j; the
    sums are taken one step past that bound and two more are checked zero.

    :rtype: SpecialPolynomial
    """
    if j >= 0:
        raise ValueError(f'special values are taken at j < 0, got {j}')
    field = field_from_order(q)
    k = -j
    top = _digit_sum(k, q) // (q - 1) + 1
    if _monic_count(q, top + 2) > Config.MONIC_BUDGET:
        raise BudgetError(f'special value at j = {j} needs monics of degree '
                          f'{top + 2} over F_{q}')
    coeffs = [_power_sum(field, k, n) for n in range(top + 1)]
    for n in (top + 1, top + 2):
        extra = _power_sum(field, k, n)
        if extra:
            raise ConsistencyError(f'power sum of degree {n} for j = {j} '
                                   f'is nonzero: {extra!r}')
    while len(coeffs) > 1 and not coeffs[-1]:
        coeffs.pop()
    return SpecialPolynomial(q, j, tuple(coeffs))


def trivial_zero_order(q, j):
    """(parity, order of x = 1 as a root of P_j); even iff (q-1) | j."""
    parity = 'even' if j % (q - 1) == 0 else 'odd'
    return TrivialZero(parity, special_value_poly(q, j).root_order_at_one())
