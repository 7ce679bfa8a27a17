"""
v-adic zeta of A = F_q[theta] at a finite place v = (f).

O_v / pi_v^N is realized as F_q[theta]/(f^N); elements are coefficient
arrays (..., d_v N, m) reduced by long division by the monic f^N.
"""
import logging
from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .config import Config
from .exceptions import BudgetError, ConsistencyError
from .ff import Poly, monic_batches
from .minperm import slopes_for_exponent
from .series import AtLeast, NewtonPolygon, TruncSeries, digits_needed
from .zeta import ZetaSeries, _exponent, _monic_count, zeta_direct

log = logging.getLogger(__name__)

ComparisonReport = namedtuple('ComparisonReport',
                              'verdict first_mismatch lhs rhs')


def _full_product(field, a, b):
    """Untruncated product of batched polynomial arrays."""
    la, lb = a.shape[-2], b.shape[-2]
    m = field.m
    shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    wide = np.zeros(shape + (la + lb - 1, 2 * m - 1), dtype=np.int64)
    for s in range(la):
        head = a[..., s, :]
        if not head.any():
            continue
        for i in range(m):
            hi = head[..., i]
            if not hi.any():
                continue
            for j in range(m):
                wide[..., s:s + lb, i + j] += hi[..., None] * b[..., :, j]
    return field.reduce_wide(wide)


class LocalRing:
    """
    F_q[theta]/(f^N) for a monic irreducible f of degree d_v.

    :param f: the place, a monic irreducible Poly over F_q
    :param precision: N
    """
    def __init__(self, f, precision):
        if not f.is_monic() or f.degree < 1:
            raise ValueError(f'{f!r} is not a monic polynomial of degree '
                             f'>= 1')
        if not f.is_irreducible():
            raise ValueError(f'{f!r} is reducible')
        if precision < 1:
            raise ValueError('precision must be >= 1')
        self.field = f.field
        self.f = f
        self.precision = precision
        self.dv = f.degree
        self.length = self.dv * precision
        modulus = f ** precision
        self._low = np.array([self.field.vector(modulus.coeff(i))
                              for i in range(self.length)], dtype=np.int64)

    @property
    def r_v(self):
        return self.field.q ** self.dv

    @cached_property
    def residue_ring(self):
        return self if self.precision == 1 else LocalRing(self.f, 1)

    def __repr__(self):
        return f'LocalRing(F_{self.field.q}[theta]/({self.f!r})^' \
               f'{self.precision})'

    def reduce(self, a):
        a = np.array(a, dtype=np.int64) % self.field.p
        top, L = a.shape[-2], self.length
        if top < L:
            pad = [(0, 0)] * (a.ndim - 2) + [(0, L - top), (0, 0)]
            return np.pad(a, pad)
        for t in range(top - 1, L - 1, -1):
            c = a[..., t, :]
            if c.any():
                a[..., t - L:t, :] -= self.field.mul_vectors(
                    c[..., None, :], self._low)
                a[..., t - L:t, :] %= self.field.p
        return a[..., :L, :] % self.field.p

    def mul(self, a, b):
        return self.reduce(_full_product(self.field, a, b))

    def one(self, shape=()):
        out = np.zeros(tuple(shape) + (self.length, self.field.m),
                       dtype=np.int64)
        out[..., 0, 0] = 1
        return out

    def pow_int(self, a, n):
        result = self.one(a.shape[:-2])
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def frobenius(self, a, k):
        """a -> a^{p^k}."""
        if k == 0:
            return a % self.field.p
        step = self.field.p ** k
        shape = a.shape[:-2] + ((self.length - 1) * step + 1, self.field.m)
        out = np.zeros(shape, dtype=np.int64)
        out[..., ::step, :] = self.field.frobenius_vectors(a, k)
        return self.reduce(out)

    def power_digits(self, u, digits):
        """u^y for one-units u and base-p digits of y."""
        p = self.field.p
        digits = list(digits)[:digits_needed(p, self.precision)]
        top = max(digits, default=0)
        powers = [self.one(u.shape[:-2]), u]
        for _ in range(2, top + 1):
            powers.append(self.mul(powers[-1], u))
        result = self.one(u.shape[:-2])
        for k, c in enumerate(digits):
            if c:
                result = self.mul(result, self.frobenius(powers[c], k))
        return result

    def is_unit(self, a):
        return self.residue_ring.reduce(a).any(axis=(-2, -1))

    def teichmuller_parts(self, a):
        """(omega, u) for a batch of units."""
        k = self.dv * self.field.m
        omega = a
        for _ in range(self.precision + 2):
            nxt = self.frobenius(omega, k)
            if np.array_equal(nxt, omega):
                break
            omega = nxt
        else:
            raise ConsistencyError('Teichmueller iteration did not reach a '
                                   'fixed point')
        inverse = self.pow_int(omega, self.r_v - 2)
        return omega, self.mul(a, inverse)

    def element(self, value):
        if isinstance(value, LocalElem):
            return value
        if isinstance(value, Poly):
            if value.field != self.field:
                raise ValueError('polynomial over a different field')
            arr = np.array([self.field.vector(c) for c in value.coeffs],
                           dtype=np.int64).reshape(-1, self.field.m)
            if not len(arr):
                arr = np.zeros((1, self.field.m), dtype=np.int64)
            return LocalElem(self, self.reduce(arr))
        if isinstance(value, np.ndarray):
            return LocalElem(self, self.reduce(value))
        return self.element(Poly(self.field, [value]))


class LocalElem:
    """An element of F_q[theta]/(f^N)."""
    __slots__ = ('ring', 'coeffs')

    def __init__(self, ring, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if coeffs.shape != (ring.length, ring.field.m):
            raise ValueError(f'expected shape {(ring.length, ring.field.m)}, '
                             f'got {coeffs.shape}')
        self.ring = ring
        self.coeffs = coeffs % ring.field.p

    def _other(self, other):
        other = self.ring.element(other)
        if other.ring is not self.ring and (
                other.ring.f != self.ring.f
                or other.ring.precision != self.ring.precision):
            raise ValueError('elements of different local rings')
        return other

    def __add__(self, other):
        return LocalElem(self.ring, self.coeffs + self._other(other).coeffs)

    __radd__ = __add__

    def __neg__(self):
        return LocalElem(self.ring, -self.coeffs)

    def __sub__(self, other):
        return LocalElem(self.ring, self.coeffs - self._other(other).coeffs)

    def __mul__(self, other):
        return LocalElem(self.ring, self.ring.mul(
            self.coeffs, self._other(other).coeffs))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        return LocalElem(self.ring, self.ring.pow_int(self.coeffs, n))

    def inverse(self):
        if not self.is_unit():
            raise ValueError(f'{self!r} is not a unit')
        order = (self.ring.r_v - 1) * self.ring.r_v ** (self.ring.precision
                                                        - 1)
        return self ** (order - 1)

    def is_unit(self):
        return bool(self.ring.is_unit(self.coeffs))

    def is_zero(self):
        return not self.coeffs.any()

    def to_poly(self):
        field = self.ring.field
        return Poly(field, [field.from_vector(v) for v in self.coeffs])

    def valuation(self):
        """f-adic valuation, AtLeast(N) for zero."""
        if self.is_zero():
            return AtLeast(self.ring.precision)
        a = self.to_poly()
        v = 0
        while True:
            quotient, rest = divmod(a, self.ring.f)
            if rest:
                return v
            a = quotient
            v += 1

    def __eq__(self, other):
        if not isinstance(other, LocalElem):
            return NotImplemented
        return (self.ring.f == other.ring.f
                and self.ring.precision == other.ring.precision
                and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.ring.f, self.ring.precision,
                     self.coeffs.tobytes()))

    def __repr__(self):
        return f'{self.to_poly()!r} mod ({self.ring.f!r})^' \
               f'{self.ring.precision}'


@dataclass(frozen=True)
class TeichDecomp:
    """a = omega * unit with omega^{r_v} = omega and unit = 1 mod f."""
    omega: LocalElem
    unit: LocalElem


def teichmuller(a):
    """
    Split a unit of O_v/pi_v^N into its root of unity and one-unit parts.

    :type a: LocalElem
    :rtype: TeichDecomp
    """
    if not a.is_unit():
        raise ValueError(f'{a!r} is not a unit at {a.ring.f!r}')
    omega, unit = a.ring.teichmuller_parts(a.coeffs)
    return TeichDecomp(LocalElem(a.ring, omega), LocalElem(a.ring, unit))


def zeta_vadic(f, y, D, n):
    """
    sum over monics a coprime to f of x^{deg a} u(a)^y, mod (x^{D+1}, f^N).

    :param f: the place, monic irreducible over F_q
    :param y: exponent or digit profile
    :rtype: ZetaSeries with LocalElem coefficients
    """
    ring = LocalRing(f, n)
    field = ring.field
    y = _exponent(y)
    if y.p != field.p:
        raise ValueError(f'{y.p}-adic exponent over F_{field.q}')
    count = _monic_count(field.q, D)
    if count > Config.MONIC_BUDGET:
        raise BudgetError(f'{count} monics up to degree {D} over F_{field.q} '
                          f'exceed the budget {Config.MONIC_BUDGET}')
    digits = y.digits_upto(digits_needed(field.p, n))
    coeffs = [LocalElem(ring, ring.one())]
    for d in range(1, D + 1):
        total = np.zeros((ring.length, field.m), dtype=np.int64)
        for batch in monic_batches(field, d, Config.MONIC_CHUNK):
            polys = np.zeros((len(batch), d + 1, field.m), dtype=np.int64)
            polys[:, :d] = batch
            polys[:, d, 0] = 1
            units = ring.is_unit(polys)
            if not units.any():
                continue
            _, u = ring.teichmuller_parts(ring.reduce(polys[units]))
            total += ring.power_digits(u, digits).sum(axis=0)
            total %= field.p
        coeffs.append(LocalElem(ring, total))
        log.debug('v-adic S_%d at %r: valuation %r', d, f,
                  coeffs[-1].valuation())
    return ZetaSeries(tuple(coeffs), n)


def _place_slopes(f, y, count, scale):
    field = f.field
    dv = f.degree
    y = _exponent(y)
    slopes = [Fraction(0)] * dv
    if count:
        nu, _ = slopes_for_exponent(y, field.p, field.m * dv, count)
        slopes += [Fraction(v, dv * scale(nu.r))
                   for v in nu.nu for _ in range(dv)]
    return NewtonPolygon.from_slopes(slopes)


def vadic_predicted_slopes(f, y, count):
    """
    d_v zero slopes, then alpha_i / d_v with multiplicity d_v, where
    alpha_i = nu_i / (r_v - 1) and the nu_i are computed for r_v = q^{d_v}
    (b' = b d_v components).

    These are the real parts; `vadic_real_parts` puts a computed polygon on
    the same footing.

    :rtype: NewtonPolygon
    """
    return _place_slopes(f, y, count, lambda r: r - 1)


def vadic_predicted_valuation_slopes(f, y, count):
    """As `vadic_predicted_slopes` but in pi_v-valuation units, nu_i / d_v."""
    return _place_slopes(f, y, count, lambda r: 1)


def vadic_real_parts(polygon, f):
    """Divide the pi_v-valuation slopes of a v-adic polygon by r_v - 1."""
    r_v = f.field.q ** f.degree
    return NewtonPolygon.from_slopes(
        [s / (r_v - 1) for s in polygon.expanded()],
        polygon.certified_through)


def taylor_shift(elem, c):
    """F_q[theta]/(theta - c)^N -> F_q[[pi_v]]/pi_v^N, theta = c + pi_v."""
    ring = elem.ring
    if ring.dv != 1 or ring.f.coeff(0) != -ring.field(c):
        raise ValueError('Taylor shift needs the place theta - c')
    field = ring.field
    shift = Poly(field, [c, 1])
    acc = Poly(field, [])
    for coeff in reversed(elem.to_poly().coeffs):
        acc = acc * shift + coeff
    return TruncSeries(field, [acc.coeff(i) for i in range(ring.precision)])


def comparison_check_dv1(c, y, D, n, field):
    """
    Compare zeta_{A,v} at v = (theta - c) with zeta_{B,pi_v}(x) (1 - x),
    B = F_q[1/(theta - c)].

    :param c: element of F_q
    :param field: F_q
    :rtype: ComparisonReport
    """
    f = Poly(field, [-field(c), 1])
    lhs = [taylor_shift(s, c) for s in zeta_vadic(f, y, D, n).coeffs]
    direct = zeta_direct(y, field, D, n).coeffs
    rhs = [direct[0]] + [direct[d] - direct[d - 1] for d in range(1, D + 1)]
    mismatch = next((d for d in range(D + 1) if lhs[d] != rhs[d]), None)
    if mismatch is not None:
        log.warning('comparison at theta - %r fails at x^%d', c, mismatch)
    return ComparisonReport(mismatch is None, mismatch,
                            [repr(s.valuation()) for s in lhs],
                            [repr(s.valuation()) for s in rhs])
