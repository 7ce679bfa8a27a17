"""
Truncated power series over F_r modulo pi^N.

A series is a numpy array of shape (..., N, m): pi-degree on the second to
last axis, the F_p-coordinates of each coefficient on the last.  The array
kernels below accept arbitrary leading batch axes so that the zeta routes
can treat thousands of one-units at once.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import PrecisionError

log = logging.getLogger(__name__)


def unit_array(field, n, shape=()):
    out = np.zeros(tuple(shape) + (n, field.m), dtype=np.int64)
    out[..., 0, 0] = 1
    return out


def convolve(field, a, b):
    """Truncated product of two (batched) series arrays."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n = min(a.shape[-2], b.shape[-2])
    m = field.m
    if a.ndim == 2 and b.ndim == 2:
        wide = np.zeros((n, 2 * m - 1), dtype=np.int64)
        for i in range(m):
            ai = a[:n, i]
            if not ai.any():
                continue
            for j in range(m):
                bj = b[:n, j]
                if bj.any():
                    wide[:, i + j] += np.convolve(ai, bj)[:n]
        return field.reduce_wide(wide)
    shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    wide = np.zeros(shape + (n, 2 * m - 1), dtype=np.int64)
    for s in range(n):
        head = a[..., s, :]
        if not head.any():
            continue
        tail = b[..., :n - s, :]
        for i in range(m):
            hi = head[..., i]
            if not hi.any():
                continue
            for j in range(m):
                wide[..., s:, i + j] += hi[..., None] * tail[..., j]
    return field.reduce_wide(wide)


def scale(field, a, c):
    """Multiply every coefficient of `a` by the coefficient vector `c`."""
    c = np.asarray(c, dtype=np.int64)
    return field.mul_vectors(a, c[..., None, :])


def frobenius_stretch(field, a, k):
    """
    s(pi) -> s(pi)^{p^k}: coefficient j moves to pi^{j p^k} and is raised
    to the p^k-th power.
    """
    a = np.asarray(a, dtype=np.int64)
    if k == 0:
        return a % field.p
    n = a.shape[-2]
    step = field.p ** k
    count = len(range(0, n, step))
    out = np.zeros_like(a)
    out[..., ::step, :] = field.frobenius_vectors(a[..., :count, :], k)
    return out


def invert(field, a):
    """Inverse of a single series array with unit constant term."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[-2]
    c0 = field.from_vector(a[0])
    if not c0:
        raise ValueError('series with zero constant term is not invertible')
    b = np.zeros_like(a)
    b[0] = field.vector(c0.inverse())
    known = 1
    while known < n:
        known = min(2 * known, n)
        correction = (-convolve(field, a, b)) % field.p
        correction[0, 0] = (correction[0, 0] + 2) % field.p
        b = convolve(field, b, correction)
    return b


def digits_needed(p, n):
    """Smallest K with p^K >= n."""
    k = 0
    while p ** k < n:
        k += 1
    return k


def power_by_digits(field, u, digits):
    """
    u^y for (batched) one-units u and the base-p digits of y.

    Uses u^y = prod_k stretch(u^{y_k}, k); digits at positions with
    p^k >= N contribute nothing.
    """
    u = np.asarray(u, dtype=np.int64)
    n = u.shape[-2]
    p = field.p
    digits = list(digits)[:digits_needed(p, n)]
    top = max(digits, default=0)
    powers = [unit_array(field, n, u.shape[:-2]), u % p]
    for _ in range(2, top + 1):
        powers.append(convolve(field, powers[-1], u))
    result = None
    for k, c in enumerate(digits):
        if not c:
            continue
        term = frobenius_stretch(field, powers[c], k)
        result = term if result is None else convolve(field, result, term)
    if result is None:
        return unit_array(field, n, u.shape[:-2])
    return result


class TruncSeries:
    """
    An element of F_r[pi]/(pi^N).

    :param field: the coefficient field F_r
    :param coeffs: array of shape (N, m), or a list of N ints / FieldElems
    """
    __slots__ = ('field', 'coeffs')

    def __init__(self, field, coeffs):
        arr = coeffs
        if not isinstance(arr, np.ndarray):
            arr = np.array([field.vector(c) for c in coeffs],
                           dtype=np.int64).reshape(-1, field.m)
        arr = np.asarray(arr, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != field.m:
            raise ValueError(f'coefficient array must have shape (N, '
                             f'{field.m}), got {arr.shape}')
        if arr.shape[0] < 1:
            raise ValueError('precision must be at least 1')
        self.field = field
        self.coeffs = arr % field.p

    @classmethod
    def zero(cls, field, n):
        return cls(field, np.zeros((n, field.m), dtype=np.int64))

    @classmethod
    def one(cls, field, n):
        return cls(field, unit_array(field, n))

    @classmethod
    def monomial(cls, field, n, k, c=1):
        out = np.zeros((n, field.m), dtype=np.int64)
        if k < n:
            out[k] = field.vector(c)
        return cls(field, out)

    @property
    def precision(self):
        return self.coeffs.shape[0]

    def _check(self, other):
        if isinstance(other, TruncSeries):
            if other.field != self.field:
                raise ValueError('series over different fields')
            if other.precision != self.precision:
                raise ValueError(
                    f'precision mismatch {self.precision} vs '
                    f'{other.precision}; truncate explicitly')
            return other
        return TruncSeries.monomial(self.field, self.precision, 0, other)

    def __add__(self, other):
        other = self._check(other)
        return TruncSeries(self.field, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.field, -self.coeffs)

    def __sub__(self, other):
        other = self._check(other)
        return TruncSeries(self.field, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return TruncSeries(self.field, scale(
                self.field, self.coeffs, self.field.vector(other)))
        other = self._check(other)
        return TruncSeries(self.field,
                           convolve(self.field, self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def inverse(self):
        return TruncSeries(self.field, invert(self.field, self.coeffs))

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = TruncSeries.one(self.field, self.precision)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k):
        """Multiply by pi^k, k >= 0."""
        out = np.zeros_like(self.coeffs)
        if k < self.precision:
            out[k:] = self.coeffs[:self.precision - k]
        return TruncSeries(self.field, out)

    def truncate(self, n):
        if n > self.precision:
            raise PrecisionError(
                f'cannot raise precision from {self.precision} to {n}')
        return TruncSeries(self.field, self.coeffs[:n])

    def valuation(self):
        """Index of the first nonzero coefficient, or AtLeast(N)."""
        nonzero = np.flatnonzero(self.coeffs.any(axis=1))
        if not len(nonzero):
            return AtLeast(self.precision)
        return int(nonzero[0])

    def coefficient(self, k):
        return self.field.from_vector(self.coeffs[k])

    def is_zero(self):
        return not self.coeffs.any()

    def in_prime_field(self):
        return not self.coeffs[:, 1:].any()

    def to_field(self, field):
        """Re-read prime-field coefficients over another field of char p."""
        if field.p != self.field.p or not self.in_prime_field():
            raise ValueError('only prime-field coefficients can be moved')
        out = np.zeros((self.precision, field.m), dtype=np.int64)
        out[:, 0] = self.coeffs[:, 0]
        return TruncSeries(field, out)

    def frobenius(self, k=1):
        """Apply x -> x^{p^k} to every coefficient."""
        return TruncSeries(self.field,
                           self.field.frobenius_vectors(self.coeffs, k))

    def codes(self):
        powers = self.field.p ** np.arange(self.field.m, dtype=np.int64)
        return [int(c) for c in self.coeffs @ powers]

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.field == other.field
                and self.precision == other.precision
                and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.field, self.coeffs.tobytes()))

    def __repr__(self):
        terms = []
        for k in range(self.precision):
            c = self.coefficient(k)
            if c:
                terms.append(f'{c!r}' if k == 0 else f'({c!r})pi^{k}')
        return ' + '.join(terms or ['0']) + f' + O(pi^{self.precision})'


class OneUnit(TruncSeries):
    """A TruncSeries with constant term 1."""
    __slots__ = ()

    def __init__(self, field, coeffs):
        super().__init__(field, coeffs)
        if self.coeffs[0, 0] != 1 or self.coeffs[0, 1:].any():
            raise ValueError('a one-unit must have constant term 1')


def as_one_unit(series):
    return OneUnit(series.field, series.coeffs)


def one_unit_pow(u, y, n=None):
    """
    u^y mod pi^n for a one-unit u and a p-adic exponent y.

    :param u: the one-unit
    :type u: OneUnit
    :param y: exponent with at least ceil(log_p n) known digits
    :type y: PadicExponent
    :param n: precision, defaults to that of u
    :rtype: OneUnit
    """
    field = u.field
    if y.p != field.p:
        raise ValueError(f'{y.p}-adic exponent on a characteristic '
                         f'{field.p} series')
    n = n or u.precision
    u = u.truncate(n)
    k = digits_needed(field.p, n)
    try:
        digits = y.digits_upto(k)
    except PrecisionError:
        raise PrecisionError(f'one-unit power mod pi^{n} needs {k} digits '
                             f'of the exponent') from None
    return OneUnit(field, power_by_digits(field, u.coeffs, digits))


@dataclass(frozen=True)
class AtLeast:
    """A valuation known only to be >= bound."""
    bound: int

    def __repr__(self):
        return f'>={self.bound}'


def known(v):
    return not isinstance(v, AtLeast)


@dataclass(frozen=True)
class NewtonPolygon:
    """
    Slopes with multiplicities, strictly increasing.

    :var slopes: tuple of (Fraction, multiplicity)
    :var certified_through: x-degree up to which unseen coefficients cannot
        change the polygon
    """
    slopes: tuple
    certified_through: int

    @classmethod
    def from_slopes(cls, values, certified_through=None):
        values = [Fraction(v) for v in values]
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError('slopes must be nondecreasing')
        grouped = []
        for v in values:
            if grouped and grouped[-1][0] == v:
                grouped[-1][1] += 1
            else:
                grouped.append([v, 1])
        if certified_through is None:
            certified_through = len(values)
        return cls(tuple((s, k) for s, k in grouped), certified_through)

    @property
    def degree(self):
        return sum(k for _, k in self.slopes)

    def expanded(self):
        return [s for s, k in self.slopes for _ in range(k)]

    def truncated(self, x):
        return NewtonPolygon.from_slopes(self.expanded()[:x],
                                         min(x, self.certified_through))

    def certified(self):
        return self.truncated(self.certified_through)

    def agrees_with(self, other, through=None):
        if through is None:
            through = min(self.certified_through, other.certified_through)
        return self.expanded()[:through] == other.expanded()[:through]

    def to_json(self):
        return {'slopes': [[s.numerator, s.denominator, k]
                           for s, k in self.slopes],
                'certified_through': self.certified_through}

    @classmethod
    def from_json(cls, data):
        return cls(tuple((Fraction(num, den), k)
                         for num, den, k in data['slopes']),
                   data['certified_through'])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_value(hull, x):
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        if x0 <= x <= x1:
            return Fraction(y0) + Fraction(y1 - y0, x1 - x0) * (x - x0)
    return None


def newton_polygon(points):
    """
    Lower convex hull of (x-degree, valuation) points.

    Valuations are ints or AtLeast(N).  A hull vertex is certified when
    every unknown point left of it lies on or above the hull and every
    unknown point right of it lies strictly above the line through the
    segment ending at the vertex.

    :param points: iterable of (x, valuation) starting with (0, 0)
    :rtype: NewtonPolygon
    """
    pts = sorted(points, key=lambda pt: pt[0])
    if not pts:
        raise ValueError('no points for a Newton polygon')
    if pts[0][0] != 0 or pts[0][1] != 0:
        raise ValueError('Newton polygon points must start at (0, 0)')
    hull = []
    for pt in ((x, v) for x, v in pts if known(v)):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    unknown = [(x, v.bound) for x, v in pts if not known(v)]
    slopes = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slopes.append((Fraction(y1 - y0, x1 - x0), x1 - x0))
    certified = 0
    for t in range(1, len(hull)):
        xt, yt = hull[t]
        s = Fraction(hull[t][1] - hull[t - 1][1], xt - hull[t - 1][0])
        ok = all(bound >= _hull_value(hull, x)
                 for x, bound in unknown if x < xt)
        ok = ok and all(bound > yt + s * (x - xt)
                        for x, bound in unknown if x > xt)
        if ok:
            certified = xt
    return NewtonPolygon(tuple(slopes), certified)
