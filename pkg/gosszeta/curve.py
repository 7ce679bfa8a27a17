"""
Goss zeta of A = F_p[E - infinity] for an ordinary elliptic curve
E: y^2 = x^3 + a4 x + a6, by its Euler product.

The uniformizer at infinity is pi = -x/y.  With w = -1/y the Weierstrass
equation becomes w = pi^3 + a4 pi w^2 + a6 w^3; writing w = pi^3 u,

    x = pi^-2 u^-1,    y = -pi^-3 u^-1.

A closed point of degree k has h-th power principal: a generator g with
divisor h sum_sigma [P^sigma] - hk [infinity] is assembled from line
functions, and <p> is the h-th root of the one-unit part of g.
"""
import logging
from dataclasses import dataclass
from functools import partial
from math import gcd
from multiprocessing import Pool

from sympy import isprime

from .config import Config
from .exceptions import BudgetError, ConsistencyError
from .ff import element_degree, field_construct, frobenius_iter
from .padic import PadicExponent
from .series import OneUnit, TruncSeries, as_one_unit, one_unit_pow
from .zeta import ZetaSeries, _exponent

log = logging.getLogger(__name__)

CHAINS = ('binary', 'linear')


@dataclass(frozen=True)
class EllipticHost:
    """
    y^2 = x^3 + a4 x + a6 over F_p with its rational point count h.

    :var trace: p + 1 - h
    :var ordinary: p does not divide the trace
    """
    p: int
    a4: int
    a6: int
    h: int
    trace: int
    ordinary: bool

    @property
    def field(self):
        return field_construct(self.p)

    def rhs(self, x):
        return x ** 3 + x * self.a4 + self.a6

    def contains(self, point):
        if point is None:
            return True
        x, y = point
        return y * y == self.rhs(x)

    def to_json(self):
        return {'p': self.p, 'a4': self.a4, 'a6': self.a6, 'h': self.h,
                'trace': self.trace, 'ordinary': self.ordinary}


def _affine_points(host, field):
    squares = {}
    for t in field.elements():
        squares.setdefault(t * t, []).append(t)
    for x in field.elements():
        for y in squares.get(host.rhs(x), ()):
            yield x, y


def host_construct(p, a4, a6):
    """
    :raises ValueError: p <= 3 or not prime, singular curve, or p | h
    :rtype: EllipticHost
    """
    if not isprime(p) or p <= 3:
        raise ValueError(f'need a prime p > 3, got {p}')
    a4, a6 = a4 % p, a6 % p
    if (4 * a4 ** 3 + 27 * a6 ** 2) % p == 0:
        raise ValueError(f'y^2 = x^3 + {a4}x + {a6} is singular mod {p}')
    field = field_construct(p)
    host = EllipticHost(p, a4, a6, 0, 0, False)
    h = 1 + sum(1 for _ in _affine_points(host, field))
    trace = p + 1 - h
    if h % p == 0:
        raise ValueError(f'h = {h} is divisible by p = {p}: inseparable '
                         f'root required, unsupported host')
    host = EllipticHost(p, a4, a6, h, trace, trace % p != 0)
    log.info('host over F_%d: h = %d, trace = %d, ordinary = %s', p, h,
             trace, host.ordinary)
    return host


def point_count(host, k):
    """#E(F_{p^k}), infinity included."""
    field = field_construct(host.p, k)
    return 1 + sum(1 for _ in _affine_points(host, field))


def _slope(host, a, b):
    """Slope of the chord (tangent) through a and b, None if vertical."""
    (x1, y1), (x2, y2) = a, b
    if x1 != x2:
        return (y2 - y1) / (x2 - x1)
    if y1 != y2 or not y1:
        return None
    return (x1 * x1 * 3 + host.a4) / (y1 * 2)


def add(host, a, b):
    if a is None:
        return b
    if b is None:
        return a
    lam = _slope(host, a, b)
    if lam is None:
        return None
    x = lam * lam - a[0] - b[0]
    return x, lam * (a[0] - x) - a[1]


def multiply(host, n, point):
    result, base = None, point
    while n:
        if n & 1:
            result = add(host, result, base)
        base = add(host, base, base)
        n >>= 1
    return result


def frobenius_point(point, k=1):
    if point is None:
        return None
    return frobenius_iter(point[0], k), frobenius_iter(point[1], k)


@dataclass(frozen=True)
class ClosedPoint:
    """
    A Frobenius orbit of affine points of exact degree k.

    :var representative: the orbit member with the smallest coordinate codes
    """
    degree: int
    representative: tuple
    orbit: tuple
    field: object

    def __repr__(self):
        x, y = self.representative
        return f'ClosedPoint(deg {self.degree}: ({x!r}, {y!r}))'


def closed_points_up_to(host, D):
    """All affine closed points of degree <= D, one per Frobenius orbit."""
    if D < 1:
        raise ValueError('D must be >= 1')
    out = []
    for k in range(1, D + 1):
        field = field_construct(host.p, k)
        seen = set()
        for point in _affine_points(host, field):
            x, y = point
            dx, dy = element_degree(x), element_degree(y)
            if dx * dy // gcd(dx, dy) != k or point in seen:
                continue
            orbit = [frobenius_point(point, j) for j in range(k)]
            seen.update(orbit)
            rep = min(orbit, key=lambda pt: (pt[0].code, pt[1].code))
            out.append(ClosedPoint(k, rep, tuple(orbit), field))
    return out


def weil_zeta_mod_p(host, D):
    """prod over closed points of (1 - x^k)^{-1} mod (x^{D+1}, p)."""
    coeffs = [1] + [0] * D
    for point in closed_points_up_to(host, D):
        k = point.degree
        for d in range(k, D + 1):
            coeffs[d] = (coeffs[d] + coeffs[d - k]) % host.p
    return coeffs


@dataclass(frozen=True)
class InfinityExpansion:
    """
    A function at infinity as lead * pi^order * unit, unit a one-unit.
    """
    unit: OneUnit
    order: int
    lead: int

    @property
    def precision(self):
        return self.unit.precision

    def coefficients(self):
        return [self.lead * c % self.unit.field.p
                for c in self.unit.codes()]


def _w_series(host, n):
    """w = -1/y in pi, to precision n."""
    field = host.field
    z = TruncSeries.monomial(field, n, 1)
    w = TruncSeries.monomial(field, n, 3)
    for _ in range(n + 1):
        nxt = z ** 3 + z * w * w * host.a4 + w * w * w * host.a6
        if nxt == w:
            return w
        w = nxt
    raise ConsistencyError('expansion of w at infinity did not converge')


def u_series(host, n):
    """u = w / pi^3, a one-unit mod pi^n."""
    guard = n + 3 + Config.INFINITY_GUARD
    w = _w_series(host, guard)
    return OneUnit(host.field, w.coeffs[3:3 + n])


def infinity_expansions(host, n):
    """(x, y) at infinity: x = pi^-2 u^-1, y = -pi^-3 u^-1."""
    inverse = as_one_unit(u_series(host, n).inverse())
    return (InfinityExpansion(inverse, -2, 1),
            InfinityExpansion(inverse, -3, -1 % host.p))


class _LineProduct:
    """
    A product of line functions kept as numer / denom * u^-uexp at pole
    order `order`, constants dropped.
    """
    __slots__ = ('numer', 'denom', 'uexp', 'order')

    def __init__(self, numer, denom, uexp=0, order=0):
        self.numer = numer
        self.denom = denom
        self.uexp = uexp
        self.order = order

    @classmethod
    def one(cls, field, n):
        return cls(TruncSeries.one(field, n), TruncSeries.one(field, n))

    def __mul__(self, other):
        return _LineProduct(self.numer * other.numer,
                            self.denom * other.denom,
                            self.uexp + other.uexp,
                            self.order + other.order)

    def square(self):
        return self * self

    def frobenius(self, k):
        return _LineProduct(self.numer.frobenius(k), self.denom.frobenius(k),
                            self.uexp, self.order)

    def unit(self, u):
        """The one-unit part, given u over the same field."""
        out = self.numer * self.denom.inverse()
        if self.uexp > 0:
            out = out * u.inverse() ** self.uexp
        elif self.uexp < 0:
            out = out * u ** (-self.uexp)
        return out


class _Lines:
    """Line and vertical factors over one extension field."""
    def __init__(self, host, field, n):
        self.host = host
        self.field = field
        self.n = n
        self.u = u_series(host, n).to_field(field)

    def vertical(self, c):
        """x - c = pi^-2 u^-1 (1 - c u pi^2)."""
        series = TruncSeries.one(self.field, self.n) - self.u.shift(2) * c
        return series, 1, -2

    def step(self, a, b):
        """l_{a,b} / v_{a+b} and the point a + b."""
        one = TruncSeries.one(self.field, self.n)
        total = add(self.host, a, b)
        if a is None or b is None:
            return _LineProduct(one, one), total
        lam = _slope(self.host, a, b)
        if lam is None:
            series, uexp, order = self.vertical(a[0])
            return _LineProduct(series, one, uexp, order), total
        nu = a[1] - lam * a[0]
        # y - lam x - nu = -pi^-3 u^-1 (1 + lam pi + nu u pi^3)
        line = one + TruncSeries.monomial(self.field, self.n, 1, lam) \
            + self.u.shift(3) * nu
        vert, _, _ = self.vertical(total[0])
        return _LineProduct(line, vert, 0, -1), total

    def accumulate(self, points):
        """Function with divisor sum [Q_i] - [sum Q_i] - (t-1)[infinity]."""
        f = _LineProduct.one(self.field, self.n)
        total = None
        for i, point in enumerate(points):
            if i == 0:
                total = point
                continue
            factor, total = self.step(total, point)
            f = f * factor
        return f, total

    def miller(self, m, point):
        """Double-and-add function with divisor m[P] - [mP] - (m-1)[inf]."""
        f = _LineProduct.one(self.field, self.n)
        acc = point
        for bit in bin(m)[3:]:
            factor, acc2 = self.step(acc, acc)
            f = f.square() * factor
            acc = acc2
            if bit == '1':
                factor, acc = self.step(acc, point)
                f = f * factor
        return f, acc


def principal_one_unit(host, prime, n, chain='binary'):
    """
    One-unit part of a generator g of prime^h, mod pi^n.

    :param prime: a ClosedPoint
    :param chain: 'binary' (Miller double-and-add, then a norm) or 'linear'
        (every conjugate added h times in sequence)
    :rtype: OneUnit over F_p
    """
    if chain not in CHAINS:
        raise ValueError(f'unknown chain {chain!r}, expected one of {CHAINS}')
    k, h = prime.degree, host.h
    lines = _Lines(host, prime.field, n)
    conjugates = [frobenius_point(prime.representative, j) for j in range(k)]
    if chain == 'linear':
        f, total = lines.accumulate([pt for pt in conjugates
                                     for _ in range(h)])
        if total is not None:
            raise ConsistencyError('conjugate points do not sum to zero')
    else:
        miller, multiple = lines.miller(h, prime.representative)
        f = miller
        for j in range(1, k):
            f = f * miller.frobenius(j)
        shifted = [frobenius_point(multiple, j) for j in range(k)]
        closing, total = lines.accumulate(shifted)
        if total is not None:
            raise ConsistencyError(f'h-multiples of {prime!r} do not sum '
                                   f'to zero')
        # the last chord of the closing product is vertical when total is O
        f = f * closing
    if f.order != -h * k:
        raise ConsistencyError(f'pole order {-f.order} at infinity, '
                               f'expected {h * k}')
    unit = f.unit(lines.u)
    if not unit.in_prime_field():
        raise ConsistencyError(f'one-unit of the generator for {prime!r} '
                               f'is not defined over F_{host.p}')
    return as_one_unit(unit.to_field(host.field))


def prime_character(host, prime, n, chain='binary'):
    """<prime> = <g>^{1/h} mod pi^n."""
    unit = principal_one_unit(host, prime, n, chain)
    root = PadicExponent.from_ratio(1, host.h, host.p)
    return one_unit_pow(unit, root)


def _character_power(host, n, y, chain, prime):
    return one_unit_pow(prime_character(host, prime, n, chain), y)


def zeta_curve(host, y, D, n, chain='binary', processes=None):
    """
    prod over closed points of (1 - x^deg <p>^y)^{-1} mod (x^{D+1}, pi^N).

    :rtype: ZetaSeries
    """
    if not host.ordinary:
        raise ValueError(f'host with trace {host.trace} is supersingular')
    y = _exponent(y)
    if y.p != host.p:
        raise ValueError(f'{y.p}-adic exponent on a characteristic '
                         f'{host.p} curve')
    if sum(host.p ** k for k in range(1, D + 1)) > Config.MONIC_BUDGET:
        raise BudgetError(f'too many closed points up to degree {D}')
    primes = closed_points_up_to(host, D)
    processes = Config.PROCESSES if processes is None else processes
    work = partial(_character_power, host, n, y, chain)
    if processes > 1:
        with Pool(processes) as pool:
            values = pool.map(work, primes)
    else:
        values = [work(prime) for prime in primes]
    field = host.field
    coeffs = [TruncSeries.one(field, n)] + \
        [TruncSeries.zero(field, n) for _ in range(D)]
    for prime, chi in zip(primes, values):
        k = prime.degree
        # multiply by sum_t x^{kt} chi^t
        out = list(coeffs)
        power = TruncSeries.one(field, n)
        for t in range(1, D // k + 1):
            power = power * chi
            for d in range(k * t, D + 1):
                out[d] = out[d] + coeffs[d - k * t] * power
        coeffs = out
    log.info('curve zeta over %d closed points up to degree %d', len(primes),
             D)
    return ZetaSeries(tuple(coeffs), n)
