"""
p-adic exponents y and the digit sequences read off their q-adic digits.

y = sum_{i=1..b} p^{i-1} y_i where y_i has q-adic digits y_{i,j} (q = p^b);
y_{i,j} is the base-p digit of y at position (i-1) + b*j.  For each
component the sequence d_i(n) equals p^{i-1} q^w on the n with
sum_{j<w} y_{i,j} < n <= sum_{j<=w} y_{i,j}, and y_i(m) is its partial sum.
"""
import logging
import re
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from sympy import isprime

from .config import Config
from .exceptions import PrecisionError

log = logging.getLogger(__name__)


def _step(num, den, p):
    inv = pow(den, -1, p)
    digit = num * inv % p
    return digit, (num - digit * den) // p


@lru_cache(maxsize=1024)
def _rational_digits(num, den, p, count):
    digits = []
    for _ in range(count):
        digit, num = _step(num, den, p)
        digits.append(digit)
    return tuple(digits)


@lru_cache(maxsize=1024)
def _rational_period(num, den, p):
    """(preperiod, period) of the base-p digits of num/den."""
    seen = {}
    k = 0
    while num not in seen:
        seen[num] = k
        _, num = _step(num, den, p)
        k += 1
    return seen[num], k - seen[num]


@dataclass(frozen=True)
class PadicExponent:
    """
    An element of Z_p given by base-p digits.

    Exponents built from integers or rationals a/c (p not dividing c) carry
    the exact value as `tag` and produce as many digits as asked for.
    Untagged exponents know only their `digits`.
    """
    p: int
    digits: tuple
    tag: Fraction = None

    def __post_init__(self):
        if any(not 0 <= d < self.p for d in self.digits):
            raise ValueError(f'digits must lie in [0, {self.p})')
        if self.tag is not None and self.tag.denominator % self.p == 0:
            raise ValueError(f'{self.tag} is not a {self.p}-adic integer')

    @classmethod
    def from_ratio(cls, a, c, p, precision=None):
        if not isprime(p):
            raise ValueError(f'{p} is not prime')
        tag = Fraction(a, c)
        if tag.denominator % p == 0:
            raise ValueError(f'{p} divides the denominator of {a}/{c}')
        precision = precision or Config.DEFAULT_DIGITS
        digits = _rational_digits(tag.numerator, tag.denominator, p,
                                  precision)
        return cls(p, digits, tag)

    @classmethod
    def from_int(cls, n, p, precision=None):
        return cls.from_ratio(n, 1, p, precision)

    @classmethod
    def from_digits(cls, p, digits):
        return cls(p, tuple(int(d) for d in digits))

    @classmethod
    def from_residue(cls, residue, p, precision):
        digits = []
        residue %= p ** precision
        for _ in range(precision):
            residue, d = divmod(residue, p)
            digits.append(d)
        return cls(p, tuple(digits))

    @property
    def precision(self):
        """Number of known digits, None when unbounded."""
        return None if self.tag is not None else len(self.digits)

    def digits_upto(self, count):
        if count <= len(self.digits):
            return self.digits[:count]
        if self.tag is None:
            raise PrecisionError(
                f'exponent has {len(self.digits)} digits, {count} required')
        return _rational_digits(self.tag.numerator, self.tag.denominator,
                                self.p, count)

    def digit(self, k):
        return self.digits_upto(k + 1)[k]

    def residue(self, k):
        """y mod p^k as a non-negative integer."""
        if self.tag is not None:
            return (self.tag.numerator
                    * pow(self.tag.denominator, -1, self.p ** k)) \
                % self.p ** k if k else 0
        return sum(d * self.p ** n for n, d in enumerate(self.digits_upto(k)))

    def period(self):
        """(preperiod, period) of the digit expansion of a tagged value."""
        if self.tag is None:
            raise ValueError('period needs an exact rational value')
        return _rational_period(self.tag.numerator, self.tag.denominator,
                                self.p)

    def is_zero(self):
        if self.tag is not None:
            return self.tag == 0
        return not any(self.digits)

    def congruent(self, other, k):
        return self.residue(k) == other.residue(k)

    def _coerce(self, other):
        if isinstance(other, int):
            return PadicExponent.from_int(other, self.p)
        if isinstance(other, Fraction):
            return PadicExponent.from_ratio(other.numerator,
                                            other.denominator, self.p)
        if not isinstance(other, PadicExponent):
            return NotImplemented
        if other.p != self.p:
            raise ValueError('exponents for different primes')
        return other

    def _combine(self, other, exact, modular):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.tag is not None and other.tag is not None:
            value = exact(self.tag, other.tag)
            return PadicExponent.from_ratio(value.numerator,
                                            value.denominator, self.p)
        precision = min(x.precision for x in (self, other)
                        if x.precision is not None)
        modulus = self.p ** precision
        value = modular(self.residue(precision), other.residue(precision))
        return PadicExponent.from_residue(value % modulus, self.p, precision)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        if self.tag is not None:
            return PadicExponent.from_ratio(-self.tag.numerator,
                                            self.tag.denominator, self.p)
        precision = len(self.digits)
        return PadicExponent.from_residue(-self.residue(precision), self.p,
                                          precision)

    def descriptor(self):
        """The CLI grammar string for this exponent."""
        if self.tag is not None:
            if self.tag.denominator == 1:
                return str(self.tag.numerator)
            return f'ratio:{self.tag.numerator}/{self.tag.denominator}'
        return f'digits:{self.p}:' + ','.join(str(d) for d in self.digits)

    def __repr__(self):
        return f'PadicExponent({self.descriptor()})'


_DIGITS = re.compile(r'^digits:(\d+):(\d+(?:,\d+)*)$')
_RATIO = re.compile(r'^ratio:(-?\d+)/(-?\d+)$')
_INT = re.compile(r'^-?\d+$')


def parse_exponent(descriptor, p, precision=None):
    """
    Parse the exponent grammar shared with the command line.

    :param descriptor: '<int>', 'digits:p:d0,d1,...' or 'ratio:a/c'
    :param p: the prime the exponent lives over
    :rtype: PadicExponent
    """
    text = descriptor.strip()
    if _INT.match(text):
        return PadicExponent.from_int(int(text), p, precision)
    match = _RATIO.match(text)
    if match:
        a, c = int(match.group(1)), int(match.group(2))
        if c == 0:
            raise ValueError('zero denominator in exponent')
        return PadicExponent.from_ratio(a, c, p, precision)
    match = _DIGITS.match(text)
    if match:
        base = int(match.group(1))
        if base != p:
            raise ValueError(f'digits given in base {base}, expected {p}')
        digits = [int(d) for d in match.group(2).split(',')]
        if any(d >= p for d in digits):
            raise ValueError(f'digit out of range for base {p}')
        return PadicExponent.from_digits(p, digits)
    raise ValueError(f'cannot parse exponent {descriptor!r}')


def random_exponent(p, precision, rng, low=0, high=None):
    """Untagged exponent with digits drawn uniformly from [low, high)."""
    high = p if high is None else high
    digits = rng.integers(low, high, size=precision)
    return PadicExponent.from_digits(p, digits)


class PartialSumTable:
    """
    Lookup tables for d_i(n) and y_i(m).

    The tables keep, per component, the cumulative digit sums and the
    weighted prefix sums, so each query is a bisection.

    :var certified: largest n (per component) with d_i(n) determined
    """
    def __init__(self, profile):
        self.profile = profile
        p, q = profile.p, profile.q
        self.cum = []
        self.weighted = []
        self.scale = []
        self.certified = []
        for i, comp in enumerate(profile.components, start=1):
            base = p ** (i - 1)
            scale = [base * q ** w for w in range(len(comp))]
            cum, weighted = [], [0]
            total = 0
            for digit, s in zip(comp, scale):
                total += digit
                cum.append(total)
                weighted.append(weighted[-1] + digit * s)
            self.cum.append(cum)
            self.weighted.append(weighted)
            self.scale.append(scale)
            self.certified.append(total)

    def _check(self, i, n):
        if n > self.certified[i - 1]:
            if self.profile.exhausted[i - 1]:
                raise PrecisionError(
                    f'digit sequence exhausted: component {i} ends at '
                    f'n = {self.certified[i - 1]}, asked for n = {n}')
            raise PrecisionError(
                f'insufficient digit precision: component {i} is certified '
                f'through n = {self.certified[i - 1]} with J = '
                f'{self.profile.J}, asked for n = {n}')

    def d(self, i, n):
        if n < 1:
            return 0
        self._check(i, n)
        w = bisect_left(self.cum[i - 1], n)
        return self.scale[i - 1][w]

    def y(self, i, m):
        if m <= 0:
            return 0
        self._check(i, m)
        cum = self.cum[i - 1]
        w = bisect_left(cum, m)
        before = cum[w - 1] if w else 0
        return self.weighted[i - 1][w] + (m - before) * self.scale[i - 1][w]

    def d_values(self, i, upto):
        return [self.d(i, n) for n in range(1, upto + 1)]

    def y_values(self, i, upto):
        return [self.y(i, m) for m in range(0, upto + 1)]


@dataclass(frozen=True)
class DigitProfile:
    """
    The q-adic digit arrays y_{i,j} of an exponent.

    :var components: b tuples of J digits, component i at index i-1
    :var q_full: no component is eventually zero
    :var caveat: q_full depends on digits beyond the precision
    :var exhausted: per component, all of its nonzero digits are known
        and the component is finite
    """
    p: int
    b: int
    components: tuple
    exponent: PadicExponent
    q_full: bool
    caveat: bool
    exhausted: tuple

    @property
    def q(self):
        return self.p ** self.b

    @property
    def r(self):
        return self.q

    @property
    def J(self):
        return len(self.components[0])

    @property
    def degenerate(self):
        return any(not any(comp) for comp in self.components)

    @cached_property
    def table(self):
        return PartialSumTable(self)

    @property
    def certified(self):
        return self.table.certified

    def d(self, i, n):
        return self.table.d(i, n)

    def y(self, i, m):
        return self.table.y(i, m)

    def recompose(self):
        """sum_i p^{i-1} sum_j y_{i,j} q^j, i.e. y mod p^{bJ}."""
        total = 0
        for i, comp in enumerate(self.components, start=1):
            for j, digit in enumerate(comp):
                total += digit * self.p ** (i - 1 + self.b * j)
        return total


def _component_fullness(y, p, b, J):
    """Per component: (eventually zero, caveat, fully known)."""
    out = []
    if y.tag is not None:
        start, period = y.period()
        window = y.digits_upto(start + b * period + b)
        for i in range(1, b + 1):
            tail = [window[k] for k in range(start, start + b * period)
                    if k % b == i - 1]
            eventually_zero = not any(tail)
            known = eventually_zero and b * J >= start
            out.append((eventually_zero, False, known))
        return out
    digits = y.digits_upto(b * J)
    for i in range(1, b + 1):
        comp = digits[i - 1::b]
        upper = comp[len(comp) // 2:]
        out.append((not any(upper), True, False))
    return out


def decompose(y, p, b, J):
    """
    Split y into b components of J q-adic digits each.

    :param y: the exponent
    :type y: PadicExponent
    :param p: prime, must match y
    :param b: number of components, q = p^b
    :param J: q-adic digits per component
    :rtype: DigitProfile
    """
    if y.p != p:
        raise ValueError(f'exponent is {y.p}-adic, expected {p}-adic')
    if b < 1 or J < 1:
        raise ValueError('b and J must be >= 1')
    try:
        digits = y.digits_upto(b * J)
    except PrecisionError:
        raise PrecisionError(
            f'exponent has {y.precision} base-{p} digits; decomposition '
            f'with b = {b}, J = {J} requires precision {b * J}') from None
    components = tuple(tuple(digits[i - 1::b][:J]) for i in range(1, b + 1))
    fullness = _component_fullness(y, p, b, J)
    q_full = not any(zero for zero, _, _ in fullness)
    caveat = any(cav for _, cav, _ in fullness)
    exhausted = tuple(known for _, _, known in fullness)
    return DigitProfile(p, b, components, y, q_full, caveat, exhausted)


def profile_for_depth(y, p, b, depth, start=8):
    """
    Smallest doubling of J whose digit tables certify n <= depth in every
    component, as far as the digits of y allow.
    """
    limit = None if y.precision is None else y.precision // b
    J = start if limit is None else min(start, limit)
    while True:
        profile = decompose(y, p, b, J)
        short = [i for i, c in enumerate(profile.certified) if c < depth]
        if not short or all(profile.exhausted[i] for i in short):
            return profile
        if limit is not None and J >= limit:
            return profile
        J = 2 * J if limit is None else min(2 * J, limit)
        log.debug('digit profile too shallow for depth %d, J -> %d',
                  depth, J)


def is_q_full(profile):
    """(q_full, caveat) for a DigitProfile."""
    return profile.q_full, profile.caveat


def d(profile, i, n):
    return profile.d(i, n)


def y_partial(profile, i, m):
    return profile.y(i, m)


def y_window(profile, i, m, k):
    return profile.y(i, m + k) - profile.y(i, m)
