"""
Finite fields F_{p^m}, polynomials over them and the enumeration helpers
used by the zeta routes.

Elements are stored in the power basis 1, t, ..., t^{m-1} of
F_p[t]/(modulus). The vectorized routes (series, zeta, vadic) use the same
basis with numpy arrays whose last axis has length m.
"""
import itertools
import operator
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from sympy import factorint, isprime

log = logging.getLogger(__name__)


# Coefficient lists over Z/p, lowest degree first.  Only used to pick and
# test moduli; field arithmetic proper lives on FieldElem / Poly.

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _mul(a, b, p):
    if not a or not b:
        return []
    c = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                c[i + j] = (c[i + j] + x * y) % p
    return _trim(c)


def _divmod(a, b, p):
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise ZeroDivisionError('division by zero polynomial')
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        q[shift] = c
        for j, y in enumerate(b):
            a[shift + j] = (a[shift + j] - c * y) % p
        a = _trim(a)
    return _trim(q), a


def _mod(a, b, p):
    return _divmod(a, b, p)[1]


def _powmod(a, n, modulus, p):
    result = [1]
    base = _mod(a, modulus, p)
    while n:
        if n & 1:
            result = _mod(_mul(result, base, p), modulus, p)
        base = _mod(_mul(base, base, p), modulus, p)
        n >>= 1
    return result


def _gcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _mod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [x * inv % p for x in a]
    return a


def _is_irreducible(a, p):
    """Ben-Or test over F_p: no factor of degree <= deg/2."""
    deg = len(_trim(a)) - 1
    if deg <= 0:
        return False
    b = [0, 1]
    for _ in range(deg // 2):
        b = _powmod(b, p, a, p)
        if _gcd(_sub(b, [0, 1], p), a, p) != [1]:
            return False
    return True


def _smallest_modulus(p, m):
    if m == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=m):
        if low[0] == 0:
            continue
        candidate = list(low) + [1]
        if _is_irreducible(candidate, p):
            return tuple(candidate)
    raise LookupError(f'no irreducible polynomial of degree {m} over F_{p}')


@dataclass(frozen=True)
class FieldSpec:
    """
    The field F_{p^m} = F_p[t]/(modulus).

    :param p: characteristic
    :param m: extension degree
    :param modulus: monic irreducible modulus, coefficients lowest first
    """
    p: int
    m: int
    modulus: tuple

    def __repr__(self):
        return f'FieldSpec(F_{self.q})'

    @property
    def q(self):
        return self.p ** self.m

    @cached_property
    def _modulus_low(self):
        return np.array(self.modulus[:self.m], dtype=np.int64)

    @cached_property
    def frobenius_matrix(self):
        """Row-vector matrix of x -> x^p on the power basis."""
        rows = []
        for i in range(self.m):
            img = _mod([0] * (i * self.p) + [1], self.modulus, self.p)
            rows.append(img + [0] * (self.m - len(img)))
        return np.array(rows, dtype=np.int64)

    @lru_cache(maxsize=None)
    def frobenius_power(self, k):
        """Matrix of x -> x^{p^k}."""
        mat = np.eye(self.m, dtype=np.int64)
        for _ in range(k % self.m):
            mat = (mat @ self.frobenius_matrix) % self.p
        return mat

    def __call__(self, value):
        if isinstance(value, FieldElem):
            if value.field != self:
                raise ValueError(f'{value!r} does not belong to {self!r}')
            return value
        if isinstance(value, (int, np.integer)):
            return FieldElem(self, (int(value) % self.p,)
                             + (0,) * (self.m - 1))
        return FieldElem(self, tuple(int(c) % self.p for c in value))

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def element(self, code):
        """Element with base-p digits of `code` as coefficients."""
        digits = []
        for _ in range(self.m):
            code, c = divmod(code, self.p)
            digits.append(c)
        return FieldElem(self, tuple(digits))

    def elements(self):
        for code in range(self.q):
            yield self.element(code)

    def units(self):
        for code in range(1, self.q):
            yield self.element(code)

    def vector(self, x):
        return np.array(self(x).coeffs, dtype=np.int64)

    def from_vector(self, v):
        return FieldElem(self, tuple(int(c) % self.p for c in v))

    def code_vectors(self, codes):
        """Coefficient vectors (..., m) of an integer array of codes."""
        codes = np.asarray(codes, dtype=np.int64)
        powers = self.p ** np.arange(self.m, dtype=np.int64)
        return (codes[..., None] // powers) % self.p

    def reduce_wide(self, wide):
        """Reduce (..., k) product coefficients, k <= 2m-1, to (..., m)."""
        wide = np.array(wide, dtype=np.int64)
        m = self.m
        for t in range(wide.shape[-1] - 1, m - 1, -1):
            c = wide[..., t] % self.p
            if c.any():
                wide[..., t - m:t] -= c[..., None] * self._modulus_low
        out = wide[..., :m] % self.p
        if out.shape[-1] < m:
            pad = [(0, 0)] * (out.ndim - 1) + [(0, m - out.shape[-1])]
            out = np.pad(out, pad)
        return out

    def mul_vectors(self, a, b):
        """Broadcast field product of coefficient vectors."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        m = self.m
        if m == 1:
            return (a * b) % self.p
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        wide = np.zeros(shape + (2 * m - 1,), dtype=np.int64)
        for i in range(m):
            for j in range(m):
                wide[..., i + j] += a[..., i] * b[..., j]
        return self.reduce_wide(wide)

    def frobenius_vectors(self, v, k=1):
        """x -> x^{p^k} applied to coefficient vectors."""
        if self.m == 1:
            return np.asarray(v, dtype=np.int64) % self.p
        return (np.asarray(v, dtype=np.int64) @ self.frobenius_power(k)) \
            % self.p


class FieldElem:
    __slots__ = ('field', 'coeffs')

    def __init__(self, field, coeffs):
        if len(coeffs) != field.m:
            raise ValueError(f'expected {field.m} coefficients, got '
                             f'{len(coeffs)}')
        self.field = field
        self.coeffs = tuple(int(c) % field.p for c in coeffs)

    def _coerce(self, other):
        if isinstance(other, int):
            return self.field(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        if other.field != self.field:
            raise ValueError(f'cannot mix {self.field!r} and {other.field!r}')
        return other

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.field, tuple(
            a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.field, tuple(
            a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        field = self.field
        p, m = field.p, field.m
        if m == 1:
            return FieldElem(field, (self.coeffs[0] * other.coeffs[0],))
        wide = [0] * (2 * m - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    wide[i + j] += a * b
        mod = field.modulus
        for t in range(2 * m - 2, m - 1, -1):
            c = wide[t] % p
            if c:
                for k in range(m):
                    wide[t - m + k] -= c * mod[k]
        return FieldElem(field, tuple(wide[:m]))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        if not self:
            raise ZeroDivisionError('inverse of zero in a finite field')
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    @property
    def code(self):
        return sum(c * self.field.p ** i for i, c in enumerate(self.coeffs))

    def in_prime_field(self):
        return not any(self.coeffs[1:])

    def __int__(self):
        if not self.in_prime_field():
            raise ValueError(f'{self!r} is not in the prime field')
        return self.coeffs[0]

    def __repr__(self):
        if self.field.m == 1:
            return f'{self.coeffs[0]}'
        terms = [f'{c}t^{i}' if i else f'{c}'
                 for i, c in enumerate(self.coeffs) if c]
        return '+'.join(terms) or '0'


def field_construct(p, m=1):
    """
    F_{p^m} with the lexicographically smallest monic irreducible modulus.

    :param p: prime characteristic, any integral type
    :param m: extension degree >= 1
    :rtype: FieldSpec
    """
    try:
        p, m = operator.index(p), operator.index(m)
    except TypeError:
        raise ValueError(f'F_{{{p}^{m}}} needs integral p and m') from None
    if not isprime(p):
        raise ValueError(f'{p} is not prime')
    if m < 1:
        raise ValueError(f'extension degree must be >= 1, got {m}')
    return _field_construct(p, m)


@lru_cache(maxsize=None)
def _field_construct(p, m):
    return FieldSpec(p, m, _smallest_modulus(p, m))


def field_from_order(q):
    """F_q for a prime power q."""
    factors = factorint(q)
    if q < 2 or len(factors) != 1:
        raise ValueError(f'{q} is not a prime power')
    (p, m), = factors.items()
    return field_construct(int(p), int(m))


def frobenius_iter(x, k):
    """x^{p^k}."""
    if k < 0:
        raise ValueError('Frobenius iterate needs k >= 0')
    field = x.field
    for _ in range(k % field.m):
        x = x ** field.p
    return x


def frobenius_orbit(x):
    orbit = [x]
    y = x ** x.field.p
    while y != x:
        orbit.append(y)
        y = y ** x.field.p
    return orbit


def element_degree(x):
    """Degree over F_p of the smallest subfield containing x."""
    return len(frobenius_orbit(x))


class Poly:
    """
    Polynomial over a FieldSpec, coefficients lowest degree first.

    The zero polynomial has no coefficients and degree -1.
    """
    __slots__ = ('field', 'coeffs')

    def __init__(self, field, coeffs):
        coeffs = [field(c) for c in coeffs]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.field = field
        self.coeffs = tuple(coeffs)

    @classmethod
    def monomial(cls, field, n, c=1):
        return cls(field, [0] * n + [c])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def is_monic(self):
        return bool(self.coeffs) and self.lead == self.field.one

    def coeff(self, n):
        if 0 <= n < len(self.coeffs):
            return self.coeffs[n]
        return self.field.zero

    def _check(self, other):
        if isinstance(other, (int, FieldElem)):
            other = Poly(self.field, [other])
        if other.field != self.field:
            raise ValueError('polynomials over different fields')
        return other

    def __add__(self, other):
        other = self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.field, [self.coeff(i) + other.coeff(i)
                                 for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        if not self.coeffs or not other.coeffs:
            return Poly(self.field, [])
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
        return Poly(self.field, out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = self._check(other)
        if not other.coeffs:
            raise ZeroDivisionError('division by zero polynomial')
        rem = list(self.coeffs)
        inv = other.lead.inverse()
        quo = [self.field.zero] * max(len(rem) - len(other.coeffs) + 1, 0)
        while len(rem) >= len(other.coeffs):
            c = rem[-1] * inv
            shift = len(rem) - len(other.coeffs)
            quo[shift] = c
            for j, b in enumerate(other.coeffs):
                rem[shift + j] = rem[shift + j] - c * b
            rem.pop()
            while rem and not rem[-1]:
                rem.pop()
        return Poly(self.field, quo), Poly(self.field, rem)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __pow__(self, n):
        result = Poly(self.field, [1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def powmod(self, n, modulus):
        result = Poly(self.field, [1])
        base = self % modulus
        while n:
            if n & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            n >>= 1
        return result

    def monic(self):
        if not self.coeffs:
            return self
        inv = self.lead.inverse()
        return Poly(self.field, [c * inv for c in self.coeffs])

    def gcd(self, other):
        a, b = self, self._check(other)
        while b.coeffs:
            a, b = b, a % b
        return a.monic()

    def __call__(self, x):
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def roots(self):
        return [x for x in self.field.elements() if not self(x)]

    def is_irreducible(self):
        """Ben-Or test with q-th powers."""
        if self.degree <= 0:
            return False
        theta = Poly.monomial(self.field, 1)
        b = theta
        for _ in range(self.degree // 2):
            b = b.powmod(self.field.q, self)
            if (b - theta).gcd(self).degree != 0:
                return False
        return True

    def __eq__(self, other):
        if isinstance(other, (int, FieldElem)):
            other = Poly(self.field, [other])
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return '0'
        terms = []
        for n in range(self.degree, -1, -1):
            c = self.coeffs[n]
            if not c:
                continue
            mono = '' if n == 0 else ('θ' if n == 1 else f'θ^{n}')
            if c == self.field.one and mono:
                terms.append(mono)
            else:
                terms.append(f'({c!r}){mono}' if self.field.m > 1
                             else f'{c!r}{mono}')
        return ' + '.join(terms)


def monic_polys(field, d):
    """All q^d monic polynomials of degree d."""
    if d < 0:
        raise ValueError('degree must be >= 0')
    elements = list(field.elements())
    for low in itertools.product(elements, repeat=d):
        yield Poly(field, list(low) + [field.one])


def irreducible_polys(field, d):
    for a in monic_polys(field, d):
        if a.is_irreducible():
            yield a


def monic_batches(field, d, chunk):
    """
    Coefficient arrays of the monics of degree d, streamed in chunks.

    Yields numpy arrays of shape (k, d, m) holding a_0..a_{d-1} (the monic
    leading coefficient is implicit), k <= chunk.
    """
    total = field.q ** d
    powers = field.q ** np.arange(d, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        codes = (idx[:, None] // powers) % field.q
        yield field.code_vectors(codes)


class Embedding:
    """
    The embedding F_{p^a} -> F_{p^{ab}} sending t to the smallest root of
    the small modulus in the big field.
    """
    def __init__(self, small, big):
        if small.p != big.p or big.m % small.m:
            raise ValueError(f'{small!r} does not embed in {big!r}')
        self.small = small
        self.big = big
        modulus = Poly(big, [big(c) for c in small.modulus])
        for x in big.elements():
            if not modulus(x):
                self.root = x
                break
        powers = [big.one]
        for _ in range(small.m - 1):
            powers.append(powers[-1] * self.root)
        self._powers = powers

    def __call__(self, x):
        x = self.small(x)
        acc = self.big.zero
        for c, power in zip(x.coeffs, self._powers):
            acc = acc + power * c
        return acc


def embed(small, big):
    return Embedding(small, big)
