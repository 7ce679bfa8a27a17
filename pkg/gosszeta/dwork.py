"""
Dwork matrices for the affine line and their Fredholm determinants.

For the component i of y the Frobenius series is

    beta_i = prod_j (1 - pi^{q^j p^{i-1}} theta)^{y_{i,j}}
           = sum_n a_{i,n} theta^n

over F_p[pi]/pi^N, and the block-cyclic matrix on J_1 = Z/b x Z_{>0} has
entries Psi_{(i,m1),(i-1,m2)} = a_{i, p m1 - m2}.  det(1 - x Psi) is
computed with Berkowitz's division-free characteristic polynomial, since
F_p[pi]/pi^N has zero divisors.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

from .config import Config
from .exceptions import BudgetError, ConsistencyError, PrecisionError
from .ff import field_construct
from .padic import decompose
from .series import AtLeast, TruncSeries, convolve, digits_needed, \
    newton_polygon, unit_array

log = logging.getLogger(__name__)


def _theta_degree(profile, i, n):
    """Largest n with y_i(n) < N, or the full digit sum of a finite
    component."""
    top = 0
    reach = profile.p ** (i - 1) * profile.q ** profile.J
    while True:
        if top + 1 > profile.certified[i - 1]:
            # the next step of d_i comes from a digit of weight >= reach
            if profile.exhausted[i - 1] or reach >= n:
                return top
            raise PrecisionError(
                f'beta_{i} mod pi^{n} needs d_{i} beyond n = '
                f'{profile.certified[i - 1]}; raise the digit precision')
        if profile.y(i, top + 1) >= n:
            return top
        top += 1


def profile_for_precision(y, p, b, n):
    """Digit profile holding every q-adic digit of weight below pi^n."""
    return decompose(y, p, b, max(digits_needed(p ** b, n), 1))


@dataclass(frozen=True)
class BetaSeries:
    """
    beta_i as a table of pi-adic coefficients.

    :var i: component index, 1..b
    :var table: array (n_max+1, N) over Z/p; row n is a_{i,n}
    """
    i: int
    p: int
    table: np.ndarray

    @property
    def n_max(self):
        return self.table.shape[0] - 1

    @property
    def precision(self):
        return self.table.shape[1]

    def coefficient(self, n):
        field = field_construct(self.p)
        if n < 0 or n > self.n_max:
            return TruncSeries.zero(field, self.precision)
        return TruncSeries(field, self.table[n][:, None])

    def valuation(self, n):
        return self.coefficient(n).valuation()


def build_beta(profile, i, n):
    """
    Expand beta_i mod pi^n.

    :param profile: digit profile of y
    :param i: component, 1..b
    :param n: pi-adic precision N
    :rtype: BetaSeries
    """
    p, q = profile.p, profile.q
    n_max = _theta_degree(profile, i, n)
    table = np.zeros((n_max + 1, n), dtype=np.int64)
    table[0, 0] = 1
    for j, digit in enumerate(profile.components[i - 1]):
        e = p ** (i - 1) * q ** j
        if e >= n:
            break
        if not digit:
            continue
        new = table.copy()
        for t in range(1, digit + 1):
            if e * t >= n or t > n_max:
                break
            coef = comb(digit, t) * (-1) ** t % p
            if coef:
                new[t:, e * t:] += coef * table[:n_max + 1 - t, :n - e * t]
        table = new % p
    return BetaSeries(i, p, table)


@dataclass(frozen=True, order=True)
class IndexJ1:
    """An element (i, m) of Z/b x Z_{>0}, with i written as 1..b."""
    i: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f'index needs m >= 1, got {self.m}')


def previous_block(i, b):
    return b if i == 1 else i - 1


class PsiMatrix:
    """
    The block-cyclic Dwork matrix of a digit profile.

    Entries are produced lazily from the beta series; only truncations
    |k| <= M are ever materialized.

    :param profile: the DigitProfile of y
    :param precision: pi-adic precision N
    """
    def __init__(self, profile, precision):
        self.profile = profile
        self.precision = precision
        self.field = field_construct(profile.p)

    @cached_property
    def betas(self):
        return {i: build_beta(self.profile, i, self.precision)
                for i in range(1, self.profile.b + 1)}

    def entry(self, k1, k2):
        b = self.profile.b
        if k2.i != previous_block(k1.i, b):
            return TruncSeries.zero(self.field, self.precision)
        return self.betas[k1.i].coefficient(self.profile.p * k1.m - k2.m)

    def indices(self, bound):
        return [IndexJ1(i, m) for i in range(1, self.profile.b + 1)
                for m in range(1, bound + 1)]

    def truncation(self, bound):
        """Array (bM, bM, N, 1) of the entries with |k1|, |k2| <= M."""
        b, p, n = self.profile.b, self.profile.p, self.precision
        dim = b * bound
        if dim > Config.FREDHOLM_MAX_DIMENSION:
            raise BudgetError(f'truncation of dimension {dim} exceeds '
                              f'{Config.FREDHOLM_MAX_DIMENSION}')
        out = np.zeros((dim, dim, n, 1), dtype=np.int64)
        m = np.arange(1, bound + 1)
        idx = p * m[:, None] - m[None, :]
        for i in range(1, b + 1):
            beta = self.betas[i]
            valid = (idx >= 0) & (idx <= beta.n_max)
            block = np.zeros((bound, bound, n), dtype=np.int64)
            block[valid] = beta.table[idx[valid]]
            rows = slice((i - 1) * bound, i * bound)
            j = previous_block(i, b)
            cols = slice((j - 1) * bound, j * bound)
            out[rows, cols, :, 0] = block
        return out


def psi_entry(profile, k1, k2, n):
    return PsiMatrix(profile, n).entry(k1, k2)


@dataclass(frozen=True)
class CharSeries:
    """
    Coefficients c_0 = 1, c_1, ... of det(1 - x M).

    :var truncation: the bound M of the truncation that produced them
    """
    coeffs: tuple
    precision: int
    truncation: int = None

    def __len__(self):
        return len(self.coeffs)

    def valuations(self):
        return [c.valuation() for c in self.coeffs]

    def valuation_rows(self):
        """(n, v(c_n)) pairs, '>=N' for coefficients that vanish mod pi^N."""
        return [(n, v if not isinstance(v, AtLeast) else repr(v))
                for n, v in enumerate(self.valuations())]


def _matvec(field, A, v):
    """Matrix-vector product over F_r[pi]/pi^N, arrays (s,s,N,m), (s,N,m)."""
    s, _, n, m = A.shape
    wide = np.zeros((s, n, 2 * m - 1), dtype=np.float64)
    Af = A.astype(np.float64)
    vf = v.astype(np.float64)
    for t in range(n):
        At = Af[:, :, t, :]
        if not At.any():
            continue
        for i in range(m):
            for j in range(m):
                wide[:, t:, i + j] += At[:, :, i] @ vf[:, :n - t, j]
        if t % 64 == 63:
            wide %= field.p
    return field.reduce_wide(np.rint(wide).astype(np.int64))


def _dot(field, r, v):
    return convolve(field, r, v).sum(axis=0) % field.p


def _berkowitz(field, A, count):
    """First count+1 coefficients of det(1 - xA) for A of shape
    (d, d, N, m)."""
    d = A.shape[0]
    n = A.shape[2]
    one = unit_array(field, n)
    zero = np.zeros_like(one)
    vec = [one]
    for r in range(d - 1, -1, -1):
        size = d - r
        top = min(count, size)
        a = A[r, r]
        row = A[r, r + 1:]
        col = A[r + 1:, r]
        sub = A[r + 1:, r + 1:]
        diags = [one, (-a) % field.p]
        cur = col
        for t in range(2, top + 1):
            diags.append((-_dot(field, row, cur)) % field.p)
            if t < top:
                cur = _matvec(field, sub, cur)
        new = []
        for k in range(top + 1):
            acc = zero
            for t in range(min(k, len(diags) - 1) + 1):
                if k - t < len(vec):
                    acc = acc + convolve(field, diags[t], vec[k - t])
            new.append(acc % field.p)
        vec = new
    vec = vec + [zero] * (count + 1 - len(vec))
    return vec[:count + 1]


def _as_array(matrix, field):
    if isinstance(matrix, np.ndarray):
        return matrix
    rows = [[entry.coeffs for entry in row] for row in matrix]
    return np.array(rows, dtype=np.int64)


def fredholm_coeffs(matrix, n_max, field=None):
    """
    c_0..c_{n_max} of det(1 - x M) by Berkowitz's algorithm.

    :param matrix: square list of lists of TruncSeries, or an array
        (d, d, N, m) together with `field`
    :param n_max: number of coefficients beyond c_0
    :rtype: CharSeries
    """
    if not isinstance(matrix, np.ndarray):
        field = matrix[0][0].field
    A = _as_array(matrix, field)
    d = A.shape[0]
    if A.shape[1] != d:
        raise ValueError('Fredholm determinant of a non-square matrix')
    if d > Config.FREDHOLM_MAX_DIMENSION:
        raise BudgetError(f'matrix dimension {d} exceeds '
                          f'{Config.FREDHOLM_MAX_DIMENSION}')
    coeffs = _berkowitz(field, A % field.p, n_max)
    return CharSeries(tuple(TruncSeries(field, c) for c in coeffs),
                      A.shape[2])


def _permutation_sign(perm):
    sign = 1
    for a, b in itertools.combinations(range(len(perm)), 2):
        if perm[a] > perm[b]:
            sign = -sign
    return sign


def fredholm_coeffs_leibniz(matrix, n_max):
    """c_n = (-1)^n sum over principal minors, straight from the
    definition.  Exponential; an oracle for small matrices."""
    d = len(matrix)
    field = matrix[0][0].field
    n = matrix[0][0].precision
    coeffs = [TruncSeries.one(field, n)]
    for size in range(1, n_max + 1):
        total = TruncSeries.zero(field, n)
        for support in itertools.combinations(range(d), size):
            for perm in itertools.permutations(support):
                term = TruncSeries.one(field, n)
                for row, col in zip(support, perm):
                    term = term * matrix[row][col]
                    if term.is_zero():
                        break
                if _permutation_sign([support.index(c) for c in perm]) < 0:
                    term = -term
                total = total + term
        coeffs.append(total if size % 2 == 0 else -total)
    return CharSeries(tuple(coeffs), n)


def char_series_stabilized(profile, n_max, n, max_doublings=None):
    """
    det(1 - x Psi) up to x^{b n_max}, stabilized over truncations.

    Truncations start at M = max(8, p n_max) and double until two
    consecutive ones agree on every coefficient.

    :rtype: CharSeries
    """
    max_doublings = Config.STABILIZE_MAX_DOUBLINGS \
        if max_doublings is None else max_doublings
    count = profile.b * n_max
    psi = PsiMatrix(profile, n)
    bound = max(Config.STABILIZE_MIN_TRUNCATION, profile.p * n_max)
    previous = None
    for _ in range(max_doublings + 1):
        try:
            A = psi.truncation(bound)
        except BudgetError as err:
            err.partial = previous
            raise
        current = fredholm_coeffs(A, count, psi.field)
        log.debug('Fredholm coefficients at truncation %d: %s', bound,
                  current.valuations())
        if previous is not None and previous.coeffs == current.coeffs:
            return CharSeries(current.coeffs, n, bound // 2)
        previous = current
        bound *= 2
    raise BudgetError(f'characteristic series did not stabilize within '
                      f'{max_doublings} doublings', partial=previous)


def zeta_np_from_charseries(cs, b):
    """
    The zeta polygon from det(1 - x Psi): the points (n, v(c_{bn})).

    :raises ConsistencyError: a coefficient c_n with b not dividing n is
        nonzero
    """
    for k, c in enumerate(cs.coeffs):
        if k % b and not c.is_zero():
            raise ConsistencyError(
                f'c_{k} is nonzero but {b} does not divide {k}')
    points = [(k // b, c.valuation())
              for k, c in enumerate(cs.coeffs) if k % b == 0]
    return newton_polygon(points)


def permutation_valuation(psi, sigma):
    """
    Valuation of prod_k Psi_{k, sigma(k)} for an EnrichedPermutation with
    h = 1, or None when some factor is identically zero.

    A product that vanishes mod pi^N has valuation AtLeast(N).

    :type psi: PsiMatrix
    """
    profile = psi.profile
    p, b = profile.p, profile.b
    product = TruncSeries.one(psi.field, psi.precision)
    for (i, _, m), (i2, _, m2) in sigma.pairs:
        index = p * m - m2
        if i2 != previous_block(i, b) or index < 0:
            return None
        if index > profile.certified[i - 1] and profile.exhausted[i - 1]:
            return None
        product = product * psi.entry(IndexJ1(i, m), IndexJ1(i2, m2))
    return product.valuation()
