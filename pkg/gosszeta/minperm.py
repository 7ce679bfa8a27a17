"""
Minimal rotational permutations of the Dwork matrix and the slopes they
predict.

A b-cycle with coordinates (m_1, ..., m_b) is the permutation
k_b -> k_{b-1} -> ... -> k_1 -> k_b with |k_i| = m_i in block i, so its
R-value is sum_i y_i(p m_i - m_{i-1}) with m_0 = m_b.
"""
import itertools
import logging
from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .config import Config
from .exceptions import BudgetError, ConsistencyError, PrecisionError
from .padic import profile_for_depth
from .series import NewtonPolygon

log = logging.getLogger(__name__)

# index used by the p-bound recursion: n_{c-j} = min(p n_{c-j+1}, m_{c-j})
PMAP_INDEX = 'corrected'

BruteForceResult = namedtuple('BruteForceResult', 'r_min minimizers count')


def _previous(i, b):
    return b if i == 1 else i - 1


@dataclass(frozen=True, order=True)
class BCycle:
    """Coordinates (m_1, ..., m_b) of a rotational b-cycle."""
    coords: tuple

    def __post_init__(self):
        coords = tuple(int(m) for m in self.coords)
        if not coords:
            raise ValueError('a b-cycle needs at least one coordinate')
        if any(m < 1 for m in coords):
            raise ValueError(f'cycle coordinates must be >= 1: {coords}')
        object.__setattr__(self, 'coords', coords)

    @property
    def b(self):
        return len(self.coords)

    def coord(self, i):
        """m_i for i in Z/b, written 1..b."""
        return self.coords[(i - 1) % self.b]

    def below(self, other):
        """Componentwise <=."""
        return all(a <= c for a, c in zip(self.coords, other.coords))

    def disjoint(self, other):
        return all(a != c for a, c in zip(self.coords, other.coords))

    def box(self, shift=0):
        return tuple(m + shift for m in self.coords)

    def pairs(self):
        b = self.b
        return [((i, 0, self.coord(i)),
                 (_previous(i, b), 0, self.coord(_previous(i, b))))
                for i in range(1, b + 1)]

    def __repr__(self):
        return '(' + ','.join(str(m) for m in self.coords) + ')'


class EnrichedPermutation:
    """
    A bijection of a finite support of (i, j, m) triples.

    :param pairs: iterable of (k, sigma(k))
    :param b: number of blocks
    """
    __slots__ = ('pairs', 'b')

    def __init__(self, pairs, b):
        pairs = tuple(sorted((tuple(k), tuple(v)) for k, v in pairs))
        domain = [k for k, _ in pairs]
        image = [v for _, v in pairs]
        if len(set(domain)) != len(domain) or set(domain) != set(image):
            raise ValueError('not a bijection of its support')
        self.pairs = pairs
        self.b = b

    @classmethod
    def from_cycles(cls, cycles, b=None):
        cycles = list(cycles)
        if b is None:
            if not cycles:
                raise ValueError('b is needed for the empty permutation')
            b = cycles[0].b
        return cls([pair for c in cycles for pair in c.pairs()], b)

    @classmethod
    def identity(cls, n, b=1):
        return cls.from_cycles([BCycle((m,) * b) for m in range(1, n + 1)],
                               b)

    @property
    def mapping(self):
        return dict(self.pairs)

    @property
    def support(self):
        return [k for k, _ in self.pairs]

    @property
    def size(self):
        return len(self.pairs) // self.b

    def is_rotational(self):
        return all(v[0] == _previous(k[0], self.b) for k, v in self.pairs)

    def cycles(self):
        """Cycle decomposition as tuples of support elements."""
        mapping = self.mapping
        seen = set()
        out = []
        for start in self.support:
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = mapping[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = mapping[nxt]
            out.append(tuple(cycle))
        return out

    def is_decomposable(self):
        """Rotational and a product of b-cycles."""
        return self.is_rotational() and all(
            len(c) == self.b for c in self.cycles())

    def b_cycles(self):
        if not self.is_decomposable():
            raise ValueError('permutation is not a product of b-cycles')
        out = []
        for cycle in self.cycles():
            coords = [0] * self.b
            for i, _, m in cycle:
                coords[i - 1] = m
            out.append(BCycle(tuple(coords)))
        return sorted(out)

    def is_lexicographical(self):
        if not self.is_decomposable():
            return False
        cycles = self.b_cycles()
        return all(all(a < c for a, c in zip(x.coords, y.coords))
                   for x, y in zip(cycles, cycles[1:]))

    def is_p_bounded(self, p):
        return all(v[2] <= p * k[2] for k, v in self.pairs)

    def __eq__(self, other):
        if not isinstance(other, EnrichedPermutation):
            return NotImplemented
        return self.pairs == other.pairs and self.b == other.b

    def __hash__(self):
        return hash((self.pairs, self.b))

    def __repr__(self):
        if self.is_decomposable():
            return f'EnrichedPermutation({self.b_cycles()})'
        return f'EnrichedPermutation({list(self.pairs)})'


@dataclass(frozen=True)
class SlopeSequence:
    """
    nu_1 < nu_2 < ..., each divisible by r - 1.

    :var complete: False when digit exhaustion cut the sequence short
    """
    nu: tuple
    r: int
    complete: bool = True

    def __post_init__(self):
        for a, c in zip(self.nu, self.nu[1:]):
            if c <= a:
                raise ConsistencyError(
                    f'slopes not strictly increasing: {a} then {c}')
        for v in self.nu:
            if v % (self.r - 1):
                raise ConsistencyError(f'{v} is not divisible by '
                                       f'r - 1 = {self.r - 1}')

    @property
    def alpha(self):
        return [v // (self.r - 1) for v in self.nu]

    def __len__(self):
        return len(self.nu)


def _term(profile, i, a, strict):
    """y_i(a) with non-positive arguments read as 0; None past the end of
    an exhausted component unless strict."""
    if a <= 0:
        return 0
    if not strict and a > profile.certified[i - 1] \
            and profile.exhausted[i - 1]:
        return None
    return profile.y(i, a)


def _cycle_value(profile, coords, strict=False):
    p, b = profile.p, profile.b
    total = 0
    for i in range(1, b + 1):
        value = _term(profile, i, p * coords[i - 1] - coords[i - 2], strict)
        if value is None:
            return None
        total += value
    return total


def r_value(profile, sigma):
    """
    R-value of a rotational permutation, a BCycle or a list of BCycles.

    :raises PrecisionError: a needed partial sum is past the digit tables
    """
    if isinstance(sigma, BCycle):
        if sigma.b != profile.b:
            raise ValueError(f'{sigma.b}-cycle for a profile with '
                             f'b = {profile.b}')
        return _cycle_value(profile, sigma.coords, strict=True)
    if not isinstance(sigma, EnrichedPermutation):
        return sum(r_value(profile, c) for c in sigma)
    if not sigma.is_rotational():
        raise ValueError('R-value needs a rotational permutation')
    return sum(_term(profile, k[0], profile.p * k[2] - v[2], True)
               for k, v in sigma.pairs)


def is_p_bounded(sigma, p):
    if isinstance(sigma, BCycle):
        b = sigma.b
        return all(sigma.coord(_previous(i, b)) <= p * sigma.coord(i)
                   for i in range(1, b + 1))
    return sigma.is_p_bounded(p)


def p_bound_map(sigma, p):
    """
    The largest p-bounded cycle below sigma.

    Starting from the first minimal coordinate c, n_c = m_c and
    n_{c-j} = min(p n_{c-j+1}, m_{c-j}).

    :type sigma: BCycle
    :rtype: BCycle
    """
    coords = sigma.coords
    b = len(coords)
    c = coords.index(min(coords))
    out = list(coords)
    for j in range(1, b):
        k = (c - j) % b
        out[k] = min(p * out[(k + 1) % b], coords[k])
    return BCycle(tuple(out))


def _a_max(profile, i, bound):
    """Largest a with y_i(a) <= bound."""
    top = profile.certified[i - 1]
    if profile.y(i, top) <= bound:
        if profile.exhausted[i - 1]:
            return top
        raise PrecisionError(
            f'y_{i} is still <= {bound} at the last certified n = {top}; '
            f'raise the digit precision')
    lo, hi = 0, top
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if profile.y(i, mid) <= bound:
            lo = mid
        else:
            hi = mid
    return lo


def sigma_star(profile, n, box):
    """
    The R-minimal p-bounded b-cycle with n <= m_i <= box_i.

    :param box: per-block upper bounds, or one int for every block
    :rtype: BCycle
    :raises ConsistencyError: two cycles share the minimal R-value
    """
    p, b = profile.p, profile.b
    if isinstance(box, int):
        box = (box,) * b
    box = tuple(box)
    if len(box) != b:
        raise ValueError(f'box has {len(box)} bounds, expected {b}')
    if n < 1 or any(m < n for m in box):
        raise ValueError(f'empty search box {box} for n = {n}')
    upper = _cycle_value(profile, (n,) * b)
    if upper is None:
        a_max = [profile.certified[i - 1] if profile.exhausted[i - 1]
                 else p * box[i - 1] for i in range(1, b + 1)]
    else:
        a_max = [_a_max(profile, i, upper) for i in range(1, b + 1)]
    total = sum(a_max) // (p - 1)
    ranges = [range(n, min(box[i], total - (b - 1) * n) + 1)
              for i in range(b)]
    best, best_value, tie = None, None, False
    for coords in itertools.product(*ranges):
        if sum(coords) > total:
            continue
        indices = [p * coords[i] - coords[i - 1] for i in range(b)]
        if any(a < 0 or a > a_max[i] for i, a in enumerate(indices)):
            continue
        value = _cycle_value(profile, coords)
        if value is None:
            continue
        if best_value is None or value < best_value:
            best, best_value, tie = coords, value, False
        elif value == best_value:
            tie = True
    if best is None:
        raise PrecisionError(f'digit sequence exhausted: no finite-valuation '
                             f'{b}-cycle of size {n} in box {box}')
    if tie:
        raise ConsistencyError(f'two {b}-cycles in box {box} share the '
                               f'minimal R-value {best_value}')
    return BCycle(best)


class ChainSolver:
    """
    Memoized Sigma_n^*(box) = Sigma_{n-1}^*(sigma_n^*(box) - 1) sigma_n^*(box).

    :param profile: a DigitProfile
    """
    def __init__(self, profile):
        self.profile = profile
        self._stars = {}
        self._chains = {}

    def sigma_star(self, n, box):
        key = (n, box)
        if key not in self._stars:
            self._stars[key] = sigma_star(self.profile, n, box)
        return self._stars[key]

    def chain(self, n, box):
        if n == 0:
            return ()
        key = (n, box)
        if key not in self._chains:
            star = self.sigma_star(n, box)
            self._chains[key] = self.chain(n - 1, star.box(-1)) + (star,)
        return self._chains[key]

    def stable_chain(self, n, max_doublings=None):
        """Sigma_n over a box doubled until the chain stops changing."""
        if n == 0:
            return ()
        max_doublings = Config.BOX_MAX_DOUBLINGS \
            if max_doublings is None else max_doublings
        bound = self.profile.p * (n + 2)
        current = self.chain(n, (bound,) * self.profile.b)
        for _ in range(max_doublings):
            bound *= 2
            wider = self.chain(n, (bound,) * self.profile.b)
            if wider == current:
                return current
            log.info('chain of size %d moved when the box grew to %d',
                     n, bound)
            current = wider
        raise BudgetError(f'chain of size {n} not stable after '
                          f'{max_doublings} box doublings', partial=current)


def sigma_chain(profile, n_max, solver=None):
    """
    The disjoint b-cycles of Sigma_{n_max}, in lexicographic order.

    :rtype: list of BCycle
    """
    if profile.degenerate or n_max == 0:
        return []
    solver = solver or ChainSolver(profile)
    return list(solver.stable_chain(n_max))


def nu_sequence(profile, n_max):
    """
    nu_n = R(Sigma_n) - R(Sigma_{n-1}) for n <= n_max.

    A profile that is not q-full gives the prefix computable before its
    digits run out.

    :rtype: SlopeSequence
    """
    r = profile.q
    if profile.degenerate:
        return SlopeSequence((), r, complete=False)
    solver = ChainSolver(profile)
    nu = []
    previous = 0
    for n in range(1, n_max + 1):
        try:
            chain = solver.stable_chain(n)
        except PrecisionError:
            if profile.q_full:
                raise
            log.info('digits exhausted after %d slopes', len(nu))
            return SlopeSequence(tuple(nu), r, complete=False)
        value = r_value(profile, chain)
        nu.append(value - previous)
        previous = value
    return SlopeSequence(tuple(nu), r)


def prime_field_slopes(profile, count):
    """nu_n = y(n(p-1)) for b = 1."""
    if profile.b != 1:
        raise ValueError('the closed form holds for b = 1 only')
    return [profile.y(1, n * (profile.p - 1)) for n in range(1, count + 1)]


def slopes_for_exponent(y, p, b, count, max_doublings=None):
    """
    nu_1..nu_count for an exponent, deepening the digit profile until the
    chain search stops running out of digits.

    :return: (SlopeSequence, DigitProfile)
    """
    max_doublings = Config.BOX_MAX_DOUBLINGS \
        if max_doublings is None else max_doublings
    depth = 2 * p * (count + 2)
    for _ in range(max_doublings + 1):
        profile = profile_for_depth(y, p, b, depth)
        try:
            return nu_sequence(profile, count), profile
        except PrecisionError:
            at_limit = y.precision is not None \
                and profile.J >= y.precision // b
            if at_limit or all(profile.exhausted):
                raise
        depth *= 2
        log.debug('deepening digit profile to depth %d', depth)
    raise PrecisionError(f'digit profile of {y!r} still too shallow at '
                         f'depth {depth}')


def predict_real_parts(profile, g, d, count):
    """
    g-1+d zeros, then every nu_i with multiplicity d.

    :rtype: list of int
    """
    if g < 0 or d < 1:
        raise ValueError('need g >= 0 and d >= 1')
    zeros = [0] * max(g - 1 + d, 0)
    nu = nu_sequence(profile, count).nu if count else ()
    return zeros + [v for v in nu for _ in range(d)]


def predicted_polygon(profile, g, d, count):
    slopes = predict_real_parts(profile, g, d, count)
    return NewtonPolygon.from_slopes([Fraction(s) for s in slopes])


def _cost_table(profile, i, rows, cols, cap):
    p = profile.p
    top = profile.certified[i - 1]
    saturated = not profile.exhausted[i - 1] and profile.y(i, top) + 1 >= cap
    table = np.full((rows + 1, cols + 1), cap, dtype=np.int64)
    for k in range(1, rows + 1):
        for m in range(1, cols + 1):
            if saturated and p * k - m > top:
                continue
            value = _term(profile, i, p * k - m, False)
            if value is not None:
                table[k, m] = min(value, cap)
    return table


def _pair_table(table, rows, cols, perms, chunk=64):
    """min over bijections rows[s] -> cols[t] of the summed costs, and how
    many bijections attain it."""
    permuted = cols[:, perms]
    best = np.empty((len(rows), len(cols)), dtype=np.int64)
    count = np.empty_like(best)
    for start in range(0, len(rows), chunk):
        block = rows[start:start + chunk]
        values = table[block[:, None, None, :], permuted[None]].sum(axis=-1)
        low = values.min(axis=-1)
        best[start:start + chunk] = low
        count[start:start + chunk] = (values == low[..., None]).sum(axis=-1)
    return best, count


def _bijections(table, row, col, perms, target):
    for perm in perms:
        if table[row, col[perm]].sum() == target:
            yield perm


def brute_force_min(profile, n, box, budget=None):
    """
    Minimal R-value over every rotational permutation of size n whose
    support lies in the box.

    Each block i contributes an n-subset S_i of {1..box_i}; the pair tables
    hold the best bijection S_i -> S_{i-1}, and the cyclic product of the
    tables is minimized in the (min, +) semiring.

    :return: (r_min, minimizers up to MINIMIZER_LIMIT, exact count)
    :rtype: BruteForceResult
    """
    p, b = profile.p, profile.b
    if isinstance(box, int):
        box = (box,) * b
    box = tuple(box)
    if n == 0:
        return BruteForceResult(0, [EnrichedPermutation((), b)], 1)
    if any(m < n for m in box):
        raise ValueError(f'box {box} holds no permutation of size {n}')
    budget = Config.ENUMERATION_BUDGET if budget is None else budget
    sizes = [comb(m, n) for m in box]
    n_perms = factorial(n)
    if b == 1:
        work = sizes[0] * n_perms
    else:
        work = n_perms * sum(sizes[i] * sizes[i - 1] for i in range(b))
        work += sum(sizes[0] * sizes[i] * sizes[i - 1] for i in range(2, b))
    if work > budget:
        raise BudgetError(f'enumeration of size {n} in box {box} needs '
                          f'{work} steps, budget {budget}')

    diagonal = [_cycle_value(profile, (m,) * b) for m in range(1, n + 1)]
    cap = 2 ** 40
    if None not in diagonal:
        if sum(diagonal) >= cap:
            raise BudgetError(f'R-values of size {n} exceed the int64 cost '
                              f'tables')
        cap = sum(diagonal) + 1
    subsets = [np.array(list(itertools.combinations(range(1, m + 1), n)),
                        dtype=np.int64) for m in box]
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    tables = [_cost_table(profile, i, box[i - 1], box[_previous(i, b) - 1],
                          cap) for i in range(1, b + 1)]

    if b == 1:
        rows = subsets[0]
        values = tables[0][rows[:, None, :], rows[:, perms]].sum(axis=-1)
        low = values.min(axis=-1)
        r_min = int(low.min())
        if r_min >= cap:
            return BruteForceResult(None, [], 0)
        count = int((values[low == r_min] == r_min).sum())
        minimizers = []
        for s in np.flatnonzero(low == r_min):
            for perm in _bijections(tables[0], rows[s], rows[s], perms,
                                    r_min):
                minimizers.append(_from_supports(
                    [rows[s]], [perm], b))
                if len(minimizers) >= Config.MINIMIZER_LIMIT:
                    break
            if len(minimizers) >= Config.MINIMIZER_LIMIT:
                break
        log.debug('brute force n=%d box=%s: R=%d, %d minimizers', n, box,
                  r_min, count)
        return BruteForceResult(r_min, minimizers, count)

    # cost[i][s, t]: block i+1 subset s onto block i subset t (cyclic)
    cost, ways = [], []
    for i in range(1, b + 1):
        best, cnt = _pair_table(tables[i - 1], subsets[i - 1],
                                subsets[_previous(i, b) - 1], perms)
        cost.append(best)
        ways.append(cnt)

    paths = [cost[1].T]
    path_ways = [ways[1].T]
    for i in range(3, b + 1):
        prev, prev_ways = paths[-1], path_ways[-1]
        nxt = np.empty((sizes[0], sizes[i - 1]), dtype=np.int64)
        nxt_ways = np.empty_like(nxt)
        for s in range(sizes[0]):
            through = prev[s][None, :] + cost[i - 1]
            low = through.min(axis=1)
            nxt[s] = low
            hit = through == low[:, None]
            nxt_ways[s] = (hit * prev_ways[s][None, :]
                           * ways[i - 1]).sum(axis=1)
        paths.append(nxt)
        path_ways.append(nxt_ways)

    closing = paths[-1] + cost[0]
    r_min = int(closing.min())
    if r_min >= cap:
        return BruteForceResult(None, [], 0)
    hit = closing == r_min
    count = int((path_ways[-1] * ways[0])[hit].sum())

    minimizers = []
    for s, last in zip(*np.nonzero(hit)):
        for route in _routes(paths, cost, s, last, b):
            chosen = [subsets[i][route[i]] for i in range(b)]
            minimizers.extend(_expand(tables, chosen, perms, b,
                                      Config.MINIMIZER_LIMIT
                                      - len(minimizers)))
            if len(minimizers) >= Config.MINIMIZER_LIMIT:
                break
        if len(minimizers) >= Config.MINIMIZER_LIMIT:
            break
    log.debug('brute force n=%d box=%s: R=%d, %d minimizers', n, box,
              r_min, count)
    return BruteForceResult(r_min, minimizers, count)


def _routes(paths, cost, s, last, b):
    """All subset indices (S_1, ..., S_b) realizing paths[-1][s, last]."""
    if b == 2:
        yield (s, last)
        return
    level = b - 3
    target = paths[level + 1][s, last]
    through = paths[level][s] + cost[b - 1][last]
    for t in np.flatnonzero(through == target):
        for head in _routes(paths[:level + 1], cost[:b - 1], s, t, b - 1):
            yield head + (last,)


def _expand(tables, chosen, perms, b, limit):
    """Every minimal choice of bijections for fixed supports."""
    options = []
    for i in range(1, b + 1):
        row, col = chosen[i - 1], chosen[_previous(i, b) - 1]
        values = tables[i - 1][row[None, :], col[perms]].sum(axis=-1)
        options.append([perms[k] for k in
                        np.flatnonzero(values == values.min())])
    out = []
    for combo in itertools.product(*options):
        out.append(_from_supports(chosen, combo, b))
        if len(out) >= limit:
            break
    return out


def _from_supports(chosen, combo, b):
    pairs = []
    for i in range(1, b + 1):
        row = chosen[i - 1]
        col = chosen[_previous(i, b) - 1]
        perm = combo[i - 1]
        for r in range(len(row)):
            pairs.append(((i, 0, int(row[r])),
                          (_previous(i, b), 0, int(col[perm[r]]))))
    return EnrichedPermutation(pairs, b)
