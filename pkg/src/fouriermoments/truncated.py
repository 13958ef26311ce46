"""Exact truncated character moments d_p^r(M, N) by brute-force multiset
counting, together with the closed-form bounds alpha/beta, the (p=4, r=2)
closed form, and the per-pair solution-set machinery.

Counting conventions: index x+1 is cyclic mod r, y+1 cyclic mod p, and all
first components are reduced mod M. Multisets are compared by sorting
pair-encoded integers a*N + b. Everything returns `fractions.Fraction` in
lowest terms; counting is pure and parallelizes over disjoint chunks of the
(a, b) space with exact integer accumulation.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

from .errors import BudgetError, ParameterError

# Refuse enumerations whose definitional configuration space M^(p+r) * N^p
# exceeds this many elements.
DEFAULT_BUDGET = 10**9


def _validate_mn(M: int, N: int) -> None:
    if not (isinstance(M, int) and M >= 1):
        raise ParameterError(f"M must be a positive integer, got {M!r}")
    if not (isinstance(N, int) and N >= 1):
        raise ParameterError(f"N must be a positive integer, got {N!r}")


def _validate_pos(**kwargs: int) -> None:
    for name, value in kwargs.items():
        if not (isinstance(value, int) and value >= 1):
            raise ParameterError(f"{name} must be a positive integer, got {value!r}")


def _check_budget(what: str, cost: int, budget: int) -> None:
    if cost > budget:
        raise BudgetError(
            f"{what} needs ~{cost:.3e} elementary operations, over the budget "
            f"of {budget:.3e}; raise the budget to force it",
            estimated_ops=cost, budget=budget)


def counting_condition(i: Sequence[int], a: Sequence[int], b: Sequence[int],
                       M: int, N: int) -> bool:
    """The per-configuration matching condition behind the truncated moment
    count: for every x (cyclic), the 2p-element multiset
    {(i_x+a_y, b_y), (i_{x+1}+a_y, b_{y+1})}_y equals
    {(i_x+a_y, b_{y+1}), (i_{x+1}+a_y, b_y)}_y."""
    _validate_mn(M, N)
    r, p = len(i), len(a)
    if len(b) != p:
        raise ParameterError("a and b must have identical length")
    if r < 1 or p < 1:
        raise ParameterError("index tuples must be nonempty")
    for x in range(r):
        ix, ix1 = i[x], i[(x + 1) % r]
        left = []
        right = []
        for y in range(p):
            ay, by, by1 = a[y], b[y], b[(y + 1) % p]
            u = ((ix + ay) % M) * N
            v = ((ix1 + ay) % M) * N
            left.append(u + by)
            left.append(v + by1)
            right.append(u + by1)
            right.append(v + by)
        if sorted(left) != sorted(right):
            return False
    return True


def base_condition(a: Sequence[int], b: Sequence[int]) -> bool:
    """True iff the multisets {(a_y, b_y)}_y and {(a_y, b_{y+1})}_y agree
    (the condition whose probability is the limiting moment)."""
    p = len(a)
    if len(b) != p or p < 1:
        raise ParameterError("a and b must be nonempty of identical length")
    left = sorted(zip(a, b))
    right = sorted((a[y], b[(y + 1) % p]) for y in range(p))
    return left == right


def solution_set(a: Sequence[int], b: Sequence[int], M: int, N: int) -> set[int]:
    """All shifts i with {(i+a_y, b_y)}_y + {(a_y, b_{y+1})}_y equal to
    {(i+a_y, b_{y+1})}_y + {(a_y, b_y)}_y as multisets. Always contains 0;
    equals all of Z_M exactly when base_condition(a, b) holds."""
    _validate_mn(M, N)
    p = len(a)
    out = set()
    enc_a = [(a[y] % M) * N for y in range(p)]
    for i in range(M):
        left = []
        right = []
        for y in range(p):
            shifted = ((i + a[y]) % M) * N
            by, by1 = b[y], b[(y + 1) % p]
            left.append(shifted + by)
            left.append(enc_a[y] + by1)
            right.append(shifted + by1)
            right.append(enc_a[y] + by)
        if sorted(left) == sorted(right):
            out.add(i)
    return out


def i_tuple_probability(a: Sequence[int], b: Sequence[int], M: int, N: int,
                        r: int, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Exact fraction of i-tuples in Z_M^r satisfying counting_condition
    with the given (a, b)."""
    _validate_mn(M, N)
    _validate_pos(r=r)
    _check_budget("i-tuple scan", M**r * len(a), budget)
    hits = sum(1 for i in product(range(M), repeat=r)
               if counting_condition(i, a, b, M, N))
    return Fraction(hits, M**r)


_HISTOGRAM_CACHE: dict[tuple[int, int, int], tuple] = {}

# Below this many pinned (a, b) pairs, forking workers costs more than the scan.
_PARALLEL_THRESHOLD = 1 << 15


def _histogram_chunk(M: int, N: int, p: int,
                     second: int) -> dict[tuple[int, ...], int]:
    """Solution-set histogram over the pinned (a, b) pairs with a_2 = second."""
    counts: dict[tuple[int, ...], int] = {}
    for a_tail in product(range(M), repeat=p - 2):
        a = (0, second) + a_tail
        for b_rest in product(range(N), repeat=p - 1):
            b = (0,) + b_rest
            key = tuple(sorted(solution_set(a, b, M, N)))
            counts[key] = counts.get(key, 0) + 1
    return counts


def _solution_histogram(M: int, N: int, p: int,
                        threads: int = 1) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Histogram of solution sets over the (a, b) space with a_1 = b_1 = 0.

    The counting condition is invariant under translating all of a (or all
    of b) by a constant, so the full space is M*N translated copies of this
    pinned one. With threads > 1 the a-space is split into disjoint chunks
    whose nonnegative counts are summed, so the result does not depend on
    scheduling.
    """
    key = (M, N, p)
    cached = _HISTOGRAM_CACHE.get(key)
    if cached is not None:
        return cached
    pairs = M**(p - 1) * N**(p - 1)
    if threads > 1 and p >= 2 and M >= 2 and pairs >= _PARALLEL_THRESHOLD:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial
        counts: dict[tuple[int, ...], int] = {}
        with ProcessPoolExecutor(max_workers=min(threads, M)) as pool:
            for chunk in pool.map(partial(_histogram_chunk, M, N, p), range(M)):
                for skey, mult in chunk.items():
                    counts[skey] = counts.get(skey, 0) + mult
    else:
        counts = {}
        for a_rest in product(range(M), repeat=p - 1):
            a = (0,) + a_rest
            for b_rest in product(range(N), repeat=p - 1):
                b = (0,) + b_rest
                skey = tuple(sorted(solution_set(a, b, M, N)))
                counts[skey] = counts.get(skey, 0) + 1
    result = tuple(sorted(counts.items()))
    _HISTOGRAM_CACHE[key] = result
    return result


@lru_cache(maxsize=None)
def _pinned_i_count(shifts: tuple[int, ...], r: int, M: int) -> int:
    """Number of i-tuples with i_1 = 0 whose consecutive cyclic differences
    all lie in `shifts`.

    The condition at position x depends on (i_x, i_{x+1}) only through
    i_x - i_{x+1} mod M (translate both by -i_{x+1}), so tuples are counted
    by a walk over partial sums mod M.
    """
    if r == 1:
        return 1  # the empty walk; 0 is always a valid shift
    allowed = set(shifts)
    if len(allowed) == M:
        return M**(r - 1)
    ways = [0] * M
    ways[0] = 1
    for _ in range(r - 1):
        nxt = [0] * M
        for m, w in enumerate(ways):
            if w:
                for s in shifts:
                    nxt[(m + s) % M] += w
        ways = nxt
    return sum(w for m, w in enumerate(ways) if (-m) % M in allowed)


def count_d(M: int, N: int, p: int, r: int, budget: int = DEFAULT_BUDGET,
            threads: int = 1) -> Fraction:
    """Exact normalized truncated moment d_p^r(M, N): the number of index
    configurations (i, a, b) satisfying counting_condition, divided by
    M^(p+r) * N^p.

    Equals 1 whenever M = 1, N = 1, p = 1 or r = 1.
    """
    _validate_mn(M, N)
    _validate_pos(p=p, r=r)
    _check_budget(f"d_{p}^{r}({M},{N}) enumeration", M**(p + r) * N**p, budget)
    total = 0
    for shifts, mult in _solution_histogram(M, N, p, threads):
        total += mult * _pinned_i_count(shifts, r, M)
    # Pinned i_1, a_1, b_1 each contribute a translation factor.
    return Fraction(total * M * M * N, M**(p + r) * N**p)


def c_from_d(d: Fraction, M: int, N: int, p: int) -> Fraction:
    """Rescale a normalized moment back to c_p^r = (MN)^(p-1) * d."""
    _validate_mn(M, N)
    _validate_pos(p=p)
    return d * (M * N)**(p - 1)


def alpha(M: int, N: int, p: int, r: int) -> Fraction:
    """Closed-form contribution of configurations where one of i, a, b is
    constant: 1 - (M^p - M)(M^r - M)(N^p - N) / (M^(p+r) N^p).

    Equals d_p^r(M, N) when M = 1, N = 1, r = 1 or p <= 2.
    """
    _validate_mn(M, N)
    _validate_pos(p=p, r=r)
    return 1 - Fraction((M**p - M) * (M**r - M) * (N**p - N), M**(p + r) * N**p)


def beta(M: int, N: int, p: int, r: int, delta_p: Fraction) -> Fraction:
    """Closed-form contribution of configurations where i is constant or the
    base condition holds: delta_p + (1 - delta_p) / M^(r-1).

    Takes the exact limiting moment delta_p as input; equals d_p^r(M, N)
    when M = 1, N = 1, r = 1 or p <= 3.
    """
    _validate_mn(M, N)
    _validate_pos(p=p, r=r)
    delta_p = Fraction(delta_p)
    return delta_p + Fraction(1, M**(r - 1)) * (1 - delta_p)


def d42_closed(M: int, N: int, delta_4: Fraction | None = None) -> Fraction:
    """Closed form for d_4^2(M, N): beta_4^2 plus, for even M, a correction
    (M-2)(N-1) / (M^4 N^3)."""
    _validate_mn(M, N)
    if delta_4 is None:
        from .limits import delta_partition
        delta_4 = delta_partition(M, N, 4)
    value = beta(M, N, 4, 2, delta_4)
    if M % 2 == 0:
        value += Fraction((M - 2) * (N - 1), M**4 * N**3)
    return value
