"""Set partitions of {0,...,p-1}: enumeration, non-crossing structure,
Kreweras complementation, Stirling/Narayana counts and the cyclic-shift
compatibility relation used by the moment formulas.

All values are immutable after construction; enumeration streams are
single-consumer but independent streams may run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator

import numpy as np

from .errors import ParameterError

# Enumeration over all of P(p) is refused above this ground-set size
# (Bell(12) = 4 213 597 partitions is the largest full stream supported).
ENUMERATION_CAP = 12

# Pair scans over P(p) x P(p) (triangle tables) are refused above this size.
TRIANGLE_CAP = 9


@dataclass(frozen=True)
class SetPartition:
    """A partition of {0,...,p-1} in canonical form.

    Blocks are sorted tuples, ordered by their minimum element, so equality
    and hashing are structural.
    """

    p: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = set()
        for block in self.blocks:
            if not block:
                raise ParameterError("empty block")
            if tuple(sorted(block)) != block:
                raise ParameterError("block not sorted; use from_blocks()")
            seen.update(block)
        if seen != set(range(self.p)):
            raise ParameterError(
                f"blocks do not partition range({self.p}): union={sorted(seen)}")
        if sum(len(b) for b in self.blocks) != self.p:
            raise ParameterError("blocks are not pairwise disjoint")
        if list(self.blocks) != sorted(self.blocks, key=lambda b: b[0]):
            raise ParameterError("blocks not sorted by minimum; use from_blocks()")

    @classmethod
    def from_blocks(cls, p: int, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        return cls(p, canon)

    @classmethod
    def from_rgs(cls, rgs: Iterable[int]) -> "SetPartition":
        """Build from a restricted growth string (element -> block id)."""
        rgs = tuple(rgs)
        nblocks = max(rgs) + 1 if rgs else 0
        blocks = [[] for _ in range(nblocks)]
        for element, block_id in enumerate(rgs):
            blocks[block_id].append(element)
        return cls(len(rgs), tuple(tuple(b) for b in blocks))

    def rgs(self) -> tuple[int, ...]:
        """Restricted growth string: position e holds the id of e's block."""
        out = [0] * self.p
        for block_id, block in enumerate(self.blocks):
            for element in block:
                out[element] = block_id
        return tuple(out)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(sorted(len(b) for b in self.blocks))

    @classmethod
    def one_block(cls, p: int) -> "SetPartition":
        return cls(p, (tuple(range(p)),))

    @classmethod
    def singletons(cls, p: int) -> "SetPartition":
        return cls(p, tuple((e,) for e in range(p)))


@dataclass
class PartitionStats:
    """Exact counting data for P(p): Stirling numbers, the Bell number and
    the block-count profile of the non-crossing partitions."""

    p: int
    stirling: dict[int, int]
    bell: int
    narayana: dict[int, int]


def _check_p(p: int, cap: int = ENUMERATION_CAP) -> None:
    if not isinstance(p, int) or p < 1:
        raise ParameterError(f"p must be a positive integer, got {p!r}")
    if p > cap:
        raise ParameterError(f"p={p} exceeds the supported cap {cap}")


def _rgs_stream(p: int, max_blocks: int) -> Iterator[tuple[int, ...]]:
    # Lexicographic restricted-growth strings with an O(1) amortized successor.
    # a[j] may take values 0..min(1 + max(a[:j]), max_blocks - 1).
    a = [0] * p
    b = [1] * p  # b[j] = 1 + max(a[:j])
    while True:
        yield tuple(a)
        j = p - 1
        while j >= 1 and (a[j] >= b[j] or a[j] + 1 >= max_blocks):
            j -= 1
        if j < 1:
            return
        a[j] += 1
        nb = b[j] if a[j] < b[j] else a[j] + 1
        for k in range(j + 1, p):
            a[k] = 0
            b[k] = nb


def enumerate_partitions(p: int, max_blocks: int | None = None) -> Iterator[SetPartition]:
    """Yield every partition of {0,...,p-1} exactly once, in restricted
    growth string order. `max_blocks` restricts the stream to partitions
    with at most that many blocks."""
    _check_p(p)
    if max_blocks is None:
        max_blocks = p
    for rgs in _rgs_stream(p, max_blocks):
        yield SetPartition.from_rgs(rgs)


def noncrossing_partitions(p: int) -> Iterator[SetPartition]:
    """Yield the non-crossing partitions of {0,...,p-1}, each exactly once."""
    _check_p(p)
    for blocks in _nc_blocks(tuple(range(p))):
        yield SetPartition.from_blocks(p, blocks)


def _nc_blocks(elems: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    # The block of the first element may pick any subset of the remaining
    # elements; the gaps between picked elements are then partitioned
    # independently (anything else would cross the first block).
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    n = len(rest)
    for k in range(n + 1):
        for picked in combinations(range(n), k):
            block = (first,) + tuple(rest[i] for i in picked)
            bounds = [-1, *picked, n]
            gaps = [rest[bounds[i] + 1:bounds[i + 1]] for i in range(len(bounds) - 1)]
            yield from _combine_gaps(block, gaps, 0, [])


def _combine_gaps(block, gaps, idx, acc) -> Iterator[list[tuple[int, ...]]]:
    if idx == len(gaps):
        yield [block, *acc]
        return
    for sub in _nc_blocks(gaps[idx]):
        yield from _combine_gaps(block, gaps, idx + 1, acc + sub)


def is_noncrossing(part: SetPartition) -> bool:
    """True iff no a<b<c<d has a,c in one block and b,d in another.

    Linear stack scan: a block revisited while a later-opened block is still
    open is a crossing.
    """
    rgs = part.rgs()
    last = {}
    for element, block_id in enumerate(rgs):
        last[block_id] = element
    stack: list[int] = []
    opened: set[int] = set()
    for element, block_id in enumerate(rgs):
        if block_id not in opened:
            opened.add(block_id)
            stack.append(block_id)
        elif stack[-1] != block_id:
            return False
        if last[block_id] == element:
            stack.pop()
    return True


def kreweras_complement(part: SetPartition) -> SetPartition:
    """Kreweras complement of a non-crossing partition.

    Computed through the permutation picture: a non-crossing partition acts
    as the permutation cycling each block in increasing order, and the
    complement is the cycle partition of x -> inverse(x + 1 mod p).
    Satisfies |part| + |complement| = p + 1.
    """
    if not is_noncrossing(part):
        raise ParameterError("Kreweras complement requires a non-crossing partition")
    p = part.p
    nxt = [0] * p
    for block in part.blocks:
        for i, element in enumerate(block):
            nxt[element] = block[(i + 1) % len(block)]
    inv = [0] * p
    for element in range(p):
        inv[nxt[element]] = element
    perm = [inv[(x + 1) % p] for x in range(p)]
    blocks = []
    unseen = [True] * p
    for start in range(p):
        if not unseen[start]:
            continue
        cycle = []
        x = start
        while unseen[x]:
            unseen[x] = False
            cycle.append(x)
            x = perm[x]
        blocks.append(cycle)
    return SetPartition.from_blocks(p, blocks)


def shift_block(beta: Iterable[int], p: int) -> set[int]:
    """Cyclic left shift of a block: {(x - 1) mod p for x in beta}."""
    beta = set(beta)
    if any(x < 0 or x >= p for x in beta):
        raise ParameterError(f"block not contained in range({p})")
    return {(x - 1) % p for x in beta}


def triangle_relation(pi: SetPartition, sigma: SetPartition) -> bool:
    """Shift-compatibility of two partitions of the same ground set: every
    block of `pi` meets every block of `sigma` in as many points as its
    cyclic left shift does. Exits on the first failing pair of blocks."""
    if pi.p != sigma.p:
        raise ParameterError(f"ground-set sizes differ: {pi.p} != {sigma.p}")
    p = pi.p
    sigma_sets = [frozenset(g) for g in sigma.blocks]
    for beta in pi.blocks:
        beta_set = frozenset(beta)
        shifted = frozenset((x - 1) % p for x in beta)
        for gamma in sigma_sets:
            if len(beta_set & gamma) != len(shifted & gamma):
                return False
    return True


@lru_cache(maxsize=None)
def _stirling_row(p: int) -> tuple[int, ...]:
    # S(p, s) for s = 0..p via S(p, s) = s*S(p-1, s) + S(p-1, s-1).
    row = [1]
    for n in range(1, p + 1):
        prev = row
        row = [0] * (n + 1)
        for s in range(1, n + 1):
            row[s] = s * (prev[s] if s < n else 0) + prev[s - 1]
    return tuple(row)


def stirling_number(p: int, s: int) -> int:
    """Number of partitions of {0,...,p-1} with exactly s blocks."""
    if s < 0 or s > p:
        return 0
    return _stirling_row(p)[s]


def bell_number(p: int) -> int:
    return sum(_stirling_row(p))


@lru_cache(maxsize=None)
def _narayana_profile(p: int) -> tuple[int, ...]:
    # Block-count profile of NC(p), computed by direct enumeration.
    _check_p(p)
    profile = [0] * (p + 1)
    for part in noncrossing_partitions(p):
        profile[part.num_blocks] += 1
    return tuple(profile)


def partition_stats(p: int) -> PartitionStats:
    """Exact Stirling table, Bell number and non-crossing block profile."""
    _check_p(p)
    row = _stirling_row(p)
    profile = _narayana_profile(p)
    return PartitionStats(
        p=p,
        stirling={s: row[s] for s in range(1, p + 1)},
        bell=sum(row),
        narayana={k: profile[k] for k in range(1, p + 1) if profile[k]},
    )


@lru_cache(maxsize=None)
def _rgs_array(p: int, max_blocks: int) -> tuple[np.ndarray, np.ndarray]:
    """All restricted growth strings with at most `max_blocks` blocks, as an
    (n, p) int array, plus the per-row block counts."""
    rows = np.array(list(_rgs_stream(p, max_blocks)), dtype=np.int64)
    counts = rows.max(axis=1) + 1
    return rows, counts


@lru_cache(maxsize=None)
def triangle_pair_counts(p: int, smax: int, tmax: int) -> dict[tuple[int, int], int]:
    """Exact number of shift-compatible pairs (pi, sigma) with |pi| = s,
    |sigma| = t, for every s <= smax and t <= tmax.

    Vectorized scan of the grouped partition arrays; a pair is compatible iff
    the joint block histogram of (pi, sigma) equals that of (shifted pi,
    sigma).
    """
    _check_p(p, TRIANGLE_CAP)
    smax = min(smax, p)
    tmax = min(tmax, p)
    pis, _ = _rgs_array(p, smax)
    sigmas, sigma_counts = _rgs_array(p, tmax)
    n_sigma = sigmas.shape[0]
    table: dict[tuple[int, int], int] = {
        (s, t): 0 for s in range(1, smax + 1) for t in range(1, tmax + 1)}
    row_base = np.arange(n_sigma, dtype=np.int64)[:, None]
    for u in pis:
        s = int(u.max()) + 1
        u_shift = np.roll(u, -1)
        span = s * tmax
        base = row_base * span
        key_a = base + u[None, :] * tmax + sigmas
        key_b = base + u_shift[None, :] * tmax + sigmas
        hist_a = np.bincount(key_a.ravel(), minlength=n_sigma * span)
        hist_b = np.bincount(key_b.ravel(), minlength=n_sigma * span)
        matched = (hist_a == hist_b).reshape(n_sigma, span).all(axis=1)
        if matched.any():
            by_t = np.bincount(sigma_counts[matched], minlength=tmax + 1)
            for t in range(1, tmax + 1):
                if by_t[t]:
                    table[(s, t)] += int(by_t[t])
    return table
