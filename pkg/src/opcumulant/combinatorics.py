"""
Partition-like structures that the moment/cumulant expansions sum over.

Indices are 1-based throughout. Set partitions are enumerated via
restricted growth strings, which yields each partition exactly once and
already in canonical block order (blocks sorted by minimal element).
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import comb, factorial, prod

from .errors import EnumerationLimitError, ValidationError

MAX_PARTITION_N = 12
MAX_COMPOSITION_N = 24
MAX_PROFILE_N = 20


@dataclass(frozen=True)
class SetPartition:
    """A set partition of {1..n} stored as sorted blocks sorted by minimum."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(i) for i in b)) for b in self.blocks)
        if any(len(b) == 0 for b in blocks):
            raise ValidationError("empty block in set partition")
        flat = [i for b in blocks for i in b]
        n = len(flat)
        if sorted(flat) != list(range(1, n + 1)):
            raise ValidationError(f"blocks {blocks} do not partition 1..{n}")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @property
    def n(self):
        return sum(len(b) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def profile(self):
        """Size profile r -> s_r of this partition."""
        counts = {}
        for b in self.blocks:
            counts[len(b)] = counts.get(len(b), 0) + 1
        return SizeProfile(counts)

    def is_interval(self):
        """True when every block is a contiguous run of integers."""
        return all(b[-1] - b[0] + 1 == len(b) for b in self.blocks)

    def __str__(self):
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)


@dataclass(frozen=True)
class IntervalComposition:
    """An ordered composition (m_1,...,m_p) of n, read as contiguous runs."""

    block_lengths: tuple

    def __post_init__(self):
        lengths = tuple(int(m) for m in self.block_lengths)
        if not lengths or any(m < 1 for m in lengths):
            raise ValidationError(f"invalid composition {lengths}")
        object.__setattr__(self, "block_lengths", lengths)

    @property
    def n(self):
        return sum(self.block_lengths)

    def __len__(self):
        return len(self.block_lengths)

    def blocks(self):
        """Contiguous index runs [1..m1], [m1+1..m1+m2], ..."""
        out, start = [], 1
        for m in self.block_lengths:
            out.append(tuple(range(start, start + m)))
            start += m
        return tuple(out)

    def to_partition(self):
        return SetPartition(self.blocks())


@dataclass(frozen=True)
class SizeProfile:
    """Multiplicities r -> s_r, i.e. s_r blocks of size r."""

    multiplicities: tuple

    def __init__(self, multiplicities):
        if isinstance(multiplicities, dict):
            items = multiplicities.items()
        else:
            items = multiplicities
        clean = {}
        for r, s in items:
            r, s = int(r), int(s)
            if r < 1 or s < 0:
                raise ValidationError(f"invalid profile entry {r}:{s}")
            if s:
                clean[r] = clean.get(r, 0) + s
        if not clean:
            raise ValidationError("empty size profile")
        object.__setattr__(self, "multiplicities", tuple(sorted(clean.items(), reverse=True)))

    @property
    def n(self):
        return sum(r * s for r, s in self.multiplicities)

    def as_dict(self):
        return dict(self.multiplicities)

    def sizes(self):
        """Block sizes in descending order, with repetition."""
        return tuple(r for r, s in self.multiplicities for _ in range(s))


def _check_range(n, cap, what):
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValidationError(f"{what}: n must be an integer, got {n!r}")
    if n < 1 or n > cap:
        raise EnumerationLimitError(f"{what}: n={n} outside 1..{cap}")


def _rgs(n):
    """Restricted growth strings of length n (first entry 0)."""
    a = [0] * n
    m = [0] * n  # running maxima

    def rec(i):
        if i == n:
            yield tuple(a)
            return
        for v in range(m[i - 1] + 2):
            a[i] = v
            m[i] = max(m[i - 1], v)
            yield from rec(i + 1)

    if n == 1:
        yield (0,)
        return
    yield from rec(1)


@lru_cache(maxsize=None)
def _set_partitions(n):
    out = []
    for code in _rgs(n):
        blocks = [[] for _ in range(max(code) + 1)]
        for i, c in enumerate(code, start=1):
            blocks[c].append(i)
        out.append(SetPartition(tuple(tuple(b) for b in blocks)))
    return tuple(out)


def enumerate_set_partitions(n):
    """
    All set partitions of {1..n}.

    :param n: number of indices, 1 <= n <= 12
    :return: list of Bell(n) SetPartition objects in canonical block order
    """
    _check_range(n, MAX_PARTITION_N, "set partitions")
    return list(_set_partitions(n))


@lru_cache(maxsize=None)
def _compositions(n):
    out = []
    for p in range(1, n + 1):
        # cut points between consecutive indices, lex order of lengths
        chunk = []
        for cuts in combinations(range(1, n), p - 1):
            edges = (0,) + cuts + (n,)
            chunk.append(tuple(edges[i + 1] - edges[i] for i in range(p)))
        chunk.sort()
        out.extend(IntervalComposition(c) for c in chunk)
    return tuple(out)


def enumerate_interval_compositions(n):
    """
    Ordered compositions of n, 2**(n-1) in total.

    Ordered by number of parts, then lexicographically on the lengths,
    so n=3 gives (3), (1,2), (2,1), (1,1,1).
    """
    _check_range(n, MAX_COMPOSITION_N, "interval compositions")
    return list(_compositions(n))


def block_permutations_first_fixed(partition):
    """
    Orderings of the blocks of `partition` that keep the block holding index 1 leftmost.

    Returns (|pi|-1)! tuples of blocks, the rest permuted in lexicographic order.
    """
    first, *rest = partition.blocks
    return [(first,) + p for p in permutations(rest)]


def permutation_parity(perm):
    """Sign (-1)**inversions of a permutation of 1..k."""
    perm = tuple(perm)
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise ValidationError(f"{perm} is not a permutation of 1..{len(perm)}")
    inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def partitions_with_profile_count(profile):
    """Number of set partitions of {1..n} with the given size profile."""
    if not isinstance(profile, SizeProfile):
        profile = SizeProfile(profile)
    n = profile.n
    if n > MAX_PROFILE_N:
        raise ValidationError(f"profile total {n} exceeds {MAX_PROFILE_N}")
    denom = prod(factorial(r) ** s * factorial(s) for r, s in profile.multiplicities)
    return factorial(n) // denom


def size_profiles(n):
    """All size profiles of n (integer partitions), largest part first."""
    _check_range(n, MAX_PROFILE_N, "size profiles")

    def parts(rem, cap):
        if rem == 0:
            yield ()
            return
        for r in range(min(rem, cap), 0, -1):
            for tail in parts(rem - r, r):
                yield (r,) + tail

    out = []
    for sizes in parts(n, n):
        counts = {}
        for r in sizes:
            counts[r] = counts.get(r, 0) + 1
        out.append(SizeProfile(counts))
    return out


def bell_number(n):
    """Bell number via the recurrence B(n+1) = sum_k C(n,k) B(k)."""
    b = [1]
    for m in range(n):
        b.append(sum(comb(m, k) * b[k] for k in range(m + 1)))
    return b[n]
