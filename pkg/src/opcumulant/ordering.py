"""
Semantics of the four ordering maps: admissible partitions, canonical
factor order, and a numeric check that moments are fixed points.
"""
from enum import Enum
from itertools import permutations

import numpy as np

from .combinatorics import enumerate_interval_compositions, enumerate_set_partitions, permutation_parity
from .errors import InadmissibleTermError, ValidationError


class OrderingMapKind(Enum):
    CLASSICAL = "classical"
    PTO = "pto"
    TTO = "tto"
    GRASSMANN = "grassmann"

    @property
    def time_ordered(self):
        return self in (OrderingMapKind.PTO, OrderingMapKind.TTO)


def parse_map(value):
    """Accept an OrderingMapKind or its CLI name."""
    if isinstance(value, OrderingMapKind):
        return value
    try:
        return OrderingMapKind(str(value).lower())
    except ValueError:
        names = ", ".join(k.value for k in OrderingMapKind)
        raise ValidationError(f"unknown ordering map {value!r} (expected one of {names})") from None


def admissible_partitions(n, map_kind):
    """
    Set partitions that contribute to the n-th moment under the map.

    TTO keeps only the interval compositions; the other maps keep all
    Bell(n) partitions.
    """
    map_kind = parse_map(map_kind)
    if map_kind is OrderingMapKind.TTO:
        return [c.to_partition() for c in enumerate_interval_compositions(n)]
    return enumerate_set_partitions(n)


def _is_tto_chain(factors):
    """Blocks are contiguous runs, in order, relative to their joint atom set."""
    flat = [i for f in factors for i in f.idx]
    if len(set(flat)) != len(flat):
        return False
    rank = {v: k for k, v in enumerate(sorted(flat))}
    pos = 0
    for f in factors:
        r = [rank[i] for i in f.idx]
        if r != list(range(pos, pos + len(r))):
            return False
        pos += len(r)
    return True


def canonical_factor_order(factors, map_kind):
    """
    Normal form of a product of brackets under the map.

    PTO sorts by each bracket's smallest index; TTO does the same and
    then demands an interval chain; Classical and Grassmann use the free
    commutative order (size descending, then lexicographic).
    """
    map_kind = parse_map(map_kind)
    factors = list(factors)
    if map_kind.time_ordered:
        out = sorted(factors, key=lambda f: (min(f.idx), f.idx, f.kind))
        if map_kind is OrderingMapKind.TTO and not _is_tto_chain([_sorted(f) for f in out]):
            shown = "*".join(f.text() for f in factors)
            raise InadmissibleTermError(f"{shown} is not a totally time-ordered interval chain")
        return out
    return sorted(factors, key=lambda f: (-len(f.idx), f.idx, f.kind))


def _sorted(f):
    return type(f)(tuple(sorted(f.idx)), f.kind)


def check_mo_constraint(n, map_kind, model):
    """
    Check numerically that the full n-moment is a fixed point of the map.

    Every reordering of the word Omega_1...Omega_n is pushed through the
    map and compared with the bracket <1...n>. Time-ordering maps
    reorder the word back by index. The Classical map requires the word
    to be symmetric, the Grassmann map requires it to be antisymmetric
    (value equal to the permutation sign times the bracket).
    """
    from .numeric import VerificationReport, word_average

    map_kind = parse_map(map_kind)
    missing = [i for i in range(1, n + 1) if i not in model.ops]
    if missing:
        raise ValidationError(f"model lacks atoms {missing}")
    ref = word_average(model, tuple(range(1, n + 1)))
    scale = max(np.max(np.abs(ref)), 1e-300)
    worst, diag = 0.0, []
    for perm in permutations(range(1, n + 1)):
        if map_kind.time_ordered:
            value = word_average(model, tuple(sorted(perm)))
            target = ref
        elif map_kind is OrderingMapKind.GRASSMANN:
            value = word_average(model, perm)
            target = permutation_parity(perm) * ref
        else:
            value = word_average(model, perm)
            target = ref
        dev = float(np.max(np.abs(value - target)))
        diag.append((perm, dev))
        worst = max(worst, dev)
    rel = worst / scale
    return VerificationReport(worst, rel, rel <= 1e-10, diag)
