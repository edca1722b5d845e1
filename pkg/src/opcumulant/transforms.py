"""
Moment <-> cumulant transforms as symbolic expressions.

The forward direction sums canonically ordered cumulant products over
the admissible partitions of the map. The recursive triangular inversion
is the reference for the opposite direction; the closed forms for PTO
and TTO and the run-splitting procedure exist to be checked against it.
"""
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial, prod

from .combinatorics import (
    MAX_PARTITION_N,
    SizeProfile,
    block_permutations_first_fixed,
    enumerate_interval_compositions,
    enumerate_set_partitions,
    partitions_with_profile_count,
    size_profiles,
    _check_range,
)
from .errors import ValidationError
from .expr import (
    CUMULANT,
    MOMENT,
    Bracket,
    Expression,
    Term,
    canonicalize,
    relabel_to,
    substitute_many,
)
from .ordering import OrderingMapKind, admissible_partitions, parse_map


def _full(n, kind):
    return Bracket(tuple(range(1, n + 1)), kind)


def _profile_representative(profile):
    """Blocks of a profile on consecutive labels, largest block first."""
    blocks, start = [], 1
    for r in profile.sizes():
        blocks.append(tuple(range(start, start + r)))
        start += r
    return blocks


@lru_cache(maxsize=None)
def _moments_from_cumulants(n, map_kind):
    if map_kind is OrderingMapKind.GRASSMANN:
        terms = []
        for prof in size_profiles(n):
            factors = tuple(Bracket(b, CUMULANT) for b in _profile_representative(prof))
            terms.append(Term(partitions_with_profile_count(prof), factors, wedge=len(factors) > 1))
        return canonicalize(Expression(terms), map_kind)
    terms = [
        Term(1, tuple(Bracket(b, CUMULANT) for b in part.blocks), projected=True)
        for part in admissible_partitions(n, map_kind)
    ]
    return canonicalize(Expression(terms), map_kind)


def moments_from_cumulants(n, map_kind):
    """
    The full n-moment bracket expanded in cumulant products.

    All coefficients are +1 except under Grassmann, where terms are size
    profiles carrying their partition multiplicities.
    """
    _check_range(n, MAX_PARTITION_N, "moments_from_cumulants")
    return _moments_from_cumulants(n, parse_map(map_kind))


def _expand(expr, map_kind, kind, builder):
    """Substitute every bracket of `kind` with size >= 2 until none remain."""
    while True:
        targets = [b for b in expr.brackets() if b.kind == kind and len(b) > 1]
        if not targets:
            return expr
        reps = {b: relabel_to(builder(len(b), map_kind), b.idx) for b in targets}
        expr = substitute_many(expr, reps, map_kind)


@lru_cache(maxsize=None)
def _recursive(n, map_kind):
    if n == 1:
        return Expression.from_bracket(_full(1, MOMENT))
    forward = _moments_from_cumulants(n, map_kind)
    top = _full(n, CUMULANT)
    head = [t for t in forward.terms if t.factors == (top,)]
    if len(head) != 1 or head[0].coeff != 1:
        raise AssertionError("top cumulant must appear once with coefficient 1")
    rest = Expression(t for t in forward.terms if t.factors != (top,))
    k = Expression.from_bracket(_full(n, MOMENT)) - rest
    return _expand(canonicalize(k, map_kind), map_kind, CUMULANT, _recursive)


def cumulants_from_moments_recursive(n, map_kind):
    """The n-cumulant in moment brackets by triangular inversion."""
    _check_range(n, MAX_PARTITION_N, "cumulants_from_moments_recursive")
    return _recursive(n, parse_map(map_kind))


def cumulants_from_moments_pto_direct(n):
    """Signed sum over partitions and block orders with the first block held leftmost."""
    _check_range(n, MAX_PARTITION_N, "cumulants_from_moments_pto_direct")
    terms = []
    for part in enumerate_set_partitions(n):
        sign = (-1) ** (len(part) - 1)
        for order in block_permutations_first_fixed(part):
            terms.append(Term(sign, tuple(Bracket(b, MOMENT) for b in order)))
    return canonicalize(Expression(terms), OrderingMapKind.PTO)


def cumulants_from_moments_tto_direct(n):
    """Signed products of moments over consecutive runs, one per composition."""
    terms = []
    for comp in enumerate_interval_compositions(n):
        sign = (-1) ** (len(comp) + 1)
        terms.append(Term(sign, tuple(Bracket(b, MOMENT) for b in comp.blocks())))
    return canonicalize(Expression(terms), OrderingMapKind.TTO)


def ascending_runs(seq):
    """Split a sequence into maximal strictly ascending runs."""
    runs = [[seq[0]]]
    for a, b in zip(seq, seq[1:]):
        if b > a:
            runs[-1].append(b)
        else:
            runs.append([b])
    return [tuple(r) for r in runs]


def cumulants_from_moments_roerdnik(n):
    """
    PTO cumulant written in TTO cumulant brackets by run splitting.

    Each permutation of 2..n placed after 1 is cut into maximal ascending
    runs; each run becomes a cumulant bracket, and the product carries the
    sign (-1)**(p+1) for p runs. Products are literal: the cumulant
    brackets are to be read under TTO.
    """
    _check_range(n, MAX_PARTITION_N, "cumulants_from_moments_roerdnik")
    terms = []
    for rest in permutations(range(2, n + 1)):
        runs = ascending_runs((1,) + rest)
        sign = (-1) ** (len(runs) + 1)
        terms.append(Term(sign, tuple(Bracket(r, CUMULANT) for r in runs)))
    return canonicalize(Expression(terms), OrderingMapKind.TTO)


def expand_cumulants(expr, map_kind):
    """Rewrite every multi-atom cumulant bracket through the recursive inversion."""
    map_kind = parse_map(map_kind)
    return _expand(canonicalize(expr, map_kind), map_kind, CUMULANT, _recursive)


def expand_moments(expr, map_kind):
    """Rewrite every multi-atom moment bracket through the forward transform."""
    map_kind = parse_map(map_kind)
    return _expand(canonicalize(expr, map_kind), map_kind, MOMENT, _moments_from_cumulants)


@dataclass(frozen=True)
class GeneratingComponent:
    """
    Order-n generating component as a weighted sum of cumulant-component products.

    `weights` maps each SizeProfile to its rational weight; the product of
    K_r powers for that profile is taken inside the ordering map.
    """

    order: int
    weights: dict

    def render(self):
        parts = []
        for prof, w in self.weights.items():
            mono = "*".join(f"K{r}" + (f"^{s}" if s > 1 else "") for r, s in prof.multiplicities)
            if len(prof.sizes()) > 1:
                mono = "{" + mono + "}"
            coeff = "" if w == 1 else f"{w}*"
            parts.append(coeff + mono)
        return " + ".join(parts)

    def __str__(self):
        return self.render()


def meeron_component(n, map_kind=OrderingMapKind.PTO):
    """Moment component of order n with profile weights prod_r 1/s_r!."""
    parse_map(map_kind)
    weights = {
        prof: Fraction(1, prod(factorial(s) for _, s in prof.multiplicities))
        for prof in size_profiles(n)
    }
    return GeneratingComponent(n, weights)


def expand_exp_mo(n):
    """
    Order-n part of the ordered exponential of sum_r K_r, word by word.

    Each ordered word (r_1,...,r_k) with sum n comes from the k-th power
    with weight 1/k!; inside the map the word order is irrelevant, so
    words are collected by their size profile.
    """
    acc = Counter()
    for comp in enumerate_interval_compositions(n):
        word = comp.block_lengths
        acc[SizeProfile(Counter(word))] += Fraction(1, factorial(len(word)))
    order = {p: i for i, p in enumerate(size_profiles(n))}
    return GeneratingComponent(n, dict(sorted(acc.items(), key=lambda kv: order[kv[0]])))


def vanishing_mean_simplification(n, map_kind):
    """Cumulant-from-moment expansion with every singleton moment set to zero."""
    if n not in (2, 3):
        raise ValidationError(f"vanishing-mean simplification defined for n in (2, 3), got {n}")
    full = cumulants_from_moments_recursive(n, map_kind)
    kept = [t for t in full.terms if all(len(f) > 1 for f in t.factors)]
    return canonicalize(Expression(kept), map_kind)
