"""
Exact evaluation of expressions on finite operator models and the
numeric verification suite built on it.

A moment bracket is the weighted sum over samples of the ordered matrix
product of its atoms (index 1 leftmost). A product of brackets is the
matrix product of their values. A cumulant bracket is evaluated through
the map's cumulant-from-moment expansion, relabeled onto its atoms.
"""
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from math import factorial, prod
from collections import Counter

import numpy as np

from .combinatorics import enumerate_interval_compositions, enumerate_set_partitions
from .errors import ValidationError
from .expr import CUMULANT, Bracket, Expression, relabel_to
from .models import OperatorModel, SplitModel, build_random_model, build_split_model  # noqa: F401
from .ordering import OrderingMapKind, parse_map
from .transforms import cumulants_from_moments_recursive

DEFAULT_TOL = 1e-10


@dataclass
class VerificationReport:
    max_abs_deviation: float
    max_rel_deviation: float
    passed: bool
    diagnostics: list = field(default_factory=list)

    def __bool__(self):
        return self.passed

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} max_abs={self.max_abs_deviation:.3e} max_rel={self.max_rel_deviation:.3e}"


def word_average(model, word):
    """Weighted average of the matrix product Omega_{w1} ... Omega_{wk}."""
    try:
        mats = [model.ops[i] for i in word]
    except KeyError as exc:
        raise ValidationError(f"model has no assignment for atom {exc.args[0]}") from None
    acc = mats[0]
    for m in mats[1:]:
        acc = acc @ m
    return np.tensordot(model.w, acc, axes=1)


class Evaluator:
    """
    Caching evaluator bound to one model and one ordering map.

    `cumulants="symbolic"` evaluates cumulant brackets through the
    expansion from module transforms; `cumulants="recursive"` uses a
    direct matrix recursion over admissible partitions instead, which is
    independent of the symbolic machinery.
    """

    def __init__(self, model, map_kind, cumulants="symbolic"):
        self.model = model
        self.map = parse_map(map_kind)
        if self.map is OrderingMapKind.GRASSMANN:
            raise ValidationError("Grassmann expressions are evaluated on antisymmetric tensors (module fermi)")
        if self.map is OrderingMapKind.CLASSICAL and not model.is_commuting():
            raise ValidationError("the Classical map needs a commuting model")
        if cumulants not in ("symbolic", "recursive"):
            raise ValidationError(f"unknown cumulant mode {cumulants!r}")
        self.mode = cumulants
        self._cache = {}

    def bracket(self, b):
        b = b.normalized()
        if b in self._cache:
            return self._cache[b]
        if b.kind != CUMULANT:
            val = word_average(self.model, b.idx)
        elif self.mode == "symbolic":
            val = self.expression(relabel_to(cumulants_from_moments_recursive(len(b), self.map), b.idx))
        else:
            val = self._recursive_cumulant(b.idx)
        self._cache[b] = val
        return val

    def _recursive_cumulant(self, idx):
        n = len(idx)
        total = word_average(self.model, idx)
        if self.map is OrderingMapKind.TTO:
            parts = [c.blocks() for c in enumerate_interval_compositions(n)]
        else:
            parts = [p.blocks for p in enumerate_set_partitions(n)]
        for blocks in parts:
            if len(blocks) == 1:
                continue
            # blocks come sorted by minimum, the PTO/TTO product order
            mats = [self.bracket(Bracket(tuple(idx[i - 1] for i in blk), CUMULANT)) for blk in blocks]
            total = total - _chain(mats)
        return total

    def term(self, t):
        return complex(t.coeff.numerator) / t.coeff.denominator * _chain([self.bracket(f) for f in t.factors])

    def expression(self, expr):
        d = self.model.dim
        out = np.zeros((d, d), dtype=complex)
        for t in expr.terms:
            out = out + self.term(t)
        return out


def _chain(mats):
    acc = mats[0]
    for m in mats[1:]:
        acc = acc @ m
    return acc


def evaluate(expr, model, map_kind, cumulants="symbolic"):
    """Matrix value of an expression on a model under the given map."""
    if isinstance(expr, Bracket):
        expr = Expression.from_bracket(expr)
    return Evaluator(model, map_kind, cumulants).expression(expr)


def _rel(dev, scale):
    return dev / scale if scale > 0 else (0.0 if dev == 0 else np.inf)


def verify_identity(lhs, rhs, model, map_kind, tol=DEFAULT_TOL, cumulants="symbolic"):
    """Evaluate both sides; pass iff max-norm deviation relative to the larger side is within tol."""
    ev = Evaluator(model, map_kind, cumulants)
    a, b = ev.expression(lhs), ev.expression(rhs)
    dev = float(np.max(np.abs(a - b)))
    scale = float(max(np.max(np.abs(a)), np.max(np.abs(b))))
    rel = _rel(dev, scale)
    return VerificationReport(dev, rel, rel <= tol, [("lhs_norm", float(np.max(np.abs(a)))), ("rhs_norm", float(np.max(np.abs(b))))])


def _contiguous(group):
    return list(group) == list(range(group[0], group[-1] + 1))


def verify_cluster_property(n, split, map_kind, model, tol=DEFAULT_TOL, cumulants="symbolic"):
    """
    Check that every cumulant bracket mixing both groups vanishes.

    Atoms 1..n are used; group A is the model's group A restricted to
    them. Mixed brackets are compared with the largest unmixed bracket.
    """
    map_kind = parse_map(map_kind)
    if not 1 <= split < n:
        raise ValidationError(f"split must satisfy 1 <= split < n, got split={split}, n={n}")
    a_set = set(model.group_a) if isinstance(model, SplitModel) and model.group_a else set(range(1, split + 1))
    a_set &= set(range(1, n + 1))
    b_set = set(range(1, n + 1)) - a_set
    if not a_set or not b_set:
        raise ValidationError("both groups must contain atoms among 1..n")
    if map_kind is OrderingMapKind.TTO and not (_contiguous(sorted(a_set)) and _contiguous(sorted(b_set))):
        raise ValidationError("TTO cluster check needs time-contiguous groups (A must be an index interval)")
    ev = Evaluator(model, map_kind, cumulants)
    scale, worst, diag = 0.0, 0.0, []
    for size in range(1, n + 1):
        for sub in combinations(range(1, n + 1), size):
            mixed = bool(a_set & set(sub)) and bool(b_set & set(sub))
            if mixed:
                val = float(np.max(np.abs(ev.bracket(Bracket(sub, CUMULANT)))))
                worst = max(worst, val)
                diag.append((sub, val))
            else:
                for kind in ("m", "c"):
                    scale = max(scale, float(np.max(np.abs(ev.bracket(Bracket(sub, kind))))))
    rel = _rel(worst, scale)
    return VerificationReport(worst, rel, rel <= tol, diag)


def _multiset_sum(model, atoms, power):
    """Sorted words of length `power` over `atoms` with their multinomial counts."""
    out = []
    for ms in combinations_with_replacement(sorted(atoms), power):
        count = factorial(power) // prod(factorial(c) for c in Counter(ms).values())
        out.append((ms, count))
    return out


def verify_unconnected_factorization(order_n, model, tol=DEFAULT_TOL, map_kind=OrderingMapKind.PTO):
    """
    Check {A^k B^m} = {A^k}{B^m} for all k, m >= 1 with k + m <= order_n.

    A and B are the sums of the group-A and group-B atoms. Under a time
    ordering every word is sorted by index; words with repeated atoms
    are kept in place (equal times). Powers are expanded over multisets
    with multinomial counts.
    """
    map_kind = parse_map(map_kind)
    if not isinstance(model, SplitModel):
        raise ValidationError("factorization check needs a SplitModel")
    if not 2 <= order_n <= 6:
        raise ValidationError(f"order_n must be in 2..6, got {order_n}")
    worst_rel, worst_abs, diag = 0.0, 0.0, []
    cache = {}

    def avg(word):
        if word not in cache:
            cache[word] = word_average(model, word)
        return cache[word]

    for k in range(1, order_n):
        a_terms = _multiset_sum(model, model.group_a, k)
        pa = sum(c * avg(w) for w, c in a_terms)
        for m in range(1, order_n - k + 1):
            b_terms = _multiset_sum(model, model.group_b, m)
            pb = sum(c * avg(w) for w, c in b_terms)
            joint = sum(ca * cb * avg(tuple(sorted(wa + wb))) for wa, ca in a_terms for wb, cb in b_terms)
            fact = pa @ pb
            dev = float(np.max(np.abs(joint - fact)))
            rel = _rel(dev, float(max(np.max(np.abs(joint)), np.max(np.abs(fact)))))
            diag.append(((k, m), dev, rel))
            worst_abs, worst_rel = max(worst_abs, dev), max(worst_rel, rel)
    return VerificationReport(worst_abs, worst_rel, worst_rel <= tol, diag)


from .appendix_a import AppendixAReport, appendix_a_demo  # noqa: E402,F401
