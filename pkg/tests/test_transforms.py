from collections import Counter
from fractions import Fraction
from itertools import product
from math import factorial

import pytest

from opcumulant.combinatorics import SizeProfile, bell_number, enumerate_set_partitions
from opcumulant.errors import EnumerationLimitError, ValidationError
from opcumulant.expr import CUMULANT, Expression, cumulant, equal, moment, parse, render
from opcumulant.ordering import OrderingMapKind
from opcumulant.transforms import (
    ascending_runs,
    cumulants_from_moments_pto_direct,
    cumulants_from_moments_recursive,
    cumulants_from_moments_roerdnik,
    cumulants_from_moments_tto_direct,
    expand_cumulants,
    expand_exp_mo,
    expand_moments,
    meeron_component,
    moments_from_cumulants,
    vanishing_mean_simplification,
)

PTO, TTO, CL, GR = (OrderingMapKind.PTO, OrderingMapKind.TTO, OrderingMapKind.CLASSICAL,
                    OrderingMapKind.GRASSMANN)
MAPS = [CL, PTO, TTO, GR]

# hand-derived by direct partition-sum expansion
PTO_INVERSE_3 = "<1.2.3> + -1*<1.2>*<3> + -1*<1.3>*<2> + -1*<1>*<2.3> + <1>*<2>*<3> + <1>*<3>*<2>"
TTO_INVERSE_3 = "<1.2.3> + -1*<1>*<2.3> + -1*<1.2>*<3> + <1>*<2>*<3>"


def test_moments_n2_pto():
    assert render(moments_from_cumulants(2, PTO)) == "<1.2>_c + <1>*<2>"


def test_moments_n4_tto_contents():
    e = moments_from_cumulants(4, TTO)
    assert len(e) == 8
    terms = {render(Expression((t,))) for t in e.terms}
    assert "<1.2>_c*<3.4>_c" in terms
    assert "<1.3>_c*<2.4>_c" not in terms


def test_moments_grassmann_n4():
    e = moments_from_cumulants(4, GR)
    assert equal(e, parse("<1.2.3.4>_c + <1>^<2>^<3>^<4> + 6*<1.2>_c^<3>^<4> + 4*<1.2.3>_c^<4> + 3*<1.2>_c^<3.4>_c"), GR)


@pytest.mark.parametrize("n", range(1, 7))
def test_grassmann_profiles_equal_merged_partitions(n):
    # merging the Bell(n) PTO terms under the wedge gives the profile form
    from opcumulant.expr import Term

    terms = [Term(1, tuple(cumulant(*b) for b in p.blocks), wedge=len(p) > 1) for p in enumerate_set_partitions(n)]
    assert equal(Expression(terms), moments_from_cumulants(n, GR), GR)


@pytest.mark.parametrize("n", range(1, 8))
def test_term_counts(n):
    assert len(moments_from_cumulants(n, PTO)) == bell_number(n)
    assert len(moments_from_cumulants(n, CL)) == bell_number(n)
    assert len(moments_from_cumulants(n, TTO)) == 2 ** (n - 1)


def test_recursive_small():
    for m in MAPS:
        assert render(cumulants_from_moments_recursive(1, m)) == "<1>"
        assert equal(cumulants_from_moments_recursive(2, m),
                     parse("<1.2> + -1*<1>*<2>") if m is not GR else parse("<1.2> + -1*<1>^<2>"), m)


def test_recursive_n3_pto_matches_frozen():
    assert equal(cumulants_from_moments_recursive(3, PTO), parse(PTO_INVERSE_3), PTO)
    assert len(cumulants_from_moments_recursive(3, PTO)) == 6


def test_direct_formulas_small():
    assert equal(cumulants_from_moments_pto_direct(2), parse("<1.2> + -1*<1>*<2>"), PTO)
    assert equal(cumulants_from_moments_pto_direct(3), parse(PTO_INVERSE_3), PTO)
    assert equal(cumulants_from_moments_tto_direct(3), parse(TTO_INVERSE_3), TTO)
    assert len(cumulants_from_moments_tto_direct(5)) == 16


@pytest.mark.parametrize("n", range(1, 7))
def test_direct_equals_recursive(n):
    assert equal(cumulants_from_moments_pto_direct(n), cumulants_from_moments_recursive(n, PTO), PTO)
    assert equal(cumulants_from_moments_tto_direct(n), cumulants_from_moments_recursive(n, TTO), TTO)


def test_roerdnik_small():
    assert render(cumulants_from_moments_roerdnik(2)) == "<1.2>_c"
    assert render(cumulants_from_moments_roerdnik(3)) == "<1.2.3>_c + -1*<1.3>_c*<2>"
    assert len(cumulants_from_moments_roerdnik(4)) == factorial(3)


def test_ascending_runs():
    assert ascending_runs((1, 4, 3, 2)) == [(1, 4), (3,), (2,)]
    assert ascending_runs((1, 2, 3)) == [(1, 2, 3)]


@pytest.mark.parametrize("n", range(1, 7))
def test_roerdnik_symbolic_equivalence(n):
    # TTO cumulants expanded to moments reproduce the PTO cumulant term by term
    expanded = expand_cumulants(cumulants_from_moments_roerdnik(n), TTO)
    assert equal(expanded, cumulants_from_moments_recursive(n, PTO), PTO)


@pytest.mark.parametrize("m", MAPS)
@pytest.mark.parametrize("n", range(1, 7))
def test_round_trip(m, n):
    top_m = Expression.from_bracket(moment(*range(1, n + 1)))
    top_c = Expression.from_bracket(cumulant(*range(1, n + 1)) if n > 1 else moment(1))
    assert equal(expand_cumulants(moments_from_cumulants(n, m), m), top_m, m)
    assert equal(expand_moments(cumulants_from_moments_recursive(n, m), m), top_c, m)


@pytest.mark.parametrize("n", range(1, 6))
def test_classical_meeron_coefficients(n):
    e = cumulants_from_moments_recursive(n, CL)
    coeffs = {tuple(sorted(f.idx for f in t.factors)): t.coeff for t in e.terms}
    expected = {
        tuple(sorted(p.blocks)): Fraction((-1) ** (len(p) - 1) * factorial(len(p) - 1))
        for p in enumerate_set_partitions(n)
    }
    assert coeffs == expected


def test_meeron_components():
    assert meeron_component(1).render() == "K1"
    assert meeron_component(2).render() == "K2 + 1/2*{K1^2}"
    w = meeron_component(4).weights
    assert w[SizeProfile({4: 1})] == 1
    assert w[SizeProfile({1: 4})] == Fraction(1, 24)
    assert w[SizeProfile({2: 1, 1: 2})] == Fraction(1, 2)
    assert w[SizeProfile({3: 1, 1: 1})] == 1
    assert w[SizeProfile({2: 2})] == Fraction(1, 2)


def brute_exp_words(n):
    # every word (r_1..r_k) drawn from range(1, n+1)**k, weight 1/k!
    acc = Counter()
    for k in range(1, n + 1):
        for word in product(range(1, n + 1), repeat=k):
            if sum(word) == n:
                acc[SizeProfile(Counter(word))] += Fraction(1, factorial(k))
    return dict(acc)


@pytest.mark.parametrize("n", range(1, 7))
def test_exp_expansion_matches_component(n):
    assert expand_exp_mo(n).weights == meeron_component(n).weights == brute_exp_words(n)


@pytest.mark.parametrize("m", MAPS)
@pytest.mark.parametrize("n", [2, 3])
def test_vanishing_mean(m, n):
    assert equal(vanishing_mean_simplification(n, m), Expression.from_bracket(moment(*range(1, n + 1))), m)


def test_vanishing_mean_range():
    with pytest.raises(ValidationError):
        vanishing_mean_simplification(4, PTO)


def test_caps():
    with pytest.raises(EnumerationLimitError):
        moments_from_cumulants(13, PTO)
    with pytest.raises(EnumerationLimitError):
        cumulants_from_moments_tto_direct(25)


def test_forward_contains_only_cumulants():
    for m in MAPS:
        for t in moments_from_cumulants(5, m).terms:
            assert all(f.kind == CUMULANT or len(f) == 1 for f in t.factors)
            assert sum(len(f) for f in t.factors) == 5
