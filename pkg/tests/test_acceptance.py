"""
Acceptance suite: one criterion marker per check, summarized at the end of
the run by the hook in conftest.py.

Reference tables are transcribed literally as factor sequences, so the
comparison covers factor order as well as term content.
"""
import sys
import time
from collections import Counter
from fractions import Fraction
from itertools import combinations
from math import comb, factorial

import numpy as np
import pytest

from opcumulant.combinatorics import SizeProfile, enumerate_set_partitions
from opcumulant.expr import CUMULANT, Expression, cumulant, equal, moment
from opcumulant.fermi import (
    FockVector,
    compute_rdm,
    grassmann_table,
    rdm_cumulants,
    reconstruct_rdm,
)
from opcumulant.models import OperatorModel, build_random_model, build_split_model
from opcumulant.numeric import (
    evaluate,
    verify_cluster_property,
    verify_identity,
    verify_unconnected_factorization,
)
from opcumulant.appendix_a import appendix_a_demo, continuous_case, operator_coefficients, operator_matrices
from opcumulant.ordering import OrderingMapKind
from opcumulant.transforms import (
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

# pinned tolerances
TOL_NUMERIC = 1e-10
TOL_FERMI = 1e-12
TOL_RECONSTRUCT = 1e-10
CONTROL_FLOOR = 1e-3
FERMI_BUDGET_S = 60.0

criterion = pytest.mark.criterion


def factors_of(expr):
    return Counter(tuple(f.idx for f in t.factors) for t in expr.terms)


# reference moment tables, factor order preserved
PTO_TABLE = {
    2: [[(1, 2)], [(1,), (2,)]],
    3: [[(1, 2, 3)], [(1,), (2,), (3,)],
        [(1, 2), (3,)], [(1, 3), (2,)], [(1,), (2, 3)]],
    4: [[(1, 2, 3, 4)], [(1,), (2,), (3,), (4,)],
        [(1, 2, 3), (4,)], [(1,), (2, 3, 4)], [(1, 3, 4), (2,)], [(1, 2, 4), (3,)],
        [(1, 2), (3, 4)], [(1, 3), (2, 4)], [(1, 4), (2, 3)],
        [(1, 2), (3,), (4,)], [(1, 3), (2,), (4,)], [(1, 4), (2,), (3,)],
        [(1,), (2, 3), (4,)], [(1,), (2,), (3, 4)], [(1,), (2, 4), (3,)]],
}
TTO_TABLE_4 = [
    [(1, 2, 3, 4)], [(1,), (2,), (3,), (4,)],
    [(1, 2, 3), (4,)], [(1,), (2, 3, 4)],
    [(1, 2), (3, 4)],
    [(1, 2), (3,), (4,)], [(1,), (2, 3), (4,)], [(1,), (2,), (3, 4)],
]


def _shape(term):
    return tuple(sorted((len(b) for b in term), reverse=True))


# 1

@criterion(1, "PTO moment tables n=2,3,4 match term for term")
@pytest.mark.parametrize("n", [2, 3, 4])
def test_pto_tables(n):
    expr = moments_from_cumulants(n, PTO)
    assert len(expr) == {2: 2, 3: 5, 4: 15}[n]
    assert factors_of(expr) == Counter(tuple(t) for t in PTO_TABLE[n])
    assert all(t.coeff == 1 for t in expr.terms)
    # cumulant brackets of size >= 2, singleton brackets normalized to moments
    for t in expr.terms:
        assert all((f.kind == CUMULANT) == (len(f) > 1) for f in t.factors)


# 2

@criterion(2, "TTO table n=4 has 8 terms with reductions 4->2, 3->1, 6->3; 2^(n-1) direct terms")
def test_tto_table():
    expr = moments_from_cumulants(4, TTO)
    assert len(expr) == 8
    assert factors_of(expr) == Counter(tuple(t) for t in TTO_TABLE_4)
    pto_groups = Counter(_shape(t) for t in PTO_TABLE[4])
    tto_groups = Counter(_shape(tuple(f.idx for f in t.factors)) for t in expr.terms)
    assert [(pto_groups[s], tto_groups[s]) for s in [(3, 1), (2, 2), (2, 1, 1)]] == [(4, 2), (3, 1), (6, 3)]


@criterion(2, "TTO table n=4 has 8 terms with reductions 4->2, 3->1, 6->3; 2^(n-1) direct terms")
@pytest.mark.parametrize("n", range(1, 9))
def test_tto_direct_term_count(n):
    assert len(cumulants_from_moments_tto_direct(n)) == 2 ** (n - 1)


# 3

@criterion(3, "round trip to the bare bracket for all maps, n <= 6")
@pytest.mark.parametrize("m", [CL, PTO, TTO, GR])
@pytest.mark.parametrize("n", range(1, 7))
def test_round_trip(m, n):
    top_m = Expression.from_bracket(moment(*range(1, n + 1)))
    top_c = Expression.from_bracket(cumulant(*range(1, n + 1)))
    assert equal(expand_cumulants(moments_from_cumulants(n, m), m), top_m, m)
    assert equal(expand_moments(cumulants_from_moments_recursive(n, m), m), top_c, m)


# 4

@criterion(4, "pto_direct = recursive symbolically (n <= 5); run splitting = PTO numerically")
@pytest.mark.parametrize("n", range(1, 6))
def test_pto_direct_symbolic(n):
    assert equal(cumulants_from_moments_pto_direct(n), cumulants_from_moments_recursive(n, PTO), PTO)


@criterion(4, "pto_direct = recursive symbolically (n <= 5); run splitting = PTO numerically")
@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("n", range(2, 6))
def test_roerdnik_numeric(seed, n):
    model = build_random_model(4, n, 3, seed)
    lhs = evaluate(cumulants_from_moments_roerdnik(n), model, TTO, cumulants="recursive")
    rhs = evaluate(cumulants_from_moments_recursive(n, PTO), model, PTO)
    assert np.max(np.abs(lhs - rhs)) <= TOL_NUMERIC * np.max(np.abs(rhs))


# 5

@criterion(5, "Classical inversion has coefficients (-1)^(p-1) (p-1)!")
@pytest.mark.parametrize("n", range(1, 6))
def test_meeron_coefficients(n):
    got = {tuple(sorted(f.idx for f in t.factors)): t.coeff for t in cumulants_from_moments_recursive(n, CL).terms}
    want = {tuple(sorted(p.blocks)): Fraction((-1) ** (len(p) - 1) * factorial(len(p) - 1))
            for p in enumerate_set_partitions(n)}
    assert got == want


# 6

def _identities(n):
    top_m = Expression.from_bracket(moment(*range(1, n + 1)))
    top_c = Expression.from_bracket(cumulant(*range(1, n + 1)))
    for m in (CL, PTO, TTO):
        yield m, moments_from_cumulants(n, m), top_m, "symbolic"
        yield m, cumulants_from_moments_recursive(n, m), top_c, "recursive"
    yield PTO, cumulants_from_moments_pto_direct(n), top_c, "recursive"
    yield TTO, cumulants_from_moments_tto_direct(n), top_c, "recursive"


def _model_for(m, n, seed):
    return build_random_model(4, n, 3, seed, commuting=m is CL)


@criterion(6, "identity suite n <= 5 on Classical/PTO/TTO at 1e-10; dropped-term mutants fail")
@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("n", range(1, 6))
def test_identity_suite(seed, n):
    for m, lhs, rhs, mode in _identities(n):
        rep = verify_identity(lhs, rhs, _model_for(m, n, seed), m, TOL_NUMERIC, cumulants=mode)
        assert rep.passed, (m, n, rep.summary())


@criterion(6, "identity suite n <= 5 on Classical/PTO/TTO at 1e-10; dropped-term mutants fail")
@pytest.mark.parametrize("n", range(2, 6))
def test_identity_mutants(n):
    for m, lhs, rhs, mode in _identities(n):
        model = _model_for(m, n, 0)
        for k in range(len(lhs)):
            mutant = Expression(t for j, t in enumerate(lhs.terms) if j != k)
            assert not verify_identity(mutant, rhs, model, m, TOL_NUMERIC, cumulants=mode).passed


# 7

@criterion(7, "mixed cumulants of order <= 5 vanish on product models; correlated controls >= 1e-3")
@pytest.mark.parametrize("m", [PTO, TTO])
@pytest.mark.parametrize("n", range(2, 6))
def test_cluster(m, n):
    for split in range(1, n):
        model = build_split_model(4, split, seeds=(3 * n + split, 100 + split), n_atoms=n)
        rep = verify_cluster_property(n, split, m, model, TOL_NUMERIC)
        assert rep.passed, rep.summary()


@criterion(7, "mixed cumulants of order <= 5 vanish on product models; correlated controls >= 1e-3")
@pytest.mark.parametrize("m", [PTO, TTO])
@pytest.mark.parametrize("n", range(2, 6))
def test_cluster_controls(m, n):
    model = build_split_model(4, 1, seeds=(7, 8), n_atoms=n, correlated=True)
    rep = verify_cluster_property(n, 1, m, model, TOL_NUMERIC)
    assert not rep.passed and rep.max_abs_deviation >= CONTROL_FLOOR


# 8

@criterion(8, "per-order factorization for k+m <= 6 on split models; fails on correlated models")
@pytest.mark.parametrize("split", [1, 2, 3])
def test_factorization(split):
    model = build_split_model(3, split, seeds=(11, 12), n_atoms=2 * split)
    rep = verify_unconnected_factorization(6, model, TOL_NUMERIC)
    assert rep.passed, rep.summary()
    orders = {km for km, _, _ in rep.diagnostics}
    assert orders == {(k, m) for k in range(1, 6) for m in range(1, 6) if k + m <= 6}


@criterion(8, "per-order factorization for k+m <= 6 on split models; fails on correlated models")
def test_factorization_control():
    model = build_split_model(3, 2, seeds=(11, 12), n_atoms=4, correlated=True)
    assert not verify_unconnected_factorization(6, model, TOL_NUMERIC).passed


# 9

@criterion(9, "ordering pitfall: discrete discrepancy = (t1+t2)(DC-CD); continuous coefficients")
@pytest.mark.parametrize("t1, t2", [(1, 0), (2, 0), (3, 1), (2, Fraction(1, 2)), (Fraction(5, 3), Fraction(2, 3))])
def test_discrete_discrepancy(t1, t2):
    rep = appendix_a_demo(6, t1, t2)
    assert rep.residual_sum == 0, (
        f"t1={t1} t2={t2}: residual vs (t1+t2)(DC-CD) = {rep.residual_sum}, "
        f"vs (t1-t2)(DC-CD) = {rep.residual_difference}")


@criterion(9, "ordering pitfall: discrete discrepancy = (t1+t2)(DC-CD); continuous coefficients")
def test_continuous_coefficients():
    c, d = operator_matrices(6)
    res = continuous_case(c, d, Fraction(1))
    ordered = operator_coefficients(res["ordered"], c, d)
    naive = operator_coefficients(res["naive"], c, d)
    # 1/3 (2 CD + DC) ordered against 1/2 (CD + DC) naive
    assert (ordered["CD"], ordered["DC"]) == (Fraction(2, 3), Fraction(1, 3))
    assert (naive["CD"], naive["DC"]) == (Fraction(1, 2), Fraction(1, 2))
    assert res["residual_ordered"] == 0 and res["residual_naive"] == 0


# 10

@criterion(10, "exponential expansion at order n equals the moment component; n=4 weights")
@pytest.mark.parametrize("n", range(1, 6))
def test_exponential_component(n):
    assert expand_exp_mo(n).weights == meeron_component(n).weights


@criterion(10, "exponential expansion at order n equals the moment component; n=4 weights")
def test_component_weights_4():
    w = meeron_component(4).weights
    got = [w[SizeProfile(p)] for p in ({4: 1}, {1: 4}, {2: 1, 1: 2}, {3: 1, 1: 1}, {2: 2})]
    assert got == [1, Fraction(1, 24), Fraction(1, 2), 1, Fraction(1, 2)]


# 11

@pytest.fixture(scope="module")
def fermi_clock():
    start = time.perf_counter()
    yield
    assert time.perf_counter() - start <= FERMI_BUDGET_S


@criterion(11, "fermionic cumulant suite: determinants, products, reconstruction, traces, table")
def test_determinants(fermi_clock):
    for m in range(2, 9):
        for n in range(2, min(m, 4) + 1):
            for occ in combinations(range(1, m + 1), n):
                deltas = rdm_cumulants(FockVector.slater_determinant(m, occ), 2)
                assert deltas[2].max_abs() < TOL_FERMI, (m, occ)


@criterion(11, "fermionic cumulant suite: determinants, products, reconstruction, traces, table")
@pytest.mark.parametrize("ma, na, mb, nb", [(4, 2, 4, 2), (3, 1, 3, 2), (4, 1, 4, 3), (2, 1, 4, 2)])
def test_product_cross_blocks(fermi_clock, ma, na, mb, nb):
    a = FockVector.random_state(ma, na, seed=ma + na)
    b = FockVector.random_state(mb, nb, seed=10 + mb + nb)
    psi = FockVector.product_state(a, b)
    group_a = list(range(1, ma + 1))
    deltas = rdm_cumulants(psi, 2)
    assert deltas[2].cross_block_max(group_a) < TOL_FERMI
    # D2 itself couples the groups
    assert compute_rdm(psi, 2).cross_block_max(group_a) > CONTROL_FLOOR


@criterion(11, "fermionic cumulant suite: determinants, products, reconstruction, traces, table")
@pytest.mark.parametrize("seed", range(10))
def test_reconstruction(fermi_clock, seed):
    psi = FockVector.random_state(6, 3, seed)
    deltas = rdm_cumulants(psi, 3)
    for p in (2, 3):
        d = compute_rdm(psi, p)
        assert (reconstruct_rdm(deltas, p) - d).max_abs() < TOL_RECONSTRUCT
        assert abs(d.trace() - comb(3, p)) < TOL_FERMI


@criterion(11, "fermionic cumulant suite: determinants, products, reconstruction, traces, table")
@pytest.mark.parametrize("m, n", [(4, 2), (5, 3), (6, 4)])
def test_traces(fermi_clock, m, n):
    psi = FockVector.random_state(m, n, seed=m * n)
    for p in range(1, min(n, 3) + 1):
        assert abs(compute_rdm(psi, p).trace() - comb(n, p)) < TOL_FERMI


@criterion(11, "fermionic cumulant suite: determinants, products, reconstruction, traces, table")
def test_wedge_table():
    t3 = {r: c for c, r in grassmann_table(3)}
    t4 = {r: c for c, r in grassmann_table(4)}
    assert t3[(2, 1)] == 3
    assert (t4[(3, 1)], t4[(2, 1, 1)], t4[(2, 2)]) == (4, 6, 3)


# 12

def _centered(model):
    ops = {i: a - np.tensordot(model.w, a, axes=1)[None] for i, a in model.ops.items()}
    return OperatorModel(model.dim, model.weights, ops)


@criterion(12, "with singleton brackets nulled, K2 = M2 and K3 = M3 for every map")
@pytest.mark.parametrize("m", [CL, PTO, TTO, GR])
@pytest.mark.parametrize("n", [2, 3])
def test_zero_mean_symbolic(m, n):
    assert equal(vanishing_mean_simplification(n, m), Expression.from_bracket(moment(*range(1, n + 1))), m)


@criterion(12, "with singleton brackets nulled, K2 = M2 and K3 = M3 for every map")
@pytest.mark.parametrize("m", [CL, PTO, TTO])
@pytest.mark.parametrize("n", [2, 3])
def test_zero_mean_numeric(m, n):
    model = _centered(build_random_model(3, n, 4, seed=n, commuting=m is CL))
    k = evaluate(cumulant(*range(1, n + 1)), model, m, cumulants="recursive")
    mo = evaluate(moment(*range(1, n + 1)), model, m)
    assert np.max(np.abs(k - mo)) <= TOL_NUMERIC * np.max(np.abs(mo))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
