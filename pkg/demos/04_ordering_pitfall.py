"""
Summing before ordering
=======================

A(t) = t C + D with C = y d/dx and D = d/dy on polynomials in x, y.
Squaring A(t1) + A(t2) and then time ordering differs from time ordering
the individual products. Everything here is exact rational arithmetic.
"""
from fractions import Fraction

from opcumulant import appendix_a_demo
from opcumulant.appendix_a import continuous_case, operator_coefficients, operator_matrices

c, d = operator_matrices(6)

for t1, t2 in [(1, 0), (3, 1), (Fraction(5, 2), Fraction(1, 2))]:
    rep = appendix_a_demo(6, t1, t2)
    coeffs = operator_coefficients(rep.discrepancy, c, d)
    print(f"t1={t1} t2={t2}: naive - ordered = {coeffs['DC']}*DC + {coeffs['CD']}*CD")
    print(f"  residual against (t1+t2)(DC-CD): {rep.residual_sum}")
    print(f"  residual against (t1-t2)(DC-CD): {rep.residual_difference}")

# the discrepancy is (t1 - t2)(DC - CD); it coincides with (t1 + t2)(DC - CD) only at t2 = 0

# continuous version on [0, t]: integrate first, or order first
res = continuous_case(c, d, Fraction(1))
for label in ("naive", "ordered"):
    co = operator_coefficients(res[label], c, d)
    print(f"{label:8s} C^2 {co['C^2']}, CD {co['CD']}, DC {co['DC']}, D^2 {co['D^2']}")
print("Gauss-Legendre check of the ordered integral:", res["quadrature_error"])

# with commuting C and D the two routes agree
print("commuting control residual:", appendix_a_demo(4, 3, 1, commuting=True).discrepancy.any())
