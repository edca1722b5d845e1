"""
Ordering pitfall for time-ordered products of summed operators.

With A(t) = t C + D, C = y d/dx and D = d/dy acting on polynomials in
x, y, squaring the sum A(t1) + A(t2) before time ordering differs from
ordering the individual products first. Both routes are evaluated in
exact rational arithmetic on the monomial basis {x^a y^b : a + b <= cap}.
C keeps the total degree and D lowers it, so the truncated matrices act
exactly on the whole space.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ValidationError

MIN_DEGREE = 4


def monomial_basis(cap):
    return [(a, deg - a) for deg in range(cap + 1) for a in range(deg, -1, -1)]


def operator_matrices(cap):
    """Integer matrices of C = y d/dx and D = d/dy on the monomial basis (columns = inputs)."""
    if cap < MIN_DEGREE:
        raise ValidationError(f"degree cap must be >= {MIN_DEGREE} so y^2 d^2/dx^2 acts nontrivially, got {cap}")
    basis = monomial_basis(cap)
    pos = {m: i for i, m in enumerate(basis)}
    n = len(basis)
    c = np.zeros((n, n), dtype=object)
    d = np.zeros((n, n), dtype=object)
    c[:] = Fraction(0)
    d[:] = Fraction(0)
    for j, (a, b) in enumerate(basis):
        if a > 0:
            c[pos[(a - 1, b + 1)], j] = Fraction(a)
        if b > 0:
            d[pos[(a, b - 1)], j] = Fraction(b)
    return c, d


def _max_abs(m):
    return max((abs(x) for x in m.ravel()), default=Fraction(0))


@dataclass
class AppendixAReport:
    t1: Fraction
    t2: Fraction
    naive: np.ndarray = field(repr=False)
    ordered: np.ndarray = field(repr=False)
    discrepancy: np.ndarray = field(repr=False)
    residual_sum: Fraction
    residual_difference: Fraction
    continuous: dict = field(default_factory=dict, repr=False)

    @property
    def passed(self):
        return self.residual_sum == 0


def triangle_integral(a, b, t):
    """int_0^t du1 int_0^u1 du2 u1^a u2^b, exact for rational t."""
    return Fraction(t) ** (a + b + 2) / ((b + 1) * (a + b + 2))


def _ordered_double_integral_exact(c, d, t):
    """2 * int_0^t du1 int_0^u1 du2 (u1 C + D)(u2 C + D), monomial by monomial."""

    def tri(a, b):
        return triangle_integral(a, b, t)

    return 2 * (tri(1, 1) * (c @ c) + tri(1, 0) * (c @ d) + tri(0, 1) * (d @ c) + tri(0, 0) * (d @ d))


def _ordered_double_integral_quadrature(c, d, t, order=8):
    """Same integral by Gauss-Legendre on the triangle 0 <= u2 <= u1 <= t."""
    cf, df = c.astype(float), d.astype(float)
    x, w = np.polynomial.legendre.leggauss(order)
    out = np.zeros(cf.shape)
    for xi, wi in zip(x, w):
        u1 = t * (xi + 1) / 2
        for xj, wj in zip(x, w):
            u2 = u1 * (xj + 1) / 2
            weight = wi * wj * (t / 2) * (u1 / 2)
            out += weight * ((u1 * cf + df) @ (u2 * cf + df))
    return 2 * out


def appendix_a_demo(degree_cap=6, t1=1, t2=0, commuting=False, t=None):
    """
    Compare the naive and the ordered square of A(t1) + A(t2).

    :param degree_cap: largest total degree of the monomial basis, >= 4
    :param t1: later time (exact rational)
    :param t2: earlier time, 0 <= t2 < t1
    :param commuting: replace C and D by the identity, which kills the discrepancy
    :param t: if given, also evaluate the continuous case on [0, t]
    :return: AppendixAReport with exact residuals against (t1+t2)(DC-CD) and (t1-t2)(DC-CD)
    """
    t1, t2 = Fraction(t1), Fraction(t2)
    if not t1 > t2 >= 0:
        raise ValidationError(f"need t1 > t2 >= 0, got t1={t1}, t2={t2}")
    c, d = operator_matrices(degree_cap)
    if commuting:
        eye = np.identity(c.shape[0], dtype=object) * Fraction(1)
        c, d = eye, eye.copy()
    s = (t1 + t2) * c + 2 * d
    naive = s @ s
    a1, a2 = t1 * c + d, t2 * c + d
    # time ordering puts the later time on the left
    ordered = a1 @ a1 + 2 * (a1 @ a2) + a2 @ a2
    disc = naive - ordered
    comm = d @ c - c @ d
    report = AppendixAReport(
        t1, t2, naive, ordered, disc,
        residual_sum=_max_abs(disc - (t1 + t2) * comm),
        residual_difference=_max_abs(disc - (t1 - t2) * comm),
    )
    if t is not None:
        report.continuous = continuous_case(c, d, Fraction(t))
    return report


def continuous_case(c, d, t):
    """Naive and ordered square of int_0^t A(u) du with the expected closed forms."""
    s = t ** 2 / 2 * c + t * d
    naive = s @ s
    ordered = _ordered_double_integral_exact(c, d, t)
    quad = _ordered_double_integral_quadrature(c, d, float(t))
    expect_ordered = t ** 4 / 4 * (c @ c) + t ** 3 / 3 * (2 * (c @ d) + d @ c) + t ** 2 * (d @ d)
    expect_naive = t ** 4 / 4 * (c @ c) + t ** 3 / 2 * (c @ d + d @ c) + t ** 2 * (d @ d)
    # coefficients of C D and D C in each route
    return {
        "t": t,
        "naive": naive,
        "ordered": ordered,
        "residual_ordered": _max_abs(ordered - expect_ordered),
        "residual_naive": _max_abs(naive - expect_naive),
        "quadrature_error": float(np.max(np.abs(quad - ordered.astype(float)))),
        "ordered_mixed": (2 * triangle_integral(1, 0, t), 2 * triangle_integral(0, 1, t)),
        "naive_mixed": (t ** 3 / 2, t ** 3 / 2),
    }


def operator_coefficients(mat, c, d):
    """
    Coefficients of `mat` on the words C^2, CD, DC, D^2, checked exactly.

    The four words are linearly independent on the monomial space for
    degree caps >= 4; a float least-squares solve proposes rationals and
    the exact reconstruction confirms them.
    """
    words = {"C^2": c @ c, "CD": c @ d, "DC": d @ c, "D^2": d @ d}
    basis = np.stack([w.astype(float).ravel() for w in words.values()], axis=1)
    sol, *_ = np.linalg.lstsq(basis, mat.astype(float).ravel(), rcond=None)
    coeffs = {k: Fraction(float(x)).limit_denominator(10 ** 6) for k, x in zip(words, sol)}
    rebuilt = sum(coeffs[k] * w for k, w in words.items())
    if _max_abs(rebuilt - mat) != 0:
        raise ValidationError("matrix is not an exact combination of C^2, CD, DC, D^2")
    return coeffs
