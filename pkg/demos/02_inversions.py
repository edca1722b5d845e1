"""
Inverting the moment expansions
===============================

The cumulant <1...n>_c in moment brackets: the triangular recursion
against the closed forms for PTO and TTO, then run splitting.
"""
import numpy as np

from opcumulant import (
    build_random_model,
    cumulants_from_moments_pto_direct,
    cumulants_from_moments_recursive,
    cumulants_from_moments_roerdnik,
    cumulants_from_moments_tto_direct,
    equal,
    evaluate,
    expand_cumulants,
    render,
)

for n in (2, 3):
    print(f"n={n} pto:", render(cumulants_from_moments_recursive(n, "pto")))
    print(f"n={n} tto:", render(cumulants_from_moments_recursive(n, "tto")))

# closed forms agree with the recursion term by term
for n in range(1, 7):
    ok_p = equal(cumulants_from_moments_pto_direct(n), cumulants_from_moments_recursive(n, "pto"), "pto")
    ok_t = equal(cumulants_from_moments_tto_direct(n), cumulants_from_moments_recursive(n, "tto"), "tto")
    print(f"n={n}: pto direct {ok_p}, tto direct {ok_t}, tto terms {len(cumulants_from_moments_tto_direct(n))}")

# run splitting writes the PTO cumulant with TTO cumulant brackets
print("\nrun splitting n=4:", render(cumulants_from_moments_roerdnik(4)))
for n in range(2, 7):
    back = expand_cumulants(cumulants_from_moments_roerdnik(n), "tto")
    print(f"  n={n} expands to the PTO inversion: {equal(back, cumulants_from_moments_recursive(n, 'pto'), 'pto')}")

# and numerically, on a random non-commuting model
model = build_random_model(dim=4, n_atoms=4, n_samples=3, seed=0)
lhs = evaluate(cumulants_from_moments_roerdnik(4), model, "tto")
rhs = evaluate(cumulants_from_moments_recursive(4, "pto"), model, "pto")
print("max |difference| on a 4x4 model:", np.max(np.abs(lhs - rhs)))

# classical mode recovers the familiar (-1)^(p-1) (p-1)! weights
print("\nclassical n=4:", render(cumulants_from_moments_recursive(4, "classical")))
