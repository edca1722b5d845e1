"""
Moment tables under four ordering maps
======================================

A moment bracket <1.2...n> expanded in cumulant products. The map decides
which groupings survive and in which order the factors are written.
"""
from collections import Counter

from opcumulant import moments_from_cumulants, render
from opcumulant.combinatorics import bell_number

for name in ("classical", "pto", "tto", "grassmann"):
    print(f"--- {name}")
    for n in (2, 3):
        print(f"  <{'.'.join(map(str, range(1, n + 1)))}> =", render(moments_from_cumulants(n, name)))

# n = 4: PTO keeps all Bell(4) = 15 groupings, TTO only the 2^3 = 8 contiguous ones
pto, tto = moments_from_cumulants(4, "pto"), moments_from_cumulants(4, "tto")
print(f"\nn=4 term counts: pto {len(pto)} (Bell {bell_number(4)}), tto {len(tto)}")


def shapes(expr):
    return Counter(tuple(sorted((len(f) for f in t.factors), reverse=True)) for t in expr.terms)


# which block shapes lose terms when passing from PTO to TTO
sp, st = shapes(pto), shapes(tto)
for shape in sorted(sp, key=lambda s: (len(s), s)):
    print(f"  blocks {shape}: {sp[shape]} -> {st[shape]}")

# Grassmann merges a whole size profile into one wedge term with a multiplicity
print("\ngrassmann n=4:", render(moments_from_cumulants(4, "grassmann")))
