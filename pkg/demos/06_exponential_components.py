"""
Order-n components of an ordered exponential
============================================

Expanding the ordered exponential of K1 + K2 + ... and collecting order n
gives each size profile the weight prod_r 1/s_r!, independent of the map.
"""
from opcumulant import expand_exp_mo, meeron_component

for n in range(1, 6):
    comp = expand_exp_mo(n)
    assert comp.weights == meeron_component(n).weights
    print(f"M{n} = {comp.render()}")
