"""
Reduced density matrices and their cumulants
============================================

Brute-force RDMs of small fermionic states, their cumulants from the
wedge-product expansion, and the two textbook facts: a single determinant
has no two-body cumulant, and a product of separate subsystems has no
cumulant coupling them.
"""
import numpy as np

from opcumulant import FockVector, compute_rdm, rdm_cumulants, reconstruct_rdm
from opcumulant.fermi import grassmann_table

for p in (2, 3, 4):
    print(f"D{p} =", " + ".join(f"{c}*" + "^".join(f"Delta{r}" for r in ranks) for c, ranks in grassmann_table(p)))

det = FockVector.slater_determinant(6, [1, 3, 4])
deltas = rdm_cumulants(det, 3)
print("\ndeterminant |101100>: max |Delta2| =", deltas[2].max_abs(), " max |Delta3| =", deltas[3].max_abs())

# rotating the orbitals does not change that
rng = np.random.default_rng(0)
u, _ = np.linalg.qr(rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3)))
rot = rdm_cumulants(FockVector.rotated_determinant(u), 2)
print("rotated determinant: max |Delta2| =", f"{rot[2].max_abs():.2e}")

# correlated state: a genuine two-body cumulant, and exact reconstruction
psi = FockVector.random_state(6, 3, seed=1)
deltas = rdm_cumulants(psi, 3)
print("\nrandom 3-electron state: max |Delta2| =", f"{deltas[2].max_abs():.3f}")
for p in (2, 3):
    d = compute_rdm(psi, p)
    err = (reconstruct_rdm(deltas, p) - d).max_abs()
    print(f"  D{p}: trace {d.trace().real:.6f}, reconstruction error {err:.1e}")

# two subsystems on orbitals 1-4 and 5-8
a = FockVector.random_state(4, 2, seed=2)
b = FockVector.random_state(4, 2, seed=3)
prod = FockVector.product_state(a, b)
group_a = [1, 2, 3, 4]
print("\nproduct state: D2 cross block", f"{compute_rdm(prod, 2).cross_block_max(group_a):.3f}",
      " Delta2 cross block", f"{rdm_cumulants(prod, 2)[2].cross_block_max(group_a):.1e}")
