"""A non-field example: torsion homology over Z/9.

A has x in degree 1 and y in degree 2 with dy = 3x, so H_1(A) = Z/3 is not
free over Z/9.  Each homology block of J BA gets a minimal resolution
(... -> R -> R with every map 3), and the blocks are glued into one
multicomplex FH.  The gluing forces a unit entry in the lowest component,
so the resulting model is correct on homology but not minimal, and the
filtered weak-equivalence check does not hold stage by stage.
"""

from multimodel.ring import Zmod
from multimodel.barcobar import torsion_dga, homology_JBA
from multimodel.model import assemble_FH, minimal_multimodel, certify

R = Zmod(3, 2)
A = torsion_dga(R, 5)

print("homology of J BA:")
for n in range(1, 6):
    H = homology_JBA(A, n)
    print(f"  degree {n}: length {H.length()}, {H.cardinality()} elements")

FHA = assemble_FH(A, 5)
print("\nresolution of the degree-2 block:", FHA.resolutions[2].deltas[:3], "...")
print("theta(e2.2.0) =", dict(FHA.theta["e2.2.0"]))

M = minimal_multimodel(A, 5)
c = certify(M)
print("\nd'^2:", c["d_squared"])
print("comparison is a chain map:", c["comparison_chain_map"])
print("homology isomorphism by degree:", c["homology_iso"])
print("minimal:", c["minimal"])
print("filtered stages that are not isomorphisms:",
      [t[:2] for t in c["weak_equivalence"] if t[2] != "iso"])
