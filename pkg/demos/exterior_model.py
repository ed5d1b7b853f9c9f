"""The minimal model of an exterior algebra over F_3.

A = F_3[x]/(x^2) with x in degree 1 and zero differential.  Its bar
construction has one word x^k in each degree 2k, so J BA has homology of
rank one in every even degree and the model T[V] has one generator z_k in
each odd degree, with d'(z_k) a sum of products z_i z_j.
"""

from multimodel.ring import Fp
from multimodel.barcobar import exterior_dga, homology_JBA
from multimodel.model import minimal_multimodel, certify

R = Fp(3)
A = exterior_dga(R, 6)

print("homology of J BA (length per degree):")
for n in range(1, 7):
    print(f"  degree {n}: {homology_JBA(A, n).length()}")

M = minimal_multimodel(A, 6)
T = M.algebra
print("\ngenerators (name, column, row):")
for g, c, r in T.generators.basis:
    print(f"  {g}: ({c}, {r}), total degree {c + r}")

print("\ndifferential:")
for g in T.generator_names():
    terms = T.differential.get(g, {})
    text = " + ".join(f"{R.format_scalar(v)}*{'.'.join(w)}" for w, v in sorted(terms.items())) or "0"
    print(f"  d'({g}) = {text}")

print("\ncertificates:")
for key, value in certify(M).items():
    print(f"  {key}: {value}")
