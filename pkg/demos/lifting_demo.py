"""Lifting a morphism through a surjective quasi-isomorphism.

The source is T[a, c] over F_5 with dc = a a.  The target A adds an acyclic
pair du = w and perturbs dc by 2 w a; g: A -> A' kills u and w.  Asking for
a lift f of the identity through g forces a correction term on c.  Two
seeded runs give different lifts, and the library connects them by an
explicit homotopy.
"""

from multimodel.ring import Fp
from multimodel.bigraded import BigradedModule
from multimodel.freealg import FreeMultialgebra, AlgebraMorphism, is_algebra_homotopy
from multimodel.lifting import LiftProblem, adams_hilton_lift, lifts_homotopic

R = Fp(5)
S = FreeMultialgebra(BigradedModule(R, [("a", 1, 0), ("c", 2, 1)]), {"c": {("a", "a"): 1}}, 5)
A = FreeMultialgebra(
    BigradedModule(R, [("a", 1, 0), ("c", 2, 1), ("u", 1, 1), ("w", 1, 0)]),
    {"c": {("a", "a"): 1, ("w", "a"): 2}, "u": {("w",): 1}}, 5)
g = AlgebraMorphism(A, S, {"a": {("a",): 1}, "c": {("c",): 1}, "u": {}, "w": {}})
identity = AlgebraMorphism(S, S, {"a": {("a",): 1}, "c": {("c",): 1}})
problem = LiftProblem(S, A, S, g, identity, 4)

first = adams_hilton_lift(problem)
print("f(c) =", first.f.image("c"))
print("residuals:", first.residual_generators or "zero", "| filtration ok:", first.filtration_ok())

second = adams_hilton_lift(problem, seed=7)
print("seeded f(c) =", second.f.image("c"))
K, relative = lifts_homotopic(first, second)
print("connecting homotopy is valid:", not relative.residual_generators and is_algebra_homotopy(K, first.f, second.f))
