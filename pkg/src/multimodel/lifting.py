"""Lifting algebra maps out of free multialgebras through weak multiequivalences.

Given ``g: A -> A'`` and ``f': T[V] -> A'`` the lift is a morphism
``f: T[V] -> A`` together with a multihomotopy ``h: f' ~ g f``, that is an
``f'``-``gf``-derivation with ``d h + h d = g f - f'``.  Generators are
handled by column stage first and degree second.  For a generator ``v`` at
column ``c`` and degree ``n`` the step

(a) solves ``d x = f(dv)`` for ``x`` in ``F_c A``;
(b) solves jointly for a cycle ``z`` in ``F_c A`` and ``y`` in ``F_{c+1} A'``
    with ``g(x + z) - d y = f'(v) + h(dv)``,

and sets ``f(v) = x + z``, ``h(v) = y``.  Failure of either step raises
:class:`UnsolvableStep`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .ring import solve_linear, kernel_basis
from .freealg import (AlgebraMorphism, Derivation, FreeMultialgebra, add, sub, cylinder,
                      homotopy_from_cylinder)

__all__ = ["UnsolvableStep", "LinearMap", "LiftProblem", "LiftSolution", "adams_hilton_lift",
           "lifts_homotopic"]


class UnsolvableStep(ValueError):
    """A lifting step has no solution: ``g`` fails to be a weak equivalence near ``(q, n)``."""

    def __init__(self, q, n, generator, stage):
        super().__init__(f"no solution at column stage {q}, degree {n} (generator {generator}, step {stage})")
        self.q = q
        self.n = n
        self.generator = generator
        self.stage = stage


class LinearMap:
    """Map between algebras given on basis keys; used when ``A`` is not free."""

    def __init__(self, source, target, images):
        self.source = source
        self.target = target
        self.images = images

    def apply(self, a):
        R = self.target.ring
        out = {}
        for k, c in a.items():
            out = add(R, out, self.images.get(k, {}), c)
        return out


@dataclass
class LiftProblem:
    source: FreeMultialgebra
    A: object
    A_prime: object
    g: object
    f_prime: AlgebraMorphism
    max_degree: int


@dataclass
class LiftSolution:
    f: AlgebraMorphism
    h: Derivation
    problem: LiftProblem
    residual_generators: list = field(default_factory=list)

    def residuals(self):
        """Generators where ``d h + h d = g f - f'`` or the chain condition fails."""
        P = self.problem
        S = P.source
        R = S.ring
        bad = []
        for v in _generators_in_order(S, P.max_degree):
            dv = S.d({(v,): 1})
            if sub(R, P.A.d(self.f.image(v)), self.f.apply(dv)):
                bad.append((v, "chain"))
            lhs = add(R, P.A_prime.d(self.h.values.get(v, {})), self.h.apply(dv))
            rhs = sub(R, P.g.apply(self.f.image(v)), P.f_prime.image(v))
            if sub(R, lhs, rhs):
                bad.append((v, "homotopy"))
        return bad

    def filtration_ok(self):
        """All components of ``f`` have index ``>= 0`` and those of ``h`` index ``>= -1``."""
        P = self.problem
        S = P.source
        for v in _generators_in_order(S, P.max_degree):
            c = _column(S, v)
            if any(P.A.key_column(k) > c for k in self.f.image(v)):
                return False
            if any(P.A_prime.key_column(k) > c + 1 for k in self.h.values.get(v, {})):
                return False
        return True


def _column(S, v):
    return S.generators.column(S.generators.index[v])


def _generators_in_order(S, max_degree):
    gens = [v for v in S.generator_names() if S.generator_degree(v) <= max_degree]
    return sorted(gens, key=lambda v: (_column(S, v), S.generator_degree(v), S._order[v]))


class _Images:
    """Cached images of basis keys under a linear operator."""

    def __init__(self, op):
        self.op = op
        self.cache = {}

    def __call__(self, k):
        if k not in self.cache:
            self.cache[k] = self.op({k: 1})
        return self.cache[k]


def _solve(R, columns, rhs, rng=None):
    """Solve ``sum_j x_j columns[j] = rhs`` for sparse columns; returns coefficients or None.

    With ``rng`` a random element of the solution kernel is added.
    """
    rows = {}
    for col in columns:
        for k in col:
            rows.setdefault(k, len(rows))
    for k in rhs:
        if k not in rows:
            rows.setdefault(k, len(rows))
    if not columns:
        return [] if not any(rhs.values()) else None
    if not rows:
        return [R.zero()] * len(columns)
    A = [[R.zero()] * len(columns) for _ in rows]
    for j, col in enumerate(columns):
        for k, v in col.items():
            A[rows[k]][j] = v
    b = [R.zero()] * len(rows)
    for k, v in rhs.items():
        b[rows[k]] = v
    x = solve_linear(R, A, b, ncols=len(columns))
    if x is not None and rng is not None:
        for k in kernel_basis(R, A, len(columns)):
            c = rng.randrange(3)
            x = [R(a + c * v) for a, v in zip(x, k)]
    return x


def adams_hilton_lift(P: LiftProblem, fixed_f=None, fixed_h=None, seed=None) -> LiftSolution:
    """Lift ``f'`` through ``g`` on generators of degree ``<= P.max_degree``.

    ``fixed_f``/``fixed_h`` prescribe values on some generators (used for
    relative lifts); they are taken as given and checked afterwards.  A
    ``seed`` adds random kernel elements at every step, which gives a
    different (homotopic) lift.
    """
    S, A, B, g = P.source, P.A, P.A_prime, P.g
    R = S.ring
    rng = random.Random(seed) if seed is not None else None
    f = AlgebraMorphism(S, A, dict(fixed_f or {}))
    gf = _Composite(g, f, B)
    h = Derivation(S, B, dict(fixed_h or {}), 1, P.f_prime, gf)
    dA = _Images(A.d)
    dB = _Images(B.d)
    gk = _Images(g.apply)
    for v in _generators_in_order(S, P.max_degree):
        if fixed_f and v in fixed_f:
            continue
        n = S.generator_degree(v)
        c = _column(S, v)
        dv = S.d({(v,): 1})
        keysA = [k for k in A.basis_in_degree(n) if A.key_column(k) <= c]
        keysB = [k for k in B.basis_in_degree(n + 1) if B.key_column(k) <= c + 1]
        # (a) x with d x = f(dv)
        target = f.apply(dv)
        sol = _solve(R, [dA(k) for k in keysA], target, rng)
        if sol is None:
            raise UnsolvableStep(c, n, v, "a")
        x = {k: a for k, a in zip(keysA, sol) if a}
        # (b) cycle z and y with g z - d y = f'(v) + h(dv) - g x
        rhs = sub(R, add(R, P.f_prime.image(v), h.apply(dv)), g.apply(x))
        cols = []
        for k in keysA:
            col = {("A", t): a for t, a in dA(k).items()}
            col.update({("B", t): a for t, a in gk(k).items()})
            cols.append(col)
        for k in keysB:
            cols.append({("B", t): R(-a) for t, a in dB(k).items()})
        sol = _solve(R, cols, {("B", t): a for t, a in rhs.items()}, rng)
        if sol is None:
            raise UnsolvableStep(c, n, v, "b")
        z = {k: a for k, a in zip(keysA, sol[:len(keysA)]) if a}
        y = {k: a for k, a in zip(keysB, sol[len(keysA):]) if a}
        f.images[v] = add(R, x, z)
        f._cache = {(): A.one()}
        gf.reset()
        h.values[v] = y
        h._cache = {}
    f = AlgebraMorphism(S, A, f.images)
    gf = _Composite(g, f, B)
    h = Derivation(S, B, h.values, 1, P.f_prime, gf)
    sol = LiftSolution(f, h, P)
    sol.residual_generators = sol.residuals()
    return sol


class _Composite:
    """``g o f`` exposed with the ``apply_word``/``image`` interface of a morphism."""

    def __init__(self, g, f, target):
        self.g = g
        self.f = f
        self.target = target
        self._cache = {}

    def reset(self):
        self._cache = {}

    def apply_word(self, w):
        if w not in self._cache:
            self._cache[w] = self.g.apply(self.f.apply_word(w))
        return self._cache[w]

    def image(self, v):
        return self.apply_word((v,))

    def apply(self, a):
        return self.g.apply(self.f.apply(a))


def lifts_homotopic(s1: LiftSolution, s2: LiftSolution):
    """Multihomotopy ``K: f_1 ~ f_2`` between two lifts of the same problem.

    This is a relative lift on the cylinder of the source: ``f`` is fixed
    to ``f_1``/``f_2`` on ``V'``/``V''`` (and ``h`` to ``h_1``/``h_2``), the
    target map is ``f' p`` with ``p`` the projection collapsing the
    cylinder, and the values on ``sV`` give ``K``.  ``K`` is defined on
    generators of degree ``< max_degree``.
    """
    P = s1.problem
    S = P.source
    cyl = cylinder(S)
    C = cyl.algebra
    proj = {}
    for v in S.generator_names():
        proj[v + "'"] = {(v,): 1}
        proj[v + "''"] = {(v,): 1}
    fp = AlgebraMorphism(C, P.A_prime, {k: P.f_prime.apply(img) for k, img in proj.items()})
    fixed_f, fixed_h = {}, {}
    for v in S.generator_names():
        fixed_f[v + "'"] = s1.f.image(v)
        fixed_f[v + "''"] = s2.f.image(v)
        fixed_h[v + "'"] = s1.h.values.get(v, {})
        fixed_h[v + "''"] = s2.h.values.get(v, {})
    Q = LiftProblem(C, P.A, P.A_prime, P.g, fp, P.max_degree)
    sol = adams_hilton_lift(Q, fixed_f, fixed_h)
    images = dict(sol.f.images)
    for v in S.generator_names():
        if S.generator_degree(v) + 1 > P.max_degree:
            images.pop("s" + v, None)
    H = AlgebraMorphism(C, P.A, images)
    f1, f2, K = homotopy_from_cylinder(cyl, H)
    return K, sol
