"""Multicomplexes, their total complexes, morphisms and homotopies.

A multicomplex is a bigraded module with a degree ``-1`` multimorphism
``d = d^0 + d^1 + ...`` satisfying ``d d = 0`` componentwise.

Morphisms satisfy ``d f - f d = 0`` and a multihomotopy ``h: f ~ g``
satisfies ``d h + h d = g - f``; both identities are checked as
multimorphisms, component by component.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .bigraded import (BigradedModule, Multimorphism, compose, invert,
                       components_of_graded_map, NotInvertible)
from .ring import Subquotient, induced_map_is_iso, kernel_basis, identity, transpose

__all__ = [
    "ChainComplex", "Multicomplex", "ValidationReport", "validate", "total",
    "associated_multicomplex", "from_filtered_differential", "is_morphism",
    "is_homotopy", "tensor", "suspend", "direct_sum", "cylinder_multicomplex",
    "is_weak_multiequivalence", "weak_equivalence_table", "e2_isomorphic",
    "is_minimal", "minimal_iso", "homology_iso_table", "NotMinimal",
]


class NotMinimal(ValueError):
    pass


class ChainComplex:
    """Chain complex with named basis ``[(name, degree), ...]`` and differential.

    ``diff`` maps a basis name to ``{name: scalar}`` (omitted entries are 0).
    """

    def __init__(self, ring, basis, diff=None):
        self.ring = ring
        self.basis = [(str(n), int(d)) for n, d in basis]
        self.index = {n: i for i, (n, _d) in enumerate(self.basis)}
        self.diff = {}
        for n, img in (diff or {}).items():
            clean = {m: ring(v) for m, v in img.items() if ring(v)}
            if clean:
                self.diff[n] = clean
        by_deg = defaultdict(list)
        for i, (_n, d) in enumerate(self.basis):
            by_deg[d].append(i)
        self.degrees = dict(sorted(by_deg.items()))

    def basis_in_degree(self, n):
        return self.degrees.get(n, [])

    def matrix(self, n, keep=None):
        """Matrix of ``d: C_n -> C_{n-1}`` restricted to indices in ``keep``."""
        src = [i for i in self.basis_in_degree(n) if keep is None or i in keep]
        tgt = [i for i in self.basis_in_degree(n - 1) if keep is None or i in keep]
        tpos = {j: b for b, j in enumerate(tgt)}
        R = self.ring
        M = [[R.zero()] * len(src) for _ in tgt]
        for a, i in enumerate(src):
            for m, v in self.diff.get(self.basis[i][0], {}).items():
                j = self.index[m]
                if j in tpos:
                    M[tpos[j]][a] = v
        return M, src, tgt

    def d_squared_zero(self):
        R = self.ring
        for name, img in self.diff.items():
            acc = defaultdict(R.zero)
            for m, v in img.items():
                for t, w in self.diff.get(m, {}).items():
                    acc[t] = R(acc[t] + v * w)
            if any(acc.values()):
                return False
        return True

    def homology_subquotient(self, n, keep=None) -> Subquotient:
        R = self.ring
        d_out, src, _ = self.matrix(n, keep)
        d_in, _, _ = self.matrix(n + 1, keep)
        dim = len(src)
        Z = kernel_basis(R, d_out, ncols=dim) if d_out else identity(R, dim)
        B = [b for b in transpose(d_in, dim)] if d_in and d_in[0] else []
        B = [b for b in B if any(b)]
        return Subquotient(R, dim, Z, B)

    def homology(self, n, keep=None):
        return self.homology_subquotient(n, keep).presentation()

    def __eq__(self, other):
        return isinstance(other, ChainComplex) and self.ring == other.ring \
            and sorted(self.basis) == sorted(other.basis) and self.diff == other.diff


class Multicomplex:
    """Bigraded module ``module`` with multidifferential ``d`` (degree -1)."""

    def __init__(self, module: BigradedModule, d: Multimorphism = None):
        self.module = module
        self.d = d if d is not None else Multimorphism(module, module, -1, {})
        if self.d.eta != -1 or self.d.source != module or self.d.target != module:
            raise ValueError("multidifferential must be a degree -1 endomorphism")
        if not self.d.preserves_column_filtration():
            raise ValueError("multidifferential must have components d^0, d^1, ...")

    @property
    def ring(self):
        return self.module.ring

    def __len__(self):
        return len(self.module)

    def to_json(self):
        out = self.module.to_json()
        out["differential"] = self.d.to_json()["components"]
        return out

    @classmethod
    def from_json(cls, data):
        X = BigradedModule.from_json(data)
        d = Multimorphism.from_json({"eta": -1, "components": data.get("differential", {})}, X, X)
        return cls(X, d)


@dataclass
class ValidationReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate(X: Multicomplex) -> ValidationReport:
    """Check ``sum_{i+j=n} d^i d^j = 0`` for every ``n``.

    Violations are reported as ``(n, source basis name)``.
    """
    dd = compose(X.d, X.d)
    bad = sorted({(n, X.module.name(i)) for n, e in dd.components.items() for (i, _j) in e})
    return ValidationReport(not bad, bad)


def total(X: Multicomplex) -> ChainComplex:
    """Total complex ``(CX, sum d^j)``."""
    M = X.module
    diff = defaultdict(dict)
    for (i, j), v in X.d.flat().items():
        diff[M.name(i)][M.name(j)] = v
    return ChainComplex(X.ring, [(n, p + q) for (n, p, q) in M.basis], diff)


def associated_multicomplex(C: ChainComplex) -> Multicomplex:
    """``C_i`` placed at ``(i, 0)`` with ``d^1 = d``."""
    X = BigradedModule(C.ring, [(n, d, 0) for (n, d) in C.basis])
    F = {(X.index[a], X.index[b]): v for a, img in C.diff.items() for b, v in img.items()}
    return Multicomplex(X, components_of_graded_map(X, X, F, -1, 0))


def from_filtered_differential(X: BigradedModule, D) -> Multicomplex:
    """Multicomplex whose components are the bidegree pieces of ``D``.

    ``D`` is ``{(src, dst): scalar}`` on basis indices of ``X``; it must lower
    total degree by one, preserve the column filtration and square to zero.
    """
    d = components_of_graded_map(X, X, D, -1, 0)
    Y = Multicomplex(X, d)
    if not validate(Y):
        raise ValueError("D does not square to zero")
    return Y


def is_morphism(f: Multimorphism, X: Multicomplex, Y: Multicomplex) -> bool:
    """``d_Y f - f d_X = 0`` as multimorphisms, for ``f`` of the form ``f^0 + f^1 + ...``."""
    if f.eta != 0 or not f.preserves_column_filtration():
        return False
    return (compose(Y.d, f) - compose(f, X.d)).is_zero()


def is_homotopy(h: Multimorphism, f: Multimorphism, g: Multimorphism,
                X: Multicomplex, Y: Multicomplex) -> bool:
    """``d h + h d = g - f`` as multimorphisms, with ``h`` of degree 1 and ``l >= -1``."""
    if h.eta != 1 or (h.components and min(h.components) < -1):
        return False
    return (compose(Y.d, h) + compose(h, X.d) - (g - f)).is_zero()


def tensor(X: Multicomplex, Y: Multicomplex) -> Multicomplex:
    """``d^r(x y) = d^r(x) y + (-1)^{|x|} x d^r(y)`` with ``|x|`` the total degree."""
    if X.ring != Y.ring:
        raise ValueError("rings differ")
    R = X.ring
    MX, MY = X.module, Y.module
    basis = []
    pos = {}
    for i, (a, p, q) in enumerate(MX.basis):
        for j, (b, r, s) in enumerate(MY.basis):
            pos[(i, j)] = len(basis)
            basis.append((f"{a}*{b}", p + r, q + s))
    T = BigradedModule(R, basis)
    comps = defaultdict(dict)
    for k, e in X.d.components.items():
        for (i, i2), v in e.items():
            for j in range(len(MY)):
                comps[k][(pos[(i, j)], pos[(i2, j)])] = v
    for k, e in Y.d.components.items():
        for (j, j2), v in e.items():
            for i in range(len(MX)):
                sign = -1 if MX.degree(i) % 2 else 1
                key = (pos[(i, j)], pos[(i, j2)])
                comps[k][key] = R(comps[k].get(key, 0) + sign * v)
    return Multicomplex(T, Multimorphism(T, T, -1, dict(comps)))


def suspend(X: Multicomplex, prefix="s") -> Multicomplex:
    """Horizontal suspension: ``(sX)_{p,q} = X_{p-1,q}`` and ``d^j s = -s d^j``."""
    S = BigradedModule(X.ring, [(prefix + n, p + 1, q) for (n, p, q) in X.module.basis])
    R = X.ring
    comps = {k: {ij: R(-v) for ij, v in e.items()} for k, e in X.d.components.items()}
    return Multicomplex(S, Multimorphism(S, S, -1, comps))


def direct_sum(X: Multicomplex, Y: Multicomplex, tags=("1", "2")) -> Multicomplex:
    S = X.module.direct_sum(Y.module, tags)
    off = len(X.module)
    comps = defaultdict(dict)
    for k, e in X.d.components.items():
        comps[k].update(e)
    for k, e in Y.d.components.items():
        for (i, j), v in e.items():
            comps[k][(i + off, j + off)] = v
    return Multicomplex(S, Multimorphism(S, S, -1, dict(comps)))


def cylinder_multicomplex(V: Multicomplex) -> Multicomplex:
    """``V' + V'' + sV`` with ``d(sv) = v'' - v' - s d v`` (only ``d^1`` gets ``v'' - v'``)."""
    R = V.ring
    M = V.module
    n = len(M)
    basis = [(a + "'", p, q) for (a, p, q) in M.basis] \
        + [(a + "''", p, q) for (a, p, q) in M.basis] \
        + [("s" + a, p + 1, q) for (a, p, q) in M.basis]
    C = BigradedModule(R, basis)
    comps = defaultdict(dict)
    for k, e in V.d.components.items():
        for (i, j), v in e.items():
            comps[k][(i, j)] = v
            comps[k][(i + n, j + n)] = v
            comps[k][(i + 2 * n, j + 2 * n)] = R(-v)
    for i in range(n):
        comps[1][(i + 2 * n, i + n)] = R(comps[1].get((i + 2 * n, i + n), 0) + 1)
        comps[1][(i + 2 * n, i)] = R(comps[1].get((i + 2 * n, i), 0) - 1)
    return Multicomplex(C, Multimorphism(C, C, -1, dict(comps)))


# ---------------------------------------------------------------------------
# homological comparisons

def _restricted_map(f: Multimorphism, src_idx, tgt_idx):
    spos = {i: a for a, i in enumerate(src_idx)}
    tpos = {j: b for b, j in enumerate(tgt_idx)}
    R = f.ring
    M = [[R.zero()] * len(src_idx) for _ in tgt_idx]
    for (i, j), v in f.flat().items():
        if i in spos and j in tpos:
            M[tpos[j]][spos[i]] = v
    return M


def _columns(X):
    return [X.module.column(i) for i in range(len(X.module))]


def weak_equivalence_table(f: Multimorphism, X: Multicomplex, Y: Multicomplex, max_degree):
    """``[(q, n, iso?)]`` for the maps ``H_n(F_q CX) -> H_n(F_q CY)``, ``n <= max_degree - 1``.

    ``q`` ranges over the column stages where either side changes.
    """
    CX, CY = total(X), total(Y)
    cols = sorted(set(_columns(X)) | set(_columns(Y)))
    degs = sorted(set(CX.degrees) | set(CY.degrees))
    out = []
    for q in cols:
        keepX = {i for i in range(len(X.module)) if X.module.column(i) <= q}
        keepY = {i for i in range(len(Y.module)) if Y.module.column(i) <= q}
        for n in degs:
            if n > max_degree - 1:
                continue
            SX = CX.homology_subquotient(n, keepX)
            SY = CY.homology_subquotient(n, keepY)
            src = [i for i in CX.basis_in_degree(n) if i in keepX]
            tgt = [i for i in CY.basis_in_degree(n) if i in keepY]
            F = _restricted_map(f, src, tgt)
            out.append((q, n, induced_map_is_iso(X.ring, F, SX, SY)))
    return out


def is_weak_multiequivalence(f, X, Y, max_degree):
    """Filtered-homology criterion: every ``F_q`` restriction is a homology iso below ``max_degree``.

    Returns ``(ok, first failing (q, n) or None)``.
    """
    for q, n, ok in weak_equivalence_table(f, X, Y, max_degree):
        if not ok:
            return False, (q, n)
    return True, None


def homology_iso_table(f, CX: ChainComplex, CY: ChainComplex, max_degree, min_degree=0):
    """``[(n, iso?)]`` for ``H_n(f)`` on total complexes, ``min_degree <= n <= max_degree - 1``.

    ``f`` is a flat map ``{(src index, dst index): scalar}``.
    """
    out = []
    R = CX.ring
    for n in range(min_degree, max_degree):
        SX = CX.homology_subquotient(n)
        SY = CY.homology_subquotient(n)
        src, tgt = CX.basis_in_degree(n), CY.basis_in_degree(n)
        spos = {i: a for a, i in enumerate(src)}
        tpos = {j: b for b, j in enumerate(tgt)}
        F = [[R.zero()] * len(src) for _ in tgt]
        for (i, j), v in f.items():
            if i in spos and j in tpos:
                F[tpos[j]][spos[i]] = v
        out.append((n, induced_map_is_iso(R, F, SX, SY)))
    return out


def _page_subquotient(X: Multicomplex, CX: ChainComplex, p, r, n):
    """``E^r_p`` in total degree ``n`` as a subquotient of ``F_{p+r-1}/F_{p-1}``.

    It is the image of ``H_n(F_p/F_{p-r})`` in ``H_n(F_{p+r-1}/F_{p-1})``.
    """
    M = X.module
    low = {i for i in range(len(M)) if p - r < M.column(i) <= p}
    high = {i for i in range(len(M)) if p - 1 < M.column(i) <= p + r - 1}
    S1 = CX.homology_subquotient(n, low)
    S2 = CX.homology_subquotient(n, high)
    src = [i for i in CX.basis_in_degree(n) if i in low]
    tgt = [i for i in CX.basis_in_degree(n) if i in high]
    tpos = {j: b for b, j in enumerate(tgt)}
    R = X.ring
    image = []
    for z in S1.U:
        v = [R.zero()] * len(tgt)
        for a, i in enumerate(src):
            if i in tpos:
                v[tpos[i]] = z[a]
        image.append(v)
    return Subquotient(R, len(tgt), image + S2.W, S2.W), tgt


def e2_isomorphic(f, X, Y, max_degree, r=2):
    """Whether ``f`` induces an isomorphism of ``E^r`` pages of the column spectral sequences.

    Pages are computed as images of filtered-quotient homology, in total
    degrees ``<= max_degree - 1``.  Returns ``(ok, first failing (p, n))``.
    """
    CX, CY = total(X), total(Y)
    cols = sorted(set(_columns(X)) | set(_columns(Y)))
    if not cols:
        return True, None
    degs = sorted(set(CX.degrees) | set(CY.degrees))
    for p in range(cols[0], cols[-1] + 1):
        for n in degs:
            if n > max_degree - 1:
                continue
            SX, tx = _page_subquotient(X, CX, p, r, n)
            SY, ty = _page_subquotient(Y, CY, p, r, n)
            F = _restricted_map(f, tx, ty)
            if not induced_map_is_iso(X.ring, F, SX, SY):
                return False, (p, n)
    return True, None


def is_minimal(X: Multicomplex) -> bool:
    """``d^0 = 0`` and every entry of ``d^1`` lies in the maximal ideal."""
    R = X.ring
    if X.d.component(0):
        return False
    return all(R.in_max_ideal(v) for v in X.d.component(1).values())


def minimal_iso(f: Multimorphism, X: Multicomplex, Y: Multicomplex) -> Multimorphism:
    """Inverse of a weak multiequivalence between minimal free multicomplexes.

    The leading component ``f^0`` must be an isomorphism; the rest of the
    inverse comes from the recursion in :func:`invert`.
    """
    if not (is_minimal(X) and is_minimal(Y)):
        raise NotMinimal("both multicomplexes must be minimal")
    if not is_morphism(f, X, Y):
        raise ValueError("f is not a morphism of multicomplexes")
    try:
        return invert(f)
    except NotInvertible as exc:
        raise NotInvertible(f"f^0 is not an isomorphism: {exc}") from exc
