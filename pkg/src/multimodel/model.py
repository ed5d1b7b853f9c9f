"""Minimal free multimodels of connected DGAs.

Pipeline:

1. ``H_k(JBA)`` for ``k <= N`` and a minimal free resolution of each.
2. The minimal multicomplex ``FH``: stage ``F_p`` of the resolution of
   ``H_k`` sits at ``(p + 2k, -k)``, ``theta^1`` is the resolution
   differential and the higher ``theta^j`` are solved for together with a
   comparison ``Phi_0: FH -> JBA`` (a multimorphism with the single
   component ``Phi_0^k`` on the ``H_k`` block).
3. The free multialgebra ``T[s^-1 FH]`` with linear differential
   ``beta_1(s^-1 e) = -s^-1 theta(e)``; decomposable parts of the
   differential and the comparison ``Phi`` into the cobar construction are
   solved generator by generator.

Every stage is re-verified and the results are collected as certificates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .ring import (ModulePresentation, minimal_generators, kernel_basis, transpose, identity,
                   matmul, is_zero_matrix, in_span, span_length, solve_linear)
from .bigraded import BigradedModule, BidegreeError, components_of_graded_map, invert, NotInvertible
from .multicomplex import (Multicomplex, ChainComplex, associated_multicomplex, validate, is_morphism,
                           is_minimal, weak_equivalence_table, e2_isomorphic, homology_iso_table)
from .freealg import (FreeMultialgebra, AlgebraMorphism, add, sub, clean, word_name, is_algebra_iso,
                      algebra_inverse, extend_homotopy)
from .barcobar import DGAPresentation, bar, cobar, cobar_bar_adjoint, bar_name, desusp_name
from .lifting import LiftProblem, adams_hilton_lift, _solve

__all__ = [
    "UnsolvableObstruction", "MinimalResolution", "minimal_resolution", "AssembledResolution",
    "assemble_FH", "MinimalMultimodel", "minimal_multimodel", "homotope_to_iso",
    "models_isomorphic", "ModelIsomorphism", "model_homology_table", "fh_name", "model_name",
    "certify", "certificates_pass", "field_transfer_defects", "consistency_defects",
]


class UnsolvableObstruction(ValueError):
    def __init__(self, where, what):
        super().__init__(f"obstruction not solvable at {where} ({what})")
        self.where = where


def fh_name(k, p, i):
    return f"e{k}.{p}.{i}"


def model_name(k, p, i):
    return f"z{k}.{p}.{i}"


# ---------------------------------------------------------------------------
# minimal resolutions

@dataclass
class MinimalResolution:
    """``F_0 <- F_1 <- ...`` with ``deltas[j]`` the matrix of ``F_{j+1} -> F_j``.

    ``cover`` lists the presentation generators chosen as the basis of ``F_0``.
    """

    ring: object
    ranks: list
    deltas: list
    cover: list

    def is_minimal(self):
        R = self.ring
        return all(R.in_max_ideal(x) for D in self.deltas for row in D for x in row)

    def is_exact(self):
        """``ker delta_j = im delta_{j+1}`` at every inner stage."""
        R = self.ring
        for j in range(1, len(self.deltas)):
            D_out, D_in = self.deltas[j - 1], self.deltas[j]
            if D_in and D_out and not is_zero_matrix(matmul(R, D_out, D_in)):
                return False
            n = self.ranks[j]
            K = kernel_basis(R, D_out, ncols=n) if D_out else identity(R, n)
            B = transpose(D_in, self.ranks[j + 1]) if D_in and self.ranks[j + 1] else []
            if not all(in_span(R, B, k) for k in K):
                return False
        return True


def _minimal_subset(R, gens, dim):
    """Indices of a Nakayama-minimal subset of the vectors ``gens`` in ``R^dim``."""
    gens = [g for g in gens]
    if not gens:
        return []
    A = transpose(gens, dim) if dim else []
    rels = kernel_basis(R, A, ncols=len(gens)) if A else identity(R, len(gens))
    rels = [r for r in rels if any(r)]
    count, proj = minimal_generators(ModulePresentation(R, len(gens), rels))
    return [i for i in range(len(gens)) if any(proj[i])]


def minimal_resolution(M: ModulePresentation, stages) -> MinimalResolution:
    """Minimal free resolution of ``M`` up to ``F_stages``."""
    R = M.ring
    count, proj = minimal_generators(M)
    cover = [i for i in range(M.generators) if any(proj[i])]
    ranks = [count]
    deltas = []
    # syzygies of the chosen generators
    g = M.generators
    cols = [[R.one() if r == i else R.zero() for r in range(g)] for i in cover] + [list(c) for c in M.relations]
    if count == 0:
        return MinimalResolution(R, ranks, deltas, cover)
    A = transpose(cols, g)
    syz = [v[:count] for v in kernel_basis(R, A, ncols=len(cols))]
    syz = [v for v in syz if any(v)]
    for _ in range(stages):
        dim = ranks[-1]
        chosen = _minimal_subset(R, syz, dim)
        gens = [syz[i] for i in chosen]
        if not gens:
            break
        D = transpose(gens, dim)
        deltas.append(D)
        ranks.append(len(gens))
        syz = [v for v in kernel_basis(R, D, ncols=len(gens)) if any(v)]
    return MinimalResolution(R, ranks, deltas, cover)


# ---------------------------------------------------------------------------
# FH

@dataclass
class AssembledResolution:
    FH: Multicomplex
    JBA: Multicomplex
    phi0: object
    theta: dict
    phi: dict
    resolutions: dict
    truncation: int
    blocks: dict = field(default_factory=dict)

    def certificates(self):
        FH, J = self.FH, self.JBA
        table = weak_equivalence_table(self.phi0, FH, J, self.truncation)
        e2_ok, e2_where = e2_isomorphic(self.phi0, FH, J, self.truncation)
        return {
            "valid": bool(validate(FH)),
            "minimal": is_minimal(FH),
            "morphism": is_morphism(self.phi0, FH, J),
            "weak_equivalence": table,
            "e2": (e2_ok, e2_where),
        }


def _jba(A: DGAPresentation, N):
    C = bar(A, N + 1)
    CC = C.chain_complex()
    return C, CC


def _homology_block(R, CC: ChainComplex, k):
    S = CC.homology_subquotient(k)
    names = [CC.basis[i][0] for i in CC.basis_in_degree(k)]
    return S, names


def _solve_phi_theta(R, CC, dJ, phi, theta, n, ukeys, delta_e, phi_of, theta_of):
    """Solve ``d Phi_0(e) - sum c_u Phi_0(u) = Phi_0(delta e)`` with ``sum c_u theta(u) = -theta(delta e)``."""
    jkeys = [CC.basis[b][0] for b in CC.basis_in_degree(n)]
    cols = []
    for a in jkeys:
        cols.append({("J", t): v for t, v in dJ.get(a, {}).items()})
    for u in ukeys:
        col = {("J", t): R(-v) for t, v in phi.get(u, {}).items()}
        col.update({("F", t): v for t, v in theta.get(u, {}).items()})
        cols.append(col)
    rhs = {("J", t): v for t, v in phi_of(delta_e).items()}
    rhs.update({("F", t): R(-v) for t, v in theta_of(delta_e).items()})
    sol = _solve(R, cols, rhs)
    return None if sol is None else (jkeys, sol)


def assemble_FH(A: DGAPresentation, N=None, rng=None) -> AssembledResolution:
    """Minimal multicomplex ``FH`` with its comparison ``Phi_0`` into ``JBA``.

    ``rng`` (a :class:`random.Random`) perturbs the choice of cycle
    representatives and of basis scalings, giving a different but equally
    valid assembly.
    """
    R = A.ring
    N = A.truncation if N is None else N
    C, CC = _jba(A, N)
    J = associated_multicomplex(CC)
    theta = {}
    phi = {}
    basis = []
    resolutions = {}
    blocks = {}
    dJ = {n: img for n, img in CC.diff.items()}

    def d_jba(x):
        out = {}
        for a, c in x.items():
            out = add(R, out, dJ.get(a, {}), c)
        return out

    def phi_of(x):
        out = {}
        for u, c in x.items():
            out = add(R, out, phi.get(u, {}), c)
        return out

    def theta_of(x):
        out = {}
        for u, c in x.items():
            out = add(R, out, theta.get(u, {}), c)
        return out

    # resolutions first, then stage 0 and the higher stages by total degree
    for k in range(1, N + 1):
        S, names = _homology_block(R, CC, k)
        P = S.presentation()
        if P.generators == 0 or P.is_zero():
            continue
        res = minimal_resolution(P, max(N - k, 0))
        resolutions[k] = (res, P, names)
    for n in range(1, N + 1):
        if n in resolutions:
            res, P, names = resolutions[n]
            for i, gi in enumerate(res.cover):
                rep = {names[t]: v for t, v in enumerate(P.representatives[gi]) if v}
                if rng is not None:
                    u = rng.choice([x for x in range(1, min(R.modulus, 20)) if R.is_unit(x)]) if R.is_finite else 1
                    rep = {a: R(u * v) for a, v in rep.items()}
                    for b in CC.basis_in_degree(n + 1):
                        c = rng.randrange(3)
                        if c:
                            rep = add(R, rep, d_jba({CC.basis[b][0]: 1}), c)
                e = fh_name(n, 0, i)
                basis.append((e, 2 * n, -n))
                phi[e] = clean(R, rep)
                theta[e] = {}
                blocks[e] = (n, 0)
        for k in sorted(resolutions):
            p = n - k
            res = resolutions[k][0]
            if p < 1 or p >= len(res.ranks):
                continue
            D = res.deltas[p - 1]
            for i in range(res.ranks[p]):
                e = fh_name(k, p, i)
                delta_e = {fh_name(k, p - 1, r): D[r][i] for r in range(res.ranks[p - 1]) if D[r][i]}
                sol = None
                # theta^{>=2}(e) ranges over other blocks in degree n-1; lower blocks are tried
                # first, higher blocks (components of index <= 0) only if that fails
                for upward in (False, True):
                    ukeys = [u for (u, c, r) in basis if c + r == n - 1 and
                             (blocks[u][0] < k or (upward and blocks[u][0] > k))]
                    sol = _solve_phi_theta(R, CC, dJ, phi, theta, n, ukeys, delta_e, phi_of, theta_of)
                    if sol is not None:
                        break
                if sol is None:
                    raise UnsolvableObstruction((k, p, i), "theta/Phi_0")
                jkeys, sol = sol
                phi[e] = {a: v for a, v in zip(jkeys, sol[:len(jkeys)]) if v}
                higher = {u: v for u, v in zip(ukeys, sol[len(jkeys):]) if v}
                theta[e] = add(R, delta_e, higher)
                basis.append((e, p + 2 * k, -k))
                blocks[e] = (k, p)
    resolutions = {k: v[0] for k, v in resolutions.items()}
    X = BigradedModule(R, basis)
    F = {(X.index[e], X.index[u]): v for e, img in theta.items() for u, v in img.items()}
    try:
        FH = Multicomplex(X, components_of_graded_map(X, X, F, -1, 0))
    except BidegreeError as exc:
        raise UnsolvableObstruction(None, f"theta needs a component of negative index: {exc}")
    Fphi = {(X.index[e], J.module.index[a]): v for e, img in phi.items() for a, v in img.items()}
    phi0 = components_of_graded_map(X, J.module, Fphi, 0, 0)
    return AssembledResolution(FH, J, phi0, theta, phi, resolutions, N, blocks)


# ---------------------------------------------------------------------------
# the multimodel

@dataclass
class MinimalMultimodel:
    dga: DGAPresentation
    algebra: FreeMultialgebra
    omega: FreeMultialgebra
    phi: AlgebraMorphism
    composite: AlgebraMorphism
    assembled: AssembledResolution
    truncation: int

    def generators(self):
        return list(self.algebra.generators.basis)

    def linear_part(self):
        return self.algebra.linear_part()

    def certificates(self, with_weak=True):
        """Exact certificates as plain data (see :func:`certify`)."""
        return certify(self, with_weak)

    def to_json(self, with_certificates=True):
        T = self.algebra
        R = T.ring
        FHA = self.assembled
        out = {
            "ring": str(R),
            "truncation": self.truncation,
            "dga": self.dga.to_json(),
            "generators": [list(b) for b in T.generators.basis],
            "differential": [[g, _element_json(R, T, T.differential.get(g, {}))] for g in T.generator_names()],
            "comparison": [[g, _element_json(R, self.omega, self.phi.image(g))] for g in T.generator_names()],
            "composite": [[g, _named_json(R, self.composite.target, self.composite.image(g))]
                          for g in T.generator_names()],
            "resolution": {
                "basis": [list(b) for b in FHA.FH.module.basis],
                "theta": [[e, _named_json(R, FHA.FH.module, FHA.theta.get(e, {}))]
                          for (e, _c, _r) in FHA.FH.module.basis],
                "phi0": [[e, _named_json(R, FHA.JBA.module, FHA.phi.get(e, {}))]
                         for (e, _c, _r) in FHA.FH.module.basis],
            },
        }
        if with_certificates:
            out["certificates"] = self.certificates()
        return out

    @classmethod
    def from_json(cls, data):
        """Rebuild a model from :meth:`to_json` output; every derived object is recomputed."""
        A = DGAPresentation.from_json(data["dga"])
        R = A.ring
        N = int(data["truncation"])
        top = N + 1
        T = FreeMultialgebra.from_json({"ring": data["ring"], "generators": data["generators"],
                                        "differential": data["differential"], "truncation": top})
        Om = cobar(bar(A, top + 1), top)
        Phi = AlgebraMorphism(T, Om, {g: {tuple(w): R.parse_scalar(v) for w, v in terms}
                                      for g, terms in data["comparison"]})
        adj = cobar_bar_adjoint(A, Om)
        composite = AlgebraMorphism(T, adj.target, {g: {k: R.parse_scalar(v) for k, v in terms}
                                                    for g, terms in data["composite"]})
        res = data["resolution"]
        X = BigradedModule(R, res["basis"])
        theta = {e: {u: R.parse_scalar(v) for u, v in terms} for e, terms in res["theta"]}
        phi = {e: {a: R.parse_scalar(v) for a, v in terms} for e, terms in res["phi0"]}
        J = associated_multicomplex(_jba(A, top)[1])
        F = {(X.index[e], X.index[u]): v for e, img in theta.items() for u, v in img.items()}
        FH = Multicomplex(X, components_of_graded_map(X, X, F, -1, 0))
        Fphi = {(X.index[e], J.module.index[a]): v for e, img in phi.items() for a, v in img.items()}
        phi0 = components_of_graded_map(X, J.module, Fphi, 0, 0)
        blocks = {e: tuple(int(t) for t in e[1:].split(".")[:2]) for (e, _c, _r) in X.basis}
        FHA = AssembledResolution(FH, J, phi0, theta, phi, {}, top, blocks)
        return cls(A, T, Om, Phi, composite, FHA, N)


def _element_json(R, T, x):
    return [[list(w), R.format_scalar(v)] for w, v in sorted(x.items(), key=lambda t: T.sort_key(t[0]))]


def _named_json(R, basis, x):
    """``[[name, scalar], ...]`` in the order of a named basis (``index`` or ``sort_key``)."""
    key = basis.sort_key if hasattr(basis, "sort_key") else (lambda a: basis.index[a])
    return [[a, R.format_scalar(v)] for a, v in sorted(x.items(), key=lambda t: key(t[0]))]


def minimal_multimodel(A: DGAPresentation, N=None, seed=None) -> MinimalMultimodel:
    """Minimal free multimodel ``T[s^-1 FH] -> Omega B A -> A`` up to degree ``N``.

    ``seed`` selects a perturbed but equally valid set of choices (basis
    order of ``A``, cycle representatives, scalings); ``None`` gives the
    canonical construction.
    """
    N = A.truncation if N is None else N
    rng = random.Random(seed) if seed is not None else None
    if rng is not None:
        order = [A.unit] + rng.sample(A.ideal, len(A.ideal))
        A = A.permuted(order)
    R = A.ring
    # one degree of headroom so that homology is determined in degrees <= N - 1
    top = N + 1
    FHA = assemble_FH(A, top, rng)
    Om = cobar(bar(A, top + 1), top)
    X = FHA.FH.module
    gens = []
    for (e, c, r) in X.basis:
        k, p = FHA.blocks[e]
        i = int(e.split(".")[-1])
        gens.append((model_name(k, p, i), c - 1, r))
    zname = {e: g for (e, _c, _r), (g, _c2, _r2) in zip(X.basis, gens)}
    V = BigradedModule(R, gens)
    T = FreeMultialgebra(V, {}, top)
    images = {}
    Phi = AlgebraMorphism(T, Om, images)
    order = sorted(range(len(gens)), key=lambda i: (V.degree(i), i))
    for idx in order:
        e = X.basis[idx][0]
        z = zname[e]
        n = V.degree(idx)
        col = V.column(idx)
        beta1 = {(zname[u],): R(-v) for u, v in FHA.theta.get(e, {}).items()}
        lin = {(desusp_name(C_word), ): v for C_word, v in _bar_words(A, FHA.phi.get(e, {})).items()}
        okeys = [w for w in Om.basis_in_degree(n) if len(w) >= 2]
        tkeys = [w for w in T.basis_in_degree(n - 1) if len(w) >= 2 and T.key_column(w) <= col]
        cols = []
        for w in okeys:
            cols.append({("O", t): v for t, v in Om.d({w: 1}).items()})
        for w in tkeys:
            c1 = {("O", t): R(-v) for t, v in Phi.apply_word(w).items()}
            c1.update({("V", t): v for t, v in T.d({w: 1}).items()})
            cols.append(c1)
        rhs = {("O", t): v for t, v in sub(R, Phi.apply(beta1), Om.d(lin)).items()}
        rhs.update({("V", t): R(-v) for t, v in T.d(beta1).items()})
        sol = _solve(R, cols, rhs)
        if sol is None:
            raise UnsolvableObstruction(z, "decomposable differential")
        X_dec = {w: v for w, v in zip(okeys, sol[:len(okeys)]) if v}
        b_dec = {w: v for w, v in zip(tkeys, sol[len(okeys):]) if v}
        T.differential[z] = clean(R, add(R, beta1, b_dec))
        if not T.differential[z]:
            del T.differential[z]
        Phi.images[z] = add(R, lin, X_dec)
        Phi._cache = {(): Om.one()}
    Phi = AlgebraMorphism(T, Om, Phi.images)
    adj = cobar_bar_adjoint(A, Om)
    composite = AlgebraMorphism(T, adj.target, {g: adj.apply(img) for g, img in Phi.images.items()})
    return MinimalMultimodel(A, T, Om, Phi, composite, FHA, N)


def _bar_words(A, x):
    """Translate JBA basis names back to bar words."""
    out = {}
    for name, v in x.items():
        word = tuple(name[1:-1].split("|"))
        out[word] = v
    return out


# ---------------------------------------------------------------------------
# certificates

def _truncated_complex(T, top):
    keys = [w for n in range(top + 1) for w in T.basis_in_degree(n)]
    diff = {}
    for w in keys:
        img = T.d({w: 1})
        if img:
            diff[word_name(w) if isinstance(w, tuple) else w] = {
                (word_name(u) if isinstance(u, tuple) else u): v for u, v in img.items()}
    basis = [((word_name(w) if isinstance(w, tuple) else w), T.key_degree(w)) for w in keys]
    return keys, ChainComplex(T.ring, basis, diff)


def model_homology_table(M: MinimalMultimodel, top=None):
    """``[(n, iso?)]`` for the composite on total homology, ``n <= top - 1``."""
    top = M.truncation if top is None else top
    keys, C1 = _truncated_complex(M.algebra, top)
    C2 = M.dga.chain_complex()
    pos2 = {n: i for i, (n, _d) in enumerate(C2.basis)}
    F = {}
    for i, w in enumerate(keys):
        for u, c in M.composite.apply({w: 1}).items():
            F[(i, pos2[u])] = c
    return homology_iso_table(F, C1, C2, top, 0)


def _homology_projection(R, B, n, reps):
    """Linear ``p: JBA_n -> H_n`` killing boundaries with ``p(reps[e]) = e`` (field case).

    ``reps`` maps homology generators to cycle representatives (dicts over
    bar words).  A complement of the cycles is completed greedily from
    the standard basis and sent to zero.
    """
    words = [w for w in B.words if B.word_degree(w) == n]
    pos = {w: i for i, w in enumerate(words)}

    def vec(x):
        v = [R.zero()] * len(words)
        for w, c in x.items():
            v[pos[w]] = R(v[pos[w]] + c)
        return v

    bounds = [vec(B.d({u: 1})) for u in B.words if B.word_degree(u) == n + 1]
    bounds = [b for b in bounds if any(b)]
    names = sorted(reps)
    cols = bounds + [vec(reps[e]) for e in names]
    for i in range(len(words)):
        if span_length(R, cols) == len(words) * R.length:
            break
        unit = [R.one() if j == i else R.zero() for j in range(len(words))]
        if not in_span(R, cols, unit):
            cols.append(unit)
    lo, hi = len(bounds), len(bounds) + len(names)
    A = transpose(cols, len(words)) if words else []

    def p(x):
        if not x:
            return {}
        sol = solve_linear(R, A, vec(x), ncols=len(cols))
        return {e: c for e, c in zip(names, sol[lo:hi]) if c}

    return p


def field_transfer_defects(M: MinimalMultimodel):
    """Generators whose quadratic differential disagrees with the transferred coproduct.

    Over a field the quadratic part of ``d'`` is forced: for the
    representative ``c = Phi_0(e)`` it equals ``sum (-1)^{|c'|} p(c') p(c'')``
    over the reduced coproduct, with ``p`` a projection of ``JBA`` onto its
    homology killing boundaries.  This is computed here from a contraction
    of ``JBA`` and compared with the solver's output.  Returns ``None`` over
    non-fields.
    """
    T = M.algebra
    R = T.ring
    if not R.is_field:
        return None
    FHA = M.assembled
    B = bar(M.dga, M.truncation + 2)
    word_of = {bar_name(w): w for w in B.words}
    zname = {}
    reps = {}
    for e, (k, p) in FHA.blocks.items():
        if p == 0:
            zname[e] = model_name(k, 0, int(e.split(".")[-1]))
            reps.setdefault(k, {})[e] = {word_of[a]: c for a, c in FHA.phi[e].items()}
    projections = {k: _homology_projection(R, B, k, reps[k]) for k in reps}
    bad = []
    for k in sorted(reps):
        for e, c in reps[k].items():
            expected = {}
            for w, a in c.items():
                for left, right in B.coproduct(w):
                    kl, kr = B.word_degree(left), B.word_degree(right)
                    if kl not in projections or kr not in projections:
                        continue
                    pl = projections[kl]({left: 1})
                    pr = projections[kr]({right: 1})
                    sign = -1 if kl % 2 else 1
                    for u, x in pl.items():
                        for v, y in pr.items():
                            expected = add(R, expected, {(zname[u], zname[v]): 1}, sign * a * x * y)
            actual = {w: v for w, v in T.differential.get(zname[e], {}).items() if len(w) == 2}
            if sub(R, clean(R, expected), actual):
                bad.append(zname[e])
    return bad


def certify(M: MinimalMultimodel, with_weak=True):
    T = M.algebra
    lin = T.linear_part()
    out = {
        "d_squared": "zero" if not T.d_squared_defects() else sorted(T.d_squared_defects()),
        "comparison_chain_map": _residual_list(M.phi) + _residual_list(M.composite),
        "minimal": bool(is_minimal(lin)),
        "homology_iso": [[n, "iso" if ok else "not iso"] for n, ok in model_homology_table(M)],
    }
    if not out["comparison_chain_map"]:
        out["comparison_chain_map"] = "zero"
    if with_weak:
        FHA = M.assembled
        table = weak_equivalence_table(FHA.phi0, FHA.FH, FHA.JBA, M.truncation)
        out["weak_equivalence"] = [[q, n, "iso" if ok else "not iso"] for q, n, ok in table]
        out["fh_morphism"] = bool(is_morphism(FHA.phi0, FHA.FH, FHA.JBA))
        out["fh_valid"] = bool(validate(FHA.FH))
    transfer = field_transfer_defects(M)
    if transfer is not None:
        out["field_transfer"] = transfer or "zero"
    return out


def _residual_list(f):
    R = f.source.ring
    return [[g, [[list(k) if isinstance(k, tuple) else k, R.format_scalar(v)] for k, v in r.items()]]
            for g, r in sorted(f.chain_defects().items())]


def certificates_pass(cert):
    """Whether every certificate is exactly zero/true/iso."""
    ok = cert.get("d_squared") == "zero" and cert.get("comparison_chain_map") == "zero" \
        and cert.get("minimal") is True
    ok = ok and all(s == "iso" for _n, s in cert.get("homology_iso", []))
    ok = ok and all(t[-1] == "iso" for t in cert.get("weak_equivalence", []))
    for key in ("fh_morphism", "fh_valid"):
        if key in cert:
            ok = ok and cert[key] is True
    if "field_transfer" in cert:
        ok = ok and cert["field_transfer"] == "zero"
    return ok


def consistency_defects(M: MinimalMultimodel):
    """Generators where the stored composite differs from ``Omega B A -> A`` applied to ``Phi``."""
    adj = cobar_bar_adjoint(M.dga, M.omega)
    R = M.algebra.ring
    return [g for g in M.algebra.generator_names()
            if sub(R, adj.apply(M.phi.image(g)), M.composite.image(g))]


# ---------------------------------------------------------------------------
# uniqueness

@dataclass
class ModelIsomorphism:
    forward: AlgebraMorphism
    inverse: AlgebraMorphism
    lift: object
    certificates: dict


def homotope_to_iso(f: AlgebraMorphism):
    """Algebra isomorphism homotopic to ``f``, for ``f`` between minimal free multialgebras.

    The linear part of ``f`` must have an invertible leading component; the
    correcting homotopy then vanishes and ``g = f``.  Returns ``(g, h)``.
    """
    alpha = f.linear_part()
    try:
        invert(alpha)
    except NotInvertible as exc:
        raise NotInvertible(f"leading component of the linear part is not invertible: {exc}") from exc
    g, h = extend_homotopy(f, {})
    if not is_algebra_iso(g):
        raise NotInvertible("homotoped map is not an isomorphism")
    return g, h


def models_isomorphic(M1: MinimalMultimodel, M2: MinimalMultimodel, max_degree=None) -> ModelIsomorphism:
    """Certified isomorphism ``T[V_2] -> T[V_1]`` between two models of the same DGA.

    ``M2``'s comparison into ``A`` is lifted through ``M1``'s; the lift is
    homotoped to an isomorphism and its inverse is built explicitly.
    """
    top = min(M1.truncation, M2.truncation) - 1 if max_degree is None else max_degree
    A1 = M1.composite.target
    g = M1.composite
    fp = AlgebraMorphism(M2.algebra, A1, M2.composite.images)
    P = LiftProblem(M2.algebra, M1.algebra, A1, g, fp, top)
    sol = adams_hilton_lift(P)
    psi, _ = homotope_to_iso(sol.f)
    inv = algebra_inverse(psi)
    S, T = M2.algebra, M1.algebra
    ident2 = AlgebraMorphism(S, S, {v: {(v,): 1} for v in S.generator_names()})
    ident1 = AlgebraMorphism(T, T, {v: {(v,): 1} for v in T.generator_names()})
    certs = {
        "lift_residuals": [list(r) for r in sol.residual_generators] or "zero",
        "filtration": sol.filtration_ok(),
        "chain_map": "zero" if psi.is_chain_map() else sorted(psi.chain_defects()),
        "inverse_chain_map": "zero" if inv.is_chain_map() else sorted(inv.chain_defects()),
        "is_iso": is_algebra_iso(psi),
        "left_inverse": inv.compose(psi).equals_on_generators(ident2),
        "right_inverse": psi.compose(inv).equals_on_generators(ident1),
    }
    return ModelIsomorphism(psi, inv, sol, certs)
