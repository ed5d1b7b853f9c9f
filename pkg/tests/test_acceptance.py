"""Acceptance criteria, one test each, all checked in exact arithmetic.

Every test records a one-line PASS/FAIL verdict; the lines are printed in
the terminal summary (see ``conftest.py``) and when the file is run as a
script.
"""

import itertools
import json
import random
import time
from pathlib import Path
from collections import defaultdict

from multimodel.ring import Fp, Q, Zmod, ModulePresentation, matvec, normal_form, identity
from multimodel.bigraded import (BigradedModule, Multimorphism, NotInvertible, compose, invert,
                                 identity_map, components_of_graded_map)
from multimodel.multicomplex import (Multicomplex, validate, total, from_filtered_differential, is_morphism,
                                     is_homotopy, tensor, suspend, direct_sum, cylinder_multicomplex)
from multimodel.freealg import (add, sub, cylinder, cylinder_from_homotopy, homotopy_from_cylinder,
                                extend_homotopy, is_algebra_homotopy)
from multimodel.lifting import LiftProblem, adams_hilton_lift, lifts_homotopic
from multimodel.barcobar import exterior_dga, torsion_dga
from multimodel.model import minimal_resolution, minimal_multimodel, certify, models_isomorphic
from multimodel.cli import main as cli_main

import randgen

RESULTS = {}
RINGS = [Fp(3), Fp(5), Q(), Zmod(3, 2), Zmod(2, 3)]


def verdict(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


# -- 1 ------------------------------------------------------------------------------

def _tensor_with_rule(X, Y, rule):
    """Tensor product whose Koszul sign is ``rule(p, q)`` for ``x`` at ``(p, q)``."""
    R = X.ring
    MX, MY = X.module, Y.module
    pos, basis = {}, []
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
                key = (pos[(i, j)], pos[(i, j2)])
                comps[k][key] = R(comps[k].get(key, 0) + rule(*MX.bidegree(i)) * v)
    return Multicomplex(T, Multimorphism(T, T, -1, dict(comps)))


SIGN_RULES = {
    "no sign": lambda p, q: 1,
    "column parity": lambda p, q: -1 if p % 2 else 1,
    "row parity": lambda p, q: -1 if q % 2 else 1,
}


def _elementary_pair(R, vertical):
    """``a -> b`` in degrees 1, 0, as ``d^0`` (vertical) or ``d^1``."""
    basis = [("a", 0, 1), ("b", 0, 0)] if vertical else [("a", 1, 0), ("b", 0, 0)]
    X = BigradedModule(R, basis)
    return Multicomplex(X, Multimorphism(X, X, -1, {0 if vertical else 1: {(0, 1): 1}}))


def test_criterion_01_multicomplex_axioms():
    t0 = time.time()
    rnd = random.Random(1)
    count = failures = 0
    detected = {name: 0 for name in SIGN_RULES}
    for n in range(200):
        R = RINGS[n % len(RINGS)]
        X, _, _ = randgen.multicomplex(R, rnd, 3, "x")
        Y, _, _ = randgen.multicomplex(R, rnd, 3, "y")
        built = [X, Y, tensor(X, Y), suspend(X), direct_sum(X, Y), cylinder_multicomplex(X)]
        assert all(len(Z.module) <= 10 for Z in built[:2])
        failures += sum(1 for Z in built if not validate(Z))
        count += 1
        for name, rule in SIGN_RULES.items():
            if not validate(_tensor_with_rule(X, Y, rule)):
                detected[name] += 1
    # single flipped entries on tensor squares where every entry matters
    flips = flip_misses = 0
    for R in RINGS:
        for v1, v2 in itertools.product([False, True], repeat=2):
            T = tensor(_elementary_pair(R, v1), _elementary_pair(R, v2))
            for k, e in T.d.components.items():
                for ij in e:
                    comps = {kk: dict(ee) for kk, ee in T.d.components.items()}
                    comps[k][ij] = R(-comps[k][ij])
                    bad = Multicomplex(T.module, Multimorphism(T.module, T.module, -1, comps))
                    flips += 1
                    flip_misses += bool(validate(bad))
    elapsed = time.time() - t0
    ok = failures == 0 and all(detected.values()) and flip_misses == 0 and elapsed < 30
    verdict(1, ok, f"{count} random multicomplexes, {failures} constructor failures; "
                   f"sign-rule variants detected {detected}; {flips - flip_misses}/{flips} single flips "
                   f"detected; {elapsed:.1f}s")
    assert ok


# -- 2 ------------------------------------------------------------------------------

def test_criterion_02_round_trips():
    t0 = time.time()
    rnd = random.Random(2)
    bad = 0
    n_cases = 0
    for n in range(150):
        R = RINGS[n % len(RINGS)]
        X, X0, P = randgen.multicomplex(R, rnd, 6)
        M = X.module
        C = total(X)
        D = {(M.index[a], M.index[b]): v for a, img in C.diff.items() for b, v in img.items()}
        bad += from_filtered_differential(M, D).d != X.d
        # morphisms: P is a morphism X0 -> X
        bad += not is_morphism(P, X0, X)
        bad += components_of_graded_map(M, M, P.flat(), 0, 0) != P
        # homotopies: h and f + dh + hd
        h = randgen.graded_map(M, M, rnd, eta=1, lowest=-1)
        g = P + compose(X.d, h) + compose(h, X0.d)
        bad += not is_homotopy(h, P, g, X0, X)
        bad += components_of_graded_map(M, M, h.flat(), 1, -1) != h
        bad += components_of_graded_map(M, M, g.flat(), 0, -1) != g
        n_cases += 1
    elapsed = time.time() - t0
    ok = bad == 0 and elapsed < 10
    verdict(2, ok, f"{n_cases} multicomplexes with a morphism and a homotopy each, {bad} mismatches; {elapsed:.1f}s")
    assert ok


# -- 3 ------------------------------------------------------------------------------

def _total_invertible(R, f):
    X = f.source
    for n in set(X.degree(i) for i in range(len(X))):
        M = f.total_matrix(n)
        N, _ = normal_form(R, M)
        if N[:len(M)] != identity(R, len(M)):
            return False
    return True


def _invertible(f):
    try:
        invert(f)
        return True
    except NotInvertible:
        return False


def test_criterion_03_inverses():
    t0 = time.time()
    rnd = random.Random(3)
    inverses = bad = disagreements = tried = 0
    for n in range(240):
        R = RINGS[n % len(RINGS)]
        X = randgen.module(R, rnd, rnd.randint(1, 6), rows=(-1, 1))
        forced = n % 2 == 0
        f = randgen.graded_map(X, X, rnd, unit_diagonal=forced)
        f0 = Multimorphism(X, X, 0, {0: f.component(0)})
        flags = (_invertible(f), _invertible(f0), _total_invertible(R, f))
        tried += 1
        disagreements += len(set(flags)) != 1
        if forced:
            g = invert(f)
            I = identity_map(X)
            bad += compose(f, g) != I or compose(g, f) != I
            inverses += 1
    elapsed = time.time() - t0
    ok = inverses >= 100 and bad == 0 and disagreements == 0 and elapsed < 10
    verdict(3, ok, f"{inverses} two-sided inverses ({bad} wrong); invertibility of f, f^0, Cf agreed on "
                   f"{tried - disagreements}/{tried}; {elapsed:.1f}s")
    assert ok


# -- 4 ------------------------------------------------------------------------------

def test_criterion_04_cylinder():
    t0 = time.time()
    rnd = random.Random(4)
    bad = words = 0
    for n in range(12):
        R = RINGS[n % len(RINGS)]
        A = randgen.small_free_algebra(R, rnd, 6)
        cyl = cylinder(A)
        C, S = cyl.algebra, cyl.S
        every = [w for k in range(7) for w in A.basis_in_degree(k)]
        for w in every:
            words += 1
            lhs = add(R, C.d(S.apply({w: 1})), S.apply(A.d({w: 1})))
            rhs = sub(R, cyl.i2.apply({w: 1}), cyl.i1.apply({w: 1}))
            bad += lhs != rhs
        for u in every:
            for v in every:
                if A.key_degree(u) + A.key_degree(v) > 6:
                    continue
                lhs = S.apply({u + v: 1})
                rhs = add(R, C.mul(S.apply({u: 1}), cyl.i2.apply({v: 1})),
                          C.mul(cyl.i1.apply({u: 1}), S.apply({v: 1})), (-1) ** A.key_degree(u))
                bad += lhs != rhs
        # bijection: (f, f', h) -> H -> (f, f', h) and H -> (f, f', h) -> H
        f = randgen.identity_morphism(A)
        gamma = {}
        for g in A.generator_names():
            col = A.generators.column(A.generators.index[g])
            gamma[g] = {w: randgen.scalar(R, rnd) for w in A.basis_in_degree(A.generator_degree(g) + 1)
                        if A.key_column(w) <= col + 1}
        f2, h = extend_homotopy(f, gamma)
        bad += not is_algebra_homotopy(h, f, f2)
        H = cylinder_from_homotopy(cyl, f, f2, h)
        bad += not H.is_chain_map()
        g1, g2, k = homotopy_from_cylinder(cyl, H)
        bad += not (g1.equals_on_generators(f) and g2.equals_on_generators(f2))
        bad += any(k.values.get(g, {}) != h.values.get(g, {}) for g in A.generator_names())
        H2 = cylinder_from_homotopy(cyl, g1, g2, k)
        bad += not H2.equals_on_generators(H)
    elapsed = time.time() - t0
    ok = bad == 0 and elapsed < 30
    verdict(4, ok, f"dS + Sd = i'' - i', derivation law and round trips on {words} words "
                   f"of 12 algebras, {bad} failures; {elapsed:.1f}s")
    assert ok


# -- 5 ------------------------------------------------------------------------------

def test_criterion_05_lifting():
    t0 = time.time()
    rnd = random.Random(5)
    rings = [Fp(3), Fp(5), Q(), Zmod(3, 2)]
    solved = homotopic = bad = 0
    for n in range(24):
        R = rings[n % len(rings)]
        S = randgen.free_source(R, rnd)
        A, g = randgen.acyclic_extension(S, rnd)
        P = LiftProblem(S, A, S, g, randgen.identity_morphism(S), S.truncation - 1)
        s1 = adams_hilton_lift(P, seed=2 * n)
        s2 = adams_hilton_lift(P, seed=2 * n + 1)
        if s1.residual_generators or s2.residual_generators or not (s1.filtration_ok() and s2.filtration_ok()):
            bad += 1
            continue
        solved += 1
        K, rel = lifts_homotopic(s1, s2)
        if not rel.residual_generators and is_algebra_homotopy(K, s1.f, s2.f):
            homotopic += 1
    elapsed = time.time() - t0
    ok = solved == 24 and homotopic == 24 and elapsed < 120
    verdict(5, ok, f"{solved}/24 lift problems with zero residuals and filtration discipline, "
                   f"{homotopic}/24 pairs of independent lifts connected; {elapsed:.1f}s")
    assert ok


# -- 6 ------------------------------------------------------------------------------

def test_criterion_06_minimal_resolutions():
    t0 = time.time()
    ok = True
    notes = []
    for p in (2, 3, 5):
        R = Zmod(p, 2)
        res = minimal_resolution(ModulePresentation(R, 1, [[p]]), 10)
        elems = [R(x) for x in range(R.modulus)]
        kernel = {x for x in elems if not R(p * x)}
        image = {R(p * x) for x in elems}
        good = (res.ranks == [1] * 11 and all(D == [[p]] for D in res.deltas)
                and res.is_minimal() and res.is_exact() and kernel == image)
        for j in range(1, len(res.deltas)):
            ker = {v[0] for v in itertools.product(elems, repeat=1) if not any(matvec(R, res.deltas[j - 1], list(v)))}
            good = good and ker == {matvec(R, res.deltas[j], [x])[0] for x in elems}
        notes.append(f"Z/{p} over Z/{p * p}: {'ok' if good else 'wrong'}")
        ok = ok and good
        F = Fp(p)
        for rels in ([], [[1, 1]], [[0, 0]]):
            r = minimal_resolution(ModulePresentation(F, 2, rels), 10)
            ok = ok and r.deltas == []
    elapsed = time.time() - t0
    ok = ok and elapsed < 5
    verdict(6, ok, f"{'; '.join(notes)}; field resolutions stop at stage 0; {elapsed:.1f}s")
    assert ok


# -- 7 ------------------------------------------------------------------------------

def _brute_homology(R, T, n, comp, A):
    """``(|H_n(model)|, surjective on H_n(A))`` by enumeration (``A`` with zero differential)."""
    elems = [R(x) for x in range(R.modulus)]
    words = T.basis_in_degree(n)
    lower = T.basis_in_degree(n - 1) if n else []
    upper = T.basis_in_degree(n + 1)

    def image(coeffs, basis, target):
        out = [R.zero()] * len(target)
        idx = {w: i for i, w in enumerate(target)}
        for c, w in zip(coeffs, basis):
            if c:
                for u, v in T.d({w: c}).items():
                    out[idx[u]] = R(out[idx[u]] + v)
        return tuple(out)

    cycles = [v for v in itertools.product(elems, repeat=len(words)) if not any(image(v, words, lower))]
    boundaries = {image(v, upper, words) for v in itertools.product(elems, repeat=len(upper))}
    targets = [a for a, d in A.basis if d == n]
    reached = set()
    for v in cycles:
        x = comp.apply({w: c for w, c in zip(words, v) if c})
        reached.add(tuple(R(x.get(a, 0)) for a in targets))
    return len(cycles) // len(boundaries), len(reached) == len(elems) ** len(targets)


def test_criterion_07_field_model():
    t0 = time.time()
    R = Fp(3)
    A = exterior_dga(R, 6)
    M = minimal_multimodel(A, 6)
    T = M.algebra
    degrees = sorted(T.generator_degree(g) for g in T.generator_names())
    z = {T.generator_degree(g): g for g in T.generator_names()}
    beta1_zero = all(len(w) >= 2 for g in z.values() for w in T.differential.get(g, {}))
    shape = all(set(T.differential.get(z[k], {})) == {(z[i], z[k - 1 - i]) for i in range(1, k - 1, 2)}
                for k in (1, 3, 5))
    d2 = not T.d_squared_defects()
    homology = []
    for n in range(6):
        order, onto = _brute_homology(R, T, n, M.composite, A)
        expected = 3 if n <= 1 else 1  # H(A) = F_3 in degrees 0 and 1
        homology.append(order == expected and onto)
    table = certify(M)["homology_iso"]
    elapsed = time.time() - t0
    ok = degrees == [1, 3, 5] and beta1_zero and shape and d2 and all(homology) \
        and all(s == "iso" for _n, s in table) and elapsed < 60
    verdict(7, ok, f"generator degrees {degrees}, beta_1 = 0: {beta1_zero}, d'(z_k) = sum z_i z_j: {shape}, "
                   f"d'^2 = 0: {d2}, brute-force homology iso in degrees 0..5: {all(homology)}; {elapsed:.1f}s")
    assert ok


# -- 8 ------------------------------------------------------------------------------

def test_criterion_08_local_model():
    t0 = time.time()
    M = minimal_multimodel(torsion_dga(Zmod(3, 2), 5), 5)
    c = certify(M)
    weak = [t for t in c["weak_equivalence"] if t[1] <= 4]
    failed_weak = [t[:2] for t in weak if t[2] != "iso"]
    elapsed = time.time() - t0
    parts = {
        "d_squared": c["d_squared"] == "zero",
        "chain_map": c["comparison_chain_map"] == "zero",
        "minimal": c["minimal"] is True,
        "weak_equivalence": not failed_weak,
    }
    ok = all(parts.values()) and elapsed < 300
    verdict(8, ok, f"{parts}; homology iso {[s for _n, s in c['homology_iso']]}; "
                   f"filtered stages failing at (q, n) = {failed_weak}; {elapsed:.1f}s")
    assert ok


# -- 9 ------------------------------------------------------------------------------

def test_criterion_09_uniqueness():
    t0 = time.time()
    outcome = {}
    for name, A in (("F_3 exterior", exterior_dga(Fp(3), 6)), ("Z/9 torsion", torsion_dga(Zmod(3, 2), 5))):
        try:
            rnd = random.Random(9)
            B = A.permuted([A.unit] + rnd.sample(A.ideal, len(A.ideal)))
            iso = models_isomorphic(minimal_multimodel(A), minimal_multimodel(B, seed=11))
            outcome[name] = all(v in ("zero", True) for v in iso.certificates.values())
        except Exception as exc:  # the failure itself is the verdict
            outcome[name] = f"{type(exc).__name__}: {exc}"
    elapsed = time.time() - t0
    ok = all(v is True for v in outcome.values()) and elapsed < 300
    verdict(9, ok, f"{outcome}; {elapsed:.1f}s")
    assert ok


# -- 10 -----------------------------------------------------------------------------

def test_criterion_10_cli(tmp_path):
    t0 = time.time()
    data = Path(__file__).resolve().parent.parent / "demos" / "data"
    same = residual_free = True
    for name in ("exterior_f3", "torsion_z9"):
        outs = []
        for run in range(2):
            out = tmp_path / f"{name}_{run}.json"
            cli_main(["model", "--input", str(data / f"{name}.json"), "--out", str(out)])
            outs.append(out.read_bytes())
        same = same and outs[0] == outs[1]
        check = tmp_path / f"{name}_check.json"
        cli_main(["check-model", str(tmp_path / f"{name}_0.json"), "--out", str(check)])
        doc = json.loads(check.read_text())
        residual_free = residual_free and doc["consistency"] == "zero" and doc["matches_recorded"] \
            and doc["certificates"]["d_squared"] == "zero" \
            and doc["certificates"]["comparison_chain_map"] == "zero"
    elapsed = time.time() - t0
    ok = same and residual_free and elapsed < 60
    verdict(10, ok, f"byte-identical reruns: {same}; check-model residuals zero: {residual_free}; {elapsed:.1f}s")
    assert ok


if __name__ == "__main__":
    import tempfile
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                pass
