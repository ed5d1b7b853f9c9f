"""Free multialgebras ``T[V]`` and their morphisms, derivations and homotopies.

Elements of an algebra are sparse dictionaries ``{key: scalar}``.  For a
tensor algebra the keys are words (tuples of generator names, ``()`` is the
unit); for finite algebras such as an associated multialgebra they are
basis names.  Both kinds of algebra expose the same small protocol:
``ring``, ``one()``, ``mul``, ``d``, ``key_bidegree``, ``key_degree`` and
``basis_in_degree``, which is all morphisms and the lifting code need.

Signs follow total degree: a derivation ``D`` of degree ``|D|`` acts on a
word by ``D(ab) = D(a) f2(b) + (-1)^{|D||a|} f1(a) D(b)``.
"""

from __future__ import annotations

from collections import defaultdict

from .bigraded import BigradedModule, Multimorphism, invert, NotInvertible
from .multicomplex import Multicomplex, cylinder_multicomplex

__all__ = [
    "add", "scale", "sub", "clean", "FreeMultialgebra", "FiniteMultialgebra",
    "AlgebraMorphism", "Derivation", "extend_derivation", "extend_morphism",
    "is_algebra_iso", "algebra_inverse", "Cylinder", "cylinder",
    "homotopy_from_cylinder", "cylinder_from_homotopy", "extend_homotopy",
    "indecomposables", "is_algebra_homotopy", "word_name", "ChainConditionError",
]


class ChainConditionError(ValueError):
    """Raised with the offending generators when ``d f != f d``."""

    def __init__(self, generators):
        super().__init__(f"chain condition fails on {generators}")
        self.generators = generators


# ---------------------------------------------------------------------------
# sparse element arithmetic

def clean(R, a):
    return {k: R(v) for k, v in a.items() if R(v)}


def add(R, a, b, c=1):
    out = dict(a)
    for k, v in b.items():
        out[k] = R(out.get(k, 0) + c * v)
    return {k: v for k, v in out.items() if v}


def sub(R, a, b):
    return add(R, a, b, -1)


def scale(R, a, c):
    return {k: R(c * v) for k, v in a.items() if R(c * v)}


def word_name(word):
    return ".".join(word) if word else "1"


# ---------------------------------------------------------------------------
# algebras

class FreeMultialgebra:
    """``T[V]`` with a multiderivation differential given on generators.

    ``generators`` is a bigraded module whose basis elements have total
    degree at least 1.  ``differential`` maps generator names to elements
    (dicts keyed by words).  Products of total degree above ``truncation``
    are dropped, so identities are meaningful in degrees ``<= truncation``.
    """

    def __init__(self, generators: BigradedModule, differential=None, truncation=6):
        self.generators = generators
        self.ring = generators.ring
        self.truncation = truncation
        for (n, p, q) in generators.basis:
            if p + q < 1:
                raise ValueError(f"generator {n} has total degree {p + q} < 1")
        self._gen = {n: (p, q) for (n, p, q) in generators.basis}
        self._order = {n: i for i, (n, _p, _q) in enumerate(generators.basis)}
        self.differential = {}
        for n, img in (differential or {}).items():
            img = clean(self.ring, {tuple(w): v for w, v in img.items()})
            if img:
                self.differential[n] = img
        self._words = {}
        for n, img in self.differential.items():
            for w in img:
                if self.key_degree(w) != self.key_degree((n,)) - 1:
                    raise ValueError(f"d({n}) is not of degree -1")

    # protocol ---------------------------------------------------------
    def one(self):
        return {(): self.ring.one()}

    def key_bidegree(self, word):
        p = q = 0
        for g in word:
            a, b = self._gen[g]
            p += a
            q += b
        return p, q

    def key_degree(self, word):
        return sum(self._gen[g][0] + self._gen[g][1] for g in word)

    def key_column(self, word):
        return sum(self._gen[g][0] for g in word)

    def sort_key(self, word):
        return (len(word), [self._order[g] for g in word])

    def basis_in_degree(self, n):
        if n in self._words:
            return self._words[n]
        if n < 0:
            return []
        if n == 0:
            return [()]
        out = []
        for g, (p, q) in self._gen.items():
            dg = p + q
            if dg <= n:
                out.extend((g,) + w for w in self.basis_in_degree(n - dg))
        out.sort(key=self.sort_key)
        self._words[n] = out
        return out

    def mul(self, a, b):
        R = self.ring
        out = defaultdict(R.zero)
        N = self.truncation
        for u, x in a.items():
            du = self.key_degree(u)
            for w, y in b.items():
                if N is not None and du + self.key_degree(w) > N:
                    continue
                out[u + w] = R(out[u + w] + x * y)
        return {k: v for k, v in out.items() if v}

    def d(self, a):
        return self._derivation_apply(a, self.differential, -1)

    def _derivation_apply(self, a, values, degree):
        R = self.ring
        out = defaultdict(R.zero)
        for w, c in a.items():
            prefix_deg = 0
            for i, g in enumerate(w):
                img = values.get(g)
                if img:
                    sign = -1 if (degree * prefix_deg) % 2 else 1
                    left, right = w[:i], w[i + 1:]
                    for u, x in img.items():
                        key = left + u + right
                        out[key] = R(out[key] + sign * c * x)
                prefix_deg += self.key_degree((g,))
        return {k: v for k, v in out.items() if v}

    # structure --------------------------------------------------------
    def generator_names(self):
        return [n for (n, _p, _q) in self.generators.basis]

    def generator_degree(self, g):
        p, q = self._gen[g]
        return p + q

    def d_squared_defects(self):
        """Generators ``v`` with ``d d v != 0`` (sufficient for ``dd = 0`` everywhere)."""
        return [g for g in self.generator_names()
                if self.generator_degree(g) <= self.truncation and self.d(self.d({(g,): 1}))]

    def multidifferential_ok(self):
        """Every term of ``d v`` sits at column ``<= column(v)``."""
        for g, img in self.differential.items():
            for w in img:
                if self.key_column(w) > self._gen[g][0]:
                    return False
        return True

    def linear_part(self) -> Multicomplex:
        """``(V, beta_1)``: the word-length-one part of the differential."""
        V = self.generators
        F = {}
        for g, img in self.differential.items():
            for w, v in img.items():
                if len(w) == 1:
                    F[(V.index[g], V.index[w[0]])] = v
        from .bigraded import components_of_graded_map
        return Multicomplex(V, components_of_graded_map(V, V, F, -1, 0))

    def bigraded_basis(self, max_degree=None):
        """Words of degree ``<= max_degree`` as a bigraded module."""
        top = self.truncation if max_degree is None else max_degree
        basis = []
        for n in range(0, top + 1):
            for w in self.basis_in_degree(n):
                p, q = self.key_bidegree(w)
                basis.append((word_name(w), p, q))
        return BigradedModule(self.ring, basis)

    def to_json(self):
        R = self.ring
        return {
            "ring": str(R),
            "generators": [list(b) for b in self.generators.basis],
            "differential": [[g, [[list(w), R.format_scalar(v)]
                                  for w, v in sorted(img.items(), key=lambda t: self.sort_key(t[0]))]]
                             for g, img in sorted(self.differential.items(),
                                                  key=lambda t: self._order[t[0]])],
            "truncation": self.truncation,
        }

    @classmethod
    def from_json(cls, data):
        from .ring import parse_ring
        R = parse_ring(data["ring"])
        V = BigradedModule(R, data["generators"])
        diff = {g: {tuple(w): R.parse_scalar(v) for w, v in terms} for g, terms in data["differential"]}
        return cls(V, diff, data.get("truncation"))


class FiniteMultialgebra:
    """Multialgebra with a finite named basis, e.g. the associated multialgebra of a DGA.

    ``mul_table`` maps ``(a, b)`` to an element and ``diff`` maps a name to an
    element; missing entries are zero.  ``unit`` names the unit.
    """

    def __init__(self, ring, basis, mul_table, diff, unit):
        self.ring = ring
        self.basis = [(str(n), int(p), int(q)) for (n, p, q) in basis]
        self._bideg = {n: (p, q) for (n, p, q) in self.basis}
        self.mul_table = {k: clean(ring, v) for k, v in mul_table.items()}
        self.diff = {k: clean(ring, v) for k, v in diff.items()}
        self.unit = unit
        by_deg = defaultdict(list)
        for (n, p, q) in self.basis:
            by_deg[p + q].append(n)
        self._by_deg = by_deg
        self._order = {n: i for i, (n, _p, _q) in enumerate(self.basis)}
        self.truncation = None

    def one(self):
        return {self.unit: self.ring.one()}

    def key_bidegree(self, k):
        return self._bideg[k]

    def key_degree(self, k):
        p, q = self._bideg[k]
        return p + q

    def key_column(self, k):
        return self._bideg[k][0]

    def sort_key(self, k):
        return self._order[k]

    def basis_in_degree(self, n):
        return list(self._by_deg.get(n, []))

    def mul(self, a, b):
        R = self.ring
        out = defaultdict(R.zero)
        for u, x in a.items():
            for w, y in b.items():
                if u == self.unit:
                    out[w] = R(out[w] + x * y)
                elif w == self.unit:
                    out[u] = R(out[u] + x * y)
                else:
                    for t, z in self.mul_table.get((u, w), {}).items():
                        out[t] = R(out[t] + x * y * z)
        return {k: v for k, v in out.items() if v}

    def d(self, a):
        R = self.ring
        out = defaultdict(R.zero)
        for u, x in a.items():
            for t, z in self.diff.get(u, {}).items():
                out[t] = R(out[t] + x * z)
        return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# morphisms and derivations

class AlgebraMorphism:
    """Multiplicative extension of generator images ``alpha: V -> B``.

    ``source`` is a :class:`FreeMultialgebra`; ``target`` any algebra
    following the protocol.  The images are the data; words are evaluated
    lazily and cached.
    """

    def __init__(self, source: FreeMultialgebra, target, images):
        self.source = source
        self.target = target
        R = source.ring
        self.images = {g: clean(R, img) for g, img in images.items()}
        self._cache = {(): target.one()}

    def image(self, g):
        return self.images.get(g, {})

    def apply_word(self, w):
        if w in self._cache:
            return self._cache[w]
        head = self.apply_word(w[:-1])
        val = self.target.mul(head, self.image(w[-1])) if head else {}
        self._cache[w] = val
        return val

    def apply(self, a):
        R = self.source.ring
        out = {}
        for w, c in a.items():
            out = add(R, out, self.apply_word(w), c)
        return out

    def chain_defects(self):
        """``{g: d f(g) - f(d g)}`` for generators where it is non-zero."""
        R = self.source.ring
        bad = {}
        for g in self.source.generator_names():
            if self.source.generator_degree(g) > self.source.truncation:
                continue
            r = sub(R, self.target.d(self.image(g)), self.apply(self.source.d({(g,): 1})))
            if r:
                bad[g] = r
        return bad

    def is_chain_map(self):
        return not self.chain_defects()

    def component_indices(self):
        """Component indices ``column(v) - column(term)`` of all generator images."""
        S = self.source
        idx = set()
        for g, img in self.images.items():
            c = S.generators.column(S.generators.index[g])
            for k in img:
                idx.add(c - self.target.key_column(k))
        return idx

    def preserves_column_filtration(self):
        return all(k >= 0 for k in self.component_indices())

    def linear_part(self) -> Multimorphism:
        """``alpha_1: V -> W`` when the target is a tensor algebra."""
        V = self.source.generators
        W = self.target.generators
        F = {}
        for g, img in self.images.items():
            for w, v in img.items():
                if len(w) == 1:
                    F[(V.index[g], W.index[w[0]])] = v
        from .bigraded import components_of_graded_map
        return components_of_graded_map(V, W, F, 0, 0)

    def compose(self, other: "AlgebraMorphism") -> "AlgebraMorphism":
        """``self o other``."""
        return AlgebraMorphism(other.source, self.target,
                               {g: self.apply(img) for g, img in other.images.items()})

    def equals_on_generators(self, other):
        R = self.source.ring
        return all(not sub(R, self.image(g), other.image(g)) for g in self.source.generator_names())


class Derivation:
    """``f1``-``f2``-derivation ``T[V] -> B`` of degree ``degree``, given on generators."""

    def __init__(self, source: FreeMultialgebra, target, values, degree, f1=None, f2=None):
        self.source = source
        self.target = target
        self.degree = degree
        R = source.ring
        self.values = {g: clean(R, v) for g, v in values.items()}
        self.f1 = f1
        self.f2 = f2
        self._cache = {}

    def _f(self, f, w):
        if f is None:
            return {w: self.source.ring.one()}
        return f.apply_word(w)

    def apply_word(self, w):
        if w in self._cache:
            return self._cache[w]
        R = self.source.ring
        T = self.target
        out = {}
        prefix_deg = 0
        for i, g in enumerate(w):
            val = self.values.get(g)
            if val:
                sign = -1 if (self.degree * prefix_deg) % 2 else 1
                left = self._f(self.f1, w[:i])
                right = self._f(self.f2, w[i + 1:])
                if left and right:
                    out = add(R, out, T.mul(T.mul(left, val), right), sign)
            prefix_deg += self.source.generator_degree(g)
        self._cache[w] = out
        return out

    def apply(self, a):
        R = self.source.ring
        out = {}
        for w, c in a.items():
            out = add(R, out, self.apply_word(w), c)
        return out


def extend_derivation(A: FreeMultialgebra, beta, target=None, f1=None, f2=None, degree=-1):
    """Unique ``f1``-``f2``-derivation extending ``beta`` (default: identity maps)."""
    T = target if target is not None else A
    for g, img in beta.items():
        gd = A.generator_degree(g)
        for k in img:
            if T.key_degree(k) != gd + degree:
                raise ValueError(f"beta({g}) has the wrong degree")
    return Derivation(A, T, beta, degree, f1, f2)


def extend_morphism(source: FreeMultialgebra, target, alpha, check=True) -> AlgebraMorphism:
    """Multiplicative extension of ``alpha``; raises :class:`ChainConditionError` on failure."""
    for g, img in alpha.items():
        gd = source.generator_degree(g)
        for k in img:
            if target.key_degree(k) != gd:
                raise ValueError(f"alpha({g}) is not of degree 0")
    f = AlgebraMorphism(source, target, alpha)
    if check:
        bad = f.chain_defects()
        if bad:
            raise ChainConditionError(sorted(bad))
    return f


def is_algebra_iso(f: AlgebraMorphism) -> bool:
    """An algebra map between tensor algebras is invertible iff its linear part is."""
    try:
        invert(f.linear_part())
    except NotInvertible:
        return False
    return True


def algebra_inverse(f: AlgebraMorphism) -> AlgebraMorphism:
    """Two-sided inverse of an algebra isomorphism ``T[V] -> T[W]``.

    With ``a = alpha_1^{-1}`` the inverse is built degree by degree from
    ``g(w) = a(w) - g(f(a(w)) - w)``, the correction only involving
    words of length at least two in lower degree generators.
    """
    V, W = f.source, f.target
    R = V.ring
    a = invert(f.linear_part())
    a_img = defaultdict(dict)
    for (j, i), v in a.flat().items():
        a_img[W.generators.name(j)][(V.generators.name(i),)] = v
    images = {}
    g = AlgebraMorphism(W, V, images)
    for w in sorted(W.generator_names(), key=lambda n: (W.generator_degree(n), W._order[n])):
        u = a_img.get(w, {})
        fu = f.apply(u)
        higher = {k: c for k, c in fu.items() if len(k) != 1}
        corr = g.apply(higher)
        g.images[w] = sub(R, u, corr)
        g._cache = {(): V.one()}
    images = g.images
    return AlgebraMorphism(W, V, images)


def is_algebra_homotopy(h: Derivation, f1: AlgebraMorphism, f2: AlgebraMorphism):
    """``d h + h d = f2 - f1`` on generators, with ``h`` an ``f1``-``f2``-derivation."""
    S, T = h.source, h.target
    R = S.ring
    for g in S.generator_names():
        if S.generator_degree(g) + 1 > (S.truncation or 10 ** 9):
            continue
        lhs = add(R, T.d(h.values.get(g, {})), h.apply(S.d({(g,): 1})))
        rhs = sub(R, f2.image(g), f1.image(g))
        if sub(R, lhs, rhs):
            return False
    return True


# ---------------------------------------------------------------------------
# cylinder

class Cylinder:
    """``A x I = T[V' + V'' + sV]`` with the inclusions and the homotopy ``S``."""

    def __init__(self, A: FreeMultialgebra, algebra, i1, i2, S):
        self.base = A
        self.algebra = algebra
        self.i1 = i1
        self.i2 = i2
        self.S = S


def _prime(g):
    return g + "'"


def _dprime(g):
    return g + "''"


def _susp(g):
    return "s" + g


def cylinder(A: FreeMultialgebra) -> Cylinder:
    """Cylinder on a free multialgebra.

    ``d(sv) = v'' - v' - S(dv)`` where ``S`` is the ``i'``-``i''``-derivation
    with ``S(v) = sv``; ``S(dv)`` only involves generators of lower degree,
    so the differential is defined degree by degree.
    """
    R = A.ring
    basis = [(_prime(n), p, q) for (n, p, q) in A.generators.basis] \
        + [(_dprime(n), p, q) for (n, p, q) in A.generators.basis] \
        + [(_susp(n), p + 1, q) for (n, p, q) in A.generators.basis]
    V = BigradedModule(R, basis)
    rename1 = lambda w: tuple(_prime(x) for x in w)
    rename2 = lambda w: tuple(_dprime(x) for x in w)
    diff = {}
    for g, img in A.differential.items():
        diff[_prime(g)] = {rename1(w): v for w, v in img.items()}
        diff[_dprime(g)] = {rename2(w): v for w, v in img.items()}
    C = FreeMultialgebra(V, diff, (A.truncation or 0) + 1)
    i1 = AlgebraMorphism(A, C, {g: {(_prime(g),): 1} for g in A.generator_names()})
    i2 = AlgebraMorphism(A, C, {g: {(_dprime(g),): 1} for g in A.generator_names()})
    S = Derivation(A, C, {g: {(_susp(g),): 1} for g in A.generator_names()}, 1, i1, i2)
    order = sorted(A.generator_names(), key=lambda n: (A.generator_degree(n), A._order[n]))
    for g in order:
        val = {(_dprime(g),): R.one(), (_prime(g),): R(-1)}
        val = sub(R, val, S.apply(A.d({(g,): 1})))
        C.differential[_susp(g)] = clean(R, val)
    C._words = {}
    return Cylinder(A, C, i1, i2, S)


def homotopy_from_cylinder(cyl: Cylinder, H: AlgebraMorphism):
    """``(f', f'', h)`` with ``f' = H i'``, ``f'' = H i''`` and ``h = H S`` on generators."""
    A = cyl.base
    f1 = H.compose(cyl.i1)
    f2 = H.compose(cyl.i2)
    h = Derivation(A, H.target, {g: H.image(_susp(g)) for g in A.generator_names()}, 1, f1, f2)
    return f1, f2, h


def cylinder_from_homotopy(cyl: Cylinder, f1: AlgebraMorphism, f2: AlgebraMorphism, h: Derivation):
    """The algebra map ``H`` with ``H(v') = f'(v)``, ``H(v'') = f''(v)``, ``H(sv) = h(v)``."""
    images = {}
    for g in cyl.base.generator_names():
        images[_prime(g)] = f1.image(g)
        images[_dprime(g)] = f2.image(g)
        images[_susp(g)] = h.values.get(g, {})
    return AlgebraMorphism(cyl.algebra, f1.target, images)


def extend_homotopy(f: AlgebraMorphism, gamma):
    """``(f', h)`` with ``h|V = gamma`` and ``h: f ~ f'``.

    Generators are treated in order of degree; ``f'(v) = f(v) + d gamma(v) + h(dv)``
    where ``h`` on the decomposable word ``dv`` is the ``f``-``f'``-derivation
    built from the already constructed lower-degree values.
    """
    A, B = f.source, f.target
    R = A.ring
    images = {}
    f2 = AlgebraMorphism(A, B, images)
    h = Derivation(A, B, gamma, 1, f, f2)
    order = sorted(A.generator_names(), key=lambda n: (A.generator_degree(n), A._order[n]))
    for g in order:
        val = add(R, f.image(g), B.d(gamma.get(g, {})))
        val = add(R, val, h.apply(A.d({(g,): 1})))
        f2.images[g] = val
        f2._cache = {(): B.one()}
        h._cache = {}
    f2 = AlgebraMorphism(A, B, f2.images)
    return f2, Derivation(A, B, gamma, 1, f, f2)


def indecomposables(A: FreeMultialgebra) -> Multicomplex:
    """``Q(T[V], d) = (V, beta_1)``."""
    return A.linear_part()


def cylinder_of_indecomposables(A: FreeMultialgebra) -> Multicomplex:
    return cylinder_multicomplex(A.linear_part())
