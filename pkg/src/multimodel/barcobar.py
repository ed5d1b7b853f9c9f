"""Bar and cobar constructions of connected DGAs, truncated in degree.

Conventions, fixed once and certified by ``d^2 = 0`` and chain-map tests:

* a bar word ``[a_1|...|a_n]`` has degree ``n + sum |a_i|``;
* ``d[a_1|...|a_n] = sum_i (-1)^(e_i + 1) [..|d a_i|..] + sum_i (-1)^(e_(i+1)) [..|a_i a_(i+1)|..]``
  with ``e_i = sum_{j<i} (|a_j| + 1)``;
* the coproduct is unsigned deconcatenation;
* on cobar generators ``d(s^-1 c) = -s^-1(dc) + sum (-1)^|c'| (s^-1 c')(s^-1 c'')``
  summed over the reduced coproduct of ``c``, extended as a derivation.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .ring import parse_ring
from .multicomplex import ChainComplex, associated_multicomplex
from .bigraded import BigradedModule
from .freealg import FreeMultialgebra, FiniteMultialgebra, AlgebraMorphism, add

__all__ = [
    "DGAPresentation", "InvalidDGA", "BarCoalgebra", "bar", "cobar", "cobar_bar_adjoint",
    "homology_JBA", "bar_map", "bar_name", "desusp_name", "trivial_dga", "exterior_dga",
    "torsion_dga",
]


class InvalidDGA(ValueError):
    def __init__(self, problems):
        super().__init__("; ".join(problems))
        self.problems = problems


def bar_name(word):
    return "[" + "|".join(word) + "]"


def desusp_name(word):
    return "s^-1" + bar_name(word)


@dataclass
class DGAPresentation:
    """Connected DGA free on a named graded basis, known in degrees ``<= truncation``.

    ``mul`` maps ``(a, b)`` to ``{c: coeff}`` and ``diff`` maps ``a`` to
    ``{b: coeff}``; missing entries are zero and products with the unit are
    implicit.
    """

    ring: object
    basis: list
    mul: dict
    diff: dict
    truncation: int

    def __post_init__(self):
        R = self.ring
        self.basis = [(str(n), int(d)) for n, d in self.basis]
        self.degree = {n: d for n, d in self.basis}
        units = [n for n, d in self.basis if d == 0]
        self.unit = units[0] if len(units) == 1 else None
        self.mul = {(a, b): {c: R(v) for c, v in img.items() if R(v)} for (a, b), img in self.mul.items()}
        self.diff = {a: {b: R(v) for b, v in img.items() if R(v)} for a, img in self.diff.items()}
        self._order = {n: i for i, (n, _d) in enumerate(self.basis)}

    # -- construction ----------------------------------------------------
    @classmethod
    def from_json(cls, data):
        R = parse_ring(data["ring"])
        mul = {}
        for a, b, terms in data.get("mul", []):
            mul[(a, b)] = {c: R.parse_scalar(v) for v, c in terms}
        diff = {a: {b: R.parse_scalar(v) for v, b in terms} for a, terms in data.get("diff", [])}
        return cls(R, [tuple(b) for b in data["basis"]], mul, diff, int(data["truncation"]))

    def to_json(self):
        R = self.ring
        return {
            "ring": str(R),
            "basis": [[n, d] for n, d in self.basis],
            "mul": [[a, b, [[R.format_scalar(v), c] for c, v in img.items()]]
                    for (a, b), img in sorted(self.mul.items(), key=lambda t: (self._order[t[0][0]], self._order[t[0][1]]))
                    if img],
            "diff": [[a, [[R.format_scalar(v), b] for b, v in img.items()]]
                     for a, img in sorted(self.diff.items(), key=lambda t: self._order[t[0]]) if img],
            "truncation": self.truncation,
        }

    # -- arithmetic --------------------------------------------------------
    @property
    def ideal(self):
        """Basis of the augmentation ideal, in basis order."""
        return [n for n, d in self.basis if n != self.unit]

    def element_degree(self, a):
        return self.degree[a]

    def times(self, x, y):
        """Product of elements ``{name: coeff}``; degrees above the truncation are dropped."""
        R = self.ring
        out = defaultdict(R.zero)
        for a, u in x.items():
            for b, v in y.items():
                if self.degree[a] + self.degree[b] > self.truncation:
                    continue
                if a == self.unit:
                    out[b] = R(out[b] + u * v)
                elif b == self.unit:
                    out[a] = R(out[a] + u * v)
                else:
                    for c, w in self.mul.get((a, b), {}).items():
                        out[c] = R(out[c] + u * v * w)
        return {k: v for k, v in out.items() if v}

    def d(self, x):
        R = self.ring
        out = defaultdict(R.zero)
        for a, u in x.items():
            for b, w in self.diff.get(a, {}).items():
                out[b] = R(out[b] + u * w)
        return {k: v for k, v in out.items() if v}

    # -- checks ------------------------------------------------------------
    def problems(self):
        """Human-readable list of violated axioms (empty when valid)."""
        R = self.ring
        out = []
        if self.unit is None:
            return ["degree 0 must be spanned by exactly one basis element (the unit)"]
        if len(self.degree) != len(self.basis):
            out.append("basis names are not unique")
        for n, d in self.basis:
            if d < 0:
                out.append(f"{n} has negative degree")
        for (a, b), img in self.mul.items():
            for c in img:
                if c not in self.degree or a not in self.degree or b not in self.degree:
                    out.append(f"unknown name in product {a}*{b}")
                elif self.degree[c] != self.degree[a] + self.degree[b]:
                    out.append(f"{a}*{b} -> {c} has the wrong degree")
            if self.unit in (a, b) and img != ({b: 1} if a == self.unit else {a: 1}):
                out.append(f"product with the unit {a}*{b} is not the identity")
        for a, img in self.diff.items():
            for b in img:
                if b not in self.degree or a not in self.degree:
                    out.append(f"unknown name in d({a})")
                elif self.degree[b] != self.degree[a] - 1:
                    out.append(f"d({a}) -> {b} has the wrong degree")
        if out:
            return out
        if self.diff.get(self.unit):
            out.append("d(1) != 0")
        for a in self.ideal:
            if self.degree[a] == 1 and self.d({a: 1}):
                out.append(f"augmentation is not a chain map: d({a}) != 0 in degree 0")
        N = self.truncation
        names = [n for n, _d in self.basis]
        for a in names:
            if self.d(self.d({a: 1})):
                out.append(f"d(d({a})) != 0")
        for a in names:
            for b in names:
                if self.degree[a] + self.degree[b] > N:
                    continue
                lhs = self.d(self.times({a: 1}, {b: 1}))
                sign = -1 if self.degree[a] % 2 else 1
                rhs = add(R, self.times(self.d({a: 1}), {b: 1}), self.times({a: 1}, self.d({b: 1})), sign)
                if add(R, lhs, rhs, -1):
                    out.append(f"Leibniz rule fails on ({a}, {b})")
                for c in names:
                    if self.degree[a] + self.degree[b] + self.degree[c] > N:
                        continue
                    l = self.times(self.times({a: 1}, {b: 1}), {c: 1})
                    r = self.times({a: 1}, self.times({b: 1}, {c: 1}))
                    if add(R, l, r, -1):
                        out.append(f"associativity fails on ({a}, {b}, {c})")
        return out

    def validate(self):
        bad = self.problems()
        if bad:
            raise InvalidDGA(bad)
        return self

    # -- views -------------------------------------------------------------
    def chain_complex(self) -> ChainComplex:
        return ChainComplex(self.ring, self.basis, self.diff)

    def associated(self) -> FiniteMultialgebra:
        """The DGA as a multialgebra concentrated in row 0 (differential ``d^1``)."""
        mul = {}
        for (a, b), img in self.mul.items():
            if self.degree[a] + self.degree[b] <= self.truncation:
                mul[(a, b)] = img
        return FiniteMultialgebra(self.ring, [(n, d, 0) for n, d in self.basis], mul, self.diff, self.unit)

    def permuted(self, order):
        """Same DGA with the basis listed in ``order`` (a permutation of names)."""
        pos = {n: i for i, (n, _d) in enumerate(self.basis)}
        return DGAPresentation(self.ring, [self.basis[pos[n]] for n in order], self.mul, self.diff, self.truncation)


# ---------------------------------------------------------------------------
# bar construction

class BarCoalgebra:
    """Truncated bar construction ``BA``; ``words`` excludes the empty word, so it spans ``JBA``."""

    def __init__(self, A: DGAPresentation, max_degree):
        self.algebra = A
        self.ring = A.ring
        self.max_degree = max_degree
        letters = [(a, A.degree[a] + 1) for a in A.ideal]
        words = []

        def grow(prefix, deg):
            for a, w in letters:
                if deg + w <= max_degree:
                    word = prefix + (a,)
                    words.append(word)
                    grow(word, deg + w)

        grow((), 0)
        order = {a: i for i, a in enumerate(A.ideal)}
        words.sort(key=lambda w: (self.word_degree(w), len(w), [order[a] for a in w]))
        self.words = words
        self.index = {w: i for i, w in enumerate(words)}

    def word_degree(self, w):
        return len(w) + sum(self.algebra.degree[a] for a in w)

    def d(self, x):
        """Bar differential of ``{word: coeff}``."""
        A, R = self.algebra, self.ring
        out = defaultdict(R.zero)
        for w, c in x.items():
            eps = 0
            for i, a in enumerate(w):
                sign = -1 if (eps + 1) % 2 else 1
                for b, v in A.d({a: 1}).items():
                    if b == A.unit:
                        continue
                    key = w[:i] + (b,) + w[i + 1:]
                    out[key] = R(out[key] + sign * c * v)
                eps += A.degree[a] + 1
                if i + 1 < len(w):
                    sign = -1 if eps % 2 else 1
                    for b, v in A.times({a: 1}, {w[i + 1]: 1}).items():
                        if b == A.unit:
                            continue
                        key = w[:i] + (b,) + w[i + 2:]
                        out[key] = R(out[key] + sign * c * v)
        return {k: v for k, v in out.items() if v}

    def coproduct(self, w, reduced=True):
        """Deconcatenation ``[(left, right)]``; the reduced version drops empty factors."""
        rng = range(1, len(w)) if reduced else range(0, len(w) + 1)
        return [(w[:k], w[k:]) for k in rng]

    def chain_complex(self) -> ChainComplex:
        """``JBA`` as a chain complex with basis names ``[a|b|...]``."""
        diff = {}
        for w in self.words:
            img = self.d({w: 1})
            if img:
                diff[bar_name(w)] = {bar_name(u): v for u, v in img.items()}
        return ChainComplex(self.ring, [(bar_name(w), self.word_degree(w)) for w in self.words], diff)

    def multicomplex(self):
        return associated_multicomplex(self.chain_complex())

    def to_json(self):
        R = self.ring
        return {
            "ring": str(R),
            "max_degree": self.max_degree,
            "basis": [[list(w), self.word_degree(w)] for w in self.words],
            "differential": [[list(w), [[list(u), R.format_scalar(v)] for u, v in sorted(
                self.d({w: 1}).items(), key=lambda t: self.index[t[0]])]]
                for w in self.words if self.d({w: 1})],
        }


def bar(A: DGAPresentation, max_degree=None) -> BarCoalgebra:
    """Bar words up to ``max_degree`` (default ``truncation + 1``, enough for the cobar in degrees ``<= N``)."""
    return BarCoalgebra(A, A.truncation + 1 if max_degree is None else max_degree)


def bar_map(f, A: DGAPresentation, B: DGAPresentation, max_degree=None):
    """``[a_1|...|a_n] -> [f a_1|...|f a_n]`` for a DGA map given by ``{a: element of B}``.

    Returns ``(BA, BB, {word: image})``.
    """
    BA, BB = bar(A, max_degree), bar(B, max_degree)
    R = A.ring
    images = {}
    for w in BA.words:
        acc = {(): R.one()}
        for a in w:
            nxt = defaultdict(R.zero)
            for u, c in acc.items():
                for b, v in f.get(a, {}).items():
                    if b == B.unit:
                        continue
                    nxt[u + (b,)] = R(nxt[u + (b,)] + c * v)
            acc = {k: v for k, v in nxt.items() if v}
        images[w] = acc
    return BA, BB, images


# ---------------------------------------------------------------------------
# cobar construction

def cobar(C: BarCoalgebra, truncation=None) -> FreeMultialgebra:
    """``Omega`` on the coideal: tensor algebra on ``s^-1 c``, generators at ``(|c| - 1, 0)``."""
    R = C.ring
    N = C.max_degree - 1 if truncation is None else truncation
    gens = [w for w in C.words if C.word_degree(w) - 1 <= N]
    V = BigradedModule(R, [(desusp_name(w), C.word_degree(w) - 1, 0) for w in gens])
    name = {w: desusp_name(w) for w in gens}
    diff = {}
    for w in gens:
        img = defaultdict(R.zero)
        for u, v in C.d({w: 1}).items():
            img[(name[u],)] = R(img[(name[u],)] - v)
        for left, right in C.coproduct(w):
            sign = -1 if C.word_degree(left) % 2 else 1
            key = (name[left], name[right])
            img[key] = R(img[key] + sign)
        img = {k: v for k, v in img.items() if v}
        if img:
            diff[name[w]] = img
    Om = FreeMultialgebra(V, diff, N)
    Om.bar_words = {name[w]: w for w in gens}
    return Om


def cobar_bar_adjoint(A: DGAPresentation, Omega: FreeMultialgebra = None) -> AlgebraMorphism:
    """``Omega B A -> A``: ``s^-1[a] -> a`` and longer words to zero."""
    if Omega is None:
        Omega = cobar(bar(A))
    target = A.associated()
    images = {}
    for g, w in Omega.bar_words.items():
        if len(w) == 1:
            images[g] = {w[0]: A.ring.one()}
    return AlgebraMorphism(Omega, target, images)


def homology_JBA(A: DGAPresentation, k, C: BarCoalgebra = None):
    """``H_k(JBA)`` as a module presentation."""
    C = C if C is not None else bar(A, max(k + 1, A.truncation + 1))
    return C.chain_complex().homology(k)


# ---------------------------------------------------------------------------
# standard examples

def trivial_dga(R, N=4):
    return DGAPresentation(R, [("1", 0)], {}, {}, N)


def exterior_dga(R, N=6):
    """``x`` in degree 1 with ``d x = 0`` and ``x^2 = 0``."""
    return DGAPresentation(R, [("1", 0), ("x", 1)], {}, {}, N)


def torsion_dga(R, N=5):
    """``x`` in degree 1, ``y`` in degree 2, ``d y = 3 x`` and all products zero."""
    return DGAPresentation(R, [("1", 0), ("x", 1), ("y", 2)], {}, {"y": {"x": 3}}, N)
