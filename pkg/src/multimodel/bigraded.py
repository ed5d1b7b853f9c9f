"""Bigraded free modules and multimorphisms.

A multimorphism ``f`` of degree ``eta`` between bigraded modules is a
family of components ``f^k`` sending a basis element at ``(p, q)`` to
elements at ``(p - k, q + k + eta)``.  Components are stored sparsely as
``{k: {(src, dst): scalar}}`` with ``src``/``dst`` basis indices, so most
maps cost one or two small dictionaries.
"""

from __future__ import annotations

from collections import defaultdict

from .ring import LocalRing, parse_ring, identity as _identity_matrix, normal_form

__all__ = [
    "BigradedModule", "TotalObject", "Multimorphism", "BidegreeError",
    "compose", "invert", "components_of_graded_map", "total_morphism",
    "identity_map", "zero_map", "NotInvertible",
]


class BidegreeError(ValueError):
    """A component entry violates the bidegree rule."""


class NotInvertible(ValueError):
    """The leading component of a multimorphism is not invertible."""


class TotalObject:
    """``CX_n = sum_{p+q=n} X_{p,q}``; each degree lists basis indices of ``X``."""

    def __init__(self, module):
        self.module = module
        by_deg = defaultdict(list)
        for i, (_name, p, q) in enumerate(module.basis):
            by_deg[p + q].append(i)
        self.degrees = dict(sorted(by_deg.items()))

    def __getitem__(self, n):
        return self.degrees.get(n, [])

    def dim(self, n):
        return len(self.degrees.get(n, []))

    def bidegree(self, i):
        return self.module.bidegree(i)


class BigradedModule:
    """Free bigraded module with a finite named basis ``[(name, p, q), ...]``."""

    def __init__(self, ring: LocalRing, basis, truncation=None):
        self.ring = ring
        self.basis = [(str(n), int(p), int(q)) for (n, p, q) in basis]
        self.index = {}
        for i, (n, _p, _q) in enumerate(self.basis):
            if n in self.index:
                raise ValueError(f"duplicate basis name {n!r}")
            self.index[n] = i
        self.truncation = truncation

    def __len__(self):
        return len(self.basis)

    def __eq__(self, other):
        return isinstance(other, BigradedModule) and self.ring == other.ring \
            and self.basis == other.basis

    def __hash__(self):
        return hash((self.ring, tuple(self.basis)))

    def __repr__(self):
        return f"BigradedModule({self.ring}, {self.basis})"

    def name(self, i):
        return self.basis[i][0]

    def bidegree(self, i):
        _n, p, q = self.basis[i]
        return p, q

    def column(self, i):
        return self.basis[i][1]

    def degree(self, i):
        _n, p, q = self.basis[i]
        return p + q

    def total_object(self) -> TotalObject:
        return TotalObject(self)

    def filtration_stage(self, p, which="column"):
        """Column stage keeps ``column <= p``; row stage keeps ``row >= p``."""
        if which == "column":
            keep = [b for b in self.basis if b[1] <= p]
        elif which == "row":
            keep = [b for b in self.basis if b[2] >= p]
        else:
            raise ValueError(which)
        return BigradedModule(self.ring, keep, self.truncation)

    def direct_sum(self, other, tags=("1", "2")):
        left = [(f"{n}@{tags[0]}", p, q) for (n, p, q) in self.basis]
        right = [(f"{n}@{tags[1]}", p, q) for (n, p, q) in other.basis]
        return BigradedModule(self.ring, left + right)

    def to_json(self):
        out = {"ring": str(self.ring), "basis": [list(b) for b in self.basis]}
        if self.truncation is not None:
            out["truncation"] = self.truncation
        return out

    @classmethod
    def from_json(cls, data):
        return cls(parse_ring(data["ring"]), data["basis"], data.get("truncation"))


class Multimorphism:
    """Finite family of components ``f^k: X_{p,q} -> Y_{p-k, q+k+eta}``."""

    def __init__(self, source: BigradedModule, target: BigradedModule, eta: int,
                 components=None, check=True):
        self.source = source
        self.target = target
        self.eta = eta
        self.ring = source.ring
        comps = {}
        for k, entries in (components or {}).items():
            clean = {}
            for (i, j), v in entries.items():
                v = self.ring(v)
                if v:
                    clean[(i, j)] = v
            if clean:
                comps[int(k)] = clean
        self.components = dict(sorted(comps.items()))
        if check:
            self._check()

    def _check(self):
        for k, entries in self.components.items():
            for (i, j) in entries:
                p, q = self.source.bidegree(i)
                if self.target.bidegree(j) != (p - k, q + k + self.eta):
                    raise BidegreeError(
                        f"component {k}: {self.source.name(i)} at {(p, q)} -> "
                        f"{self.target.name(j)} at {self.target.bidegree(j)}")

    # -- basic queries -----------------------------------------------
    @property
    def lowest_index(self):
        return min(self.components) if self.components else None

    def preserves_column_filtration(self):
        return not self.components or min(self.components) >= 0

    def component(self, k):
        return self.components.get(k, {})

    def is_zero(self):
        return not self.components

    def __eq__(self, other):
        return isinstance(other, Multimorphism) and self.eta == other.eta \
            and self.source == other.source and self.target == other.target \
            and self.components == other.components

    def __repr__(self):
        return f"Multimorphism(eta={self.eta}, components={self.components})"

    def __add__(self, other):
        return _linear_combination(self, other, 1)

    def __sub__(self, other):
        return _linear_combination(self, other, -1)

    def __neg__(self):
        R = self.ring
        return Multimorphism(self.source, self.target, self.eta,
                             {k: {ij: R(-v) for ij, v in e.items()}
                              for k, e in self.components.items()}, check=False)

    def scale(self, c):
        R = self.ring
        return Multimorphism(self.source, self.target, self.eta,
                             {k: {ij: R(c * v) for ij, v in e.items()}
                              for k, e in self.components.items()}, check=False)

    def flat(self):
        """Entries of the totalised map, ``{(src, dst): scalar}``."""
        out = {}
        for entries in self.components.values():
            out.update(entries)
        return out

    def apply(self, vec):
        """Image of a sparse vector ``{src index: scalar}`` under the total map."""
        R = self.ring
        out = defaultdict(R.zero)
        by_src = defaultdict(list)
        for (i, j), v in self.flat().items():
            by_src[i].append((j, v))
        for i, c in vec.items():
            for j, v in by_src.get(i, ()):
                out[j] = R(out[j] + c * v)
        return {j: v for j, v in out.items() if v}

    def total_matrix(self, n):
        """Dense matrix ``CY_{n+eta} x CX_n`` of the totalised map."""
        src = self.source.total_object()[n]
        tgt = self.target.total_object()[n + self.eta]
        spos = {i: a for a, i in enumerate(src)}
        tpos = {j: b for b, j in enumerate(tgt)}
        R = self.ring
        M = [[R.zero()] * len(src) for _ in tgt]
        for (i, j), v in self.flat().items():
            if i in spos:
                M[tpos[j]][spos[i]] = v
        return M

    def to_json(self):
        R = self.ring
        return {
            "eta": self.eta,
            "components": {
                str(k): [[self.source.name(i), self.target.name(j), R.format_scalar(v)]
                         for (i, j), v in sorted(e.items())]
                for k, e in self.components.items()
            },
        }

    @classmethod
    def from_json(cls, data, source, target):
        R = source.ring
        comps = {}
        for k, entries in data["components"].items():
            comps[int(k)] = {(source.index[s], target.index[t]): R.parse_scalar(v)
                             for s, t, v in entries}
        return cls(source, target, data["eta"], comps)


def _linear_combination(f, g, sign):
    if f.source != g.source or f.target != g.target or f.eta != g.eta:
        raise ValueError("incompatible multimorphisms")
    R = f.ring
    comps = {k: dict(e) for k, e in f.components.items()}
    for k, e in g.components.items():
        tgt = comps.setdefault(k, {})
        for ij, v in e.items():
            tgt[ij] = R(tgt.get(ij, 0) + sign * v)
    return Multimorphism(f.source, f.target, f.eta, comps, check=False)


def identity_map(X: BigradedModule) -> Multimorphism:
    return Multimorphism(X, X, 0, {0: {(i, i): 1 for i in range(len(X))}}, check=False)


def zero_map(X, Y, eta=0) -> Multimorphism:
    return Multimorphism(X, Y, eta, {}, check=False)


def compose(g: Multimorphism, f: Multimorphism) -> Multimorphism:
    """``(g f)^k = sum_{i+j=k} g^i f^j``."""
    if f.target != g.source:
        raise ValueError("target of f is not the source of g")
    R = f.ring
    comps = defaultdict(lambda: defaultdict(R.zero))
    for i, gi in g.components.items():
        g_by_src = defaultdict(list)
        for (m, t), v in gi.items():
            g_by_src[m].append((t, v))
        for j, fj in f.components.items():
            acc = comps[i + j]
            for (s, m), u in fj.items():
                for t, v in g_by_src.get(m, ()):
                    acc[(s, t)] = R(acc[(s, t)] + v * u)
    return Multimorphism(f.source, g.target, f.eta + g.eta,
                         {k: dict(e) for k, e in comps.items()}, check=False)


def _blocks(X):
    by_bideg = defaultdict(list)
    for i in range(len(X)):
        by_bideg[X.bidegree(i)].append(i)
    return by_bideg


def invert(f: Multimorphism) -> Multimorphism:
    """Two-sided inverse of ``f = f^0 + f^1 + ...`` of degree 0.

    ``g^0`` inverts ``f^0`` bidegree by bidegree and the higher components
    solve ``0 = sum_{i+j=k} f^i g^j``, that is
    ``g^k = -g^0 sum_{i>=1} f^i g^{k-i}``.
    """
    if f.eta != 0 or not f.preserves_column_filtration():
        raise NotInvertible("only degree 0 maps of the form f^0 + f^1 + ... are handled")
    R = f.ring
    X, Y = f.source, f.target
    bx, by = _blocks(X), _blocks(Y)
    if {b: len(v) for b, v in bx.items()} != {b: len(v) for b, v in by.items()}:
        raise NotInvertible("f^0 cannot be invertible: bidegree ranks differ")
    f0 = f.component(0)
    g0 = {}
    for bideg, src in bx.items():
        tgt = by[bideg]
        spos = {i: a for a, i in enumerate(src)}
        tpos = {j: b for b, j in enumerate(tgt)}
        M = [[R.zero()] * len(src) for _ in tgt]
        for (i, j), v in f0.items():
            if i in spos and j in tpos:
                M[tpos[j]][spos[i]] = v
        N, U = normal_form(R, M)
        n = len(src)
        if N[:n] != _identity_matrix(R, n):
            raise NotInvertible(f"f^0 is not invertible at bidegree {bideg}")
        for b, j in enumerate(tgt):
            for a, i in enumerate(src):
                if U[a][b]:
                    g0[(j, i)] = U[a][b]
    g = {0: g0}
    cols = [X.column(i) for i in range(len(X))] or [0]
    span = max(cols) - min(cols)
    G0 = Multimorphism(Y, X, 0, {0: g0}, check=False)
    for k in range(1, span + 1):
        acc = None
        for i in range(1, k + 1):
            if i not in f.components or (k - i) not in g:
                continue
            fi = Multimorphism(X, Y, 0, {i: f.components[i]}, check=False)
            gj = Multimorphism(Y, X, 0, {k - i: g[k - i]}, check=False)
            term = compose(fi, gj)
            acc = term if acc is None else acc + term
        if acc is None:
            continue
        gk = compose(G0, acc).component(k)
        if gk:
            g[k] = {ij: R(-v) for ij, v in gk.items()}
    return Multimorphism(Y, X, 0, g)


def components_of_graded_map(source, target, F, eta, lowest=0):
    """Split a graded map on total objects into multimorphism components.

    ``F`` is ``{(src, dst): scalar}`` over basis indices.  Entries must
    change total degree by ``eta`` and have component index ``>= lowest``.
    """
    R = source.ring
    comps = defaultdict(dict)
    for (i, j), v in F.items():
        v = R(v)
        if not v:
            continue
        if target.degree(j) != source.degree(i) + eta:
            raise BidegreeError(
                f"{source.name(i)} -> {target.name(j)} changes total degree "
                f"by {target.degree(j) - source.degree(i)}, expected {eta}")
        k = source.column(i) - target.column(j)
        if k < lowest:
            raise BidegreeError(
                f"{source.name(i)} -> {target.name(j)} has component index {k} < {lowest}")
        comps[k][(i, j)] = v
    return Multimorphism(source, target, eta, dict(comps))


def total_morphism(f: Multimorphism):
    """Totalisation ``Cf`` as ``{(src, dst): scalar}``."""
    return f.flat()
