"""Exact arithmetic and linear algebra over small local rings.

Three kinds of coefficient ring are supported: prime fields ``F_p``, the
rationals ``Q`` and the chain rings ``Z/p^k``.  Each of them is local and
every ideal is a power of the maximal ideal, so a single echelon routine
(Howell form, which specialises to reduced row echelon form over a field)
gives canonical answers for solving, kernels and submodule comparisons.

Matrices are plain lists of rows holding canonical scalars.

>>> R = parse_ring("Zmod:3^2")
>>> R.is_unit(4), R.is_unit(3)
(True, False)
>>> solve_linear(R, [[3]], [6])
[2]
>>> kernel_basis(R, [[3]])
[[3]]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

__all__ = [
    "LocalRing", "parse_ring", "Fp", "Q", "Zmod",
    "zeros", "identity", "matmul", "matvec", "transpose", "is_zero_matrix",
    "normal_form", "solve_linear", "kernel_basis", "in_span", "span_length",
    "ModulePresentation", "minimal_generators", "Subquotient",
    "homology_module", "induced_map_is_iso", "residue_rank",
]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class LocalRing:
    """One of ``F_p``, ``Q`` or ``Z/p^k``.

    ``kind`` is ``"Fp"``, ``"Q"`` or ``"Zmod"``.  For ``Fp`` we store
    ``k = 1``; for ``Q`` both ``p`` and ``k`` are ``None``.
    """

    kind: str
    p: Optional[int] = None
    k: Optional[int] = None
    modulus: Optional[int] = field(init=False, default=None, compare=False)

    def __post_init__(self):
        if self.kind == "Q":
            return
        if self.kind not in ("Fp", "Zmod"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.k is None or self.k < 1:
            raise ValueError("exponent must be >= 1")
        if self.kind == "Fp" and self.k != 1:
            raise ValueError("Fp has exponent 1")
        object.__setattr__(self, "modulus", self.p ** self.k)

    # -- naming -------------------------------------------------------
    def __str__(self):
        if self.kind == "Q":
            return "Q"
        if self.kind == "Fp":
            return f"Fp:{self.p}"
        return f"Zmod:{self.p}^{self.k}"

    __repr__ = __str__

    @property
    def is_field(self) -> bool:
        return self.kind != "Zmod" or self.k == 1

    @property
    def is_finite(self) -> bool:
        return self.kind != "Q"

    @property
    def length(self) -> int:
        """Composition length of the ring as a module over itself."""
        return 1 if self.kind == "Q" else self.k

    # -- scalars ------------------------------------------------------
    def __call__(self, x):
        """Canonical representative of ``x``."""
        if self.kind == "Q":
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator == 1:
                return int(x.numerator) % self.modulus
            return (x.numerator * pow(x.denominator, -1, self.modulus)) % self.modulus
        return int(x) % self.modulus

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def elements(self):
        if not self.is_finite:
            raise ValueError("Q has no finite element list")
        return range(self.modulus)

    def valuation(self, x) -> Optional[int]:
        """Largest ``e`` with ``x`` in the ``e``-th power of the maximal ideal.

        Returns ``None`` for zero.
        """
        if x == 0:
            return None
        if self.kind == "Q" or self.kind == "Fp":
            return 0
        e = 0
        while x % self.p == 0:
            x //= self.p
            e += 1
        return e

    def is_unit(self, x) -> bool:
        return self.valuation(self(x)) == 0

    def in_max_ideal(self, x) -> bool:
        return not self.is_unit(x)

    def inverse(self, x):
        x = self(x)
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit in {self}")
        if self.kind == "Q":
            return 1 / x
        return pow(x, -1, self.modulus)

    def uniformizer_power(self, e: int):
        """``p^e`` (``1`` for fields when ``e == 0``)."""
        if self.kind == "Q":
            return Fraction(1) if e == 0 else Fraction(0)
        return pow(self.p, e, self.modulus) if e < self.k else 0

    def unit_part(self, x):
        """Write ``x = p^e * u`` and return ``(e, u^{-1})`` for nonzero ``x``."""
        e = self.valuation(x)
        if self.kind == "Q":
            return 0, 1 / x
        if self.kind == "Fp":
            return 0, pow(x, -1, self.modulus)
        u = (x // self.p ** e) % self.modulus
        return e, pow(u, -1, self.modulus)

    def reduce(self, a, e: int):
        """Division with remainder by ``p^e``: ``a = q p^e + r``, ``r`` canonical."""
        if self.kind != "Zmod":
            return a, self.zero()
        pe = self.p ** e
        return a // pe, a % pe

    def divide(self, a, b):
        """Canonical ``x`` with ``b x = a``, or ``None`` when none exists.

        The answer is the least representative of the solution coset.
        """
        a, b = self(a), self(b)
        if a == 0:
            return self.zero()
        if b == 0:
            return None
        if self.kind != "Zmod":
            return a / b if self.kind == "Q" else (a * pow(b, -1, self.modulus)) % self.modulus
        e = self.valuation(b)
        if self.valuation(a) < e:
            return None
        m = self.p ** (self.k - e)
        u = (b // self.p ** e) % m
        return ((a // self.p ** e) * pow(u, -1, m)) % m if m > 1 else 0

    def residue(self, x):
        """Image of ``x`` in the residue field, as an integer or fraction."""
        if self.kind == "Zmod":
            return x % self.p
        return x

    def residue_field(self) -> "LocalRing":
        if self.kind == "Zmod":
            return LocalRing("Fp", self.p, 1)
        return self

    def format_scalar(self, x) -> str:
        if self.kind == "Q":
            x = Fraction(x)
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return str(int(x))

    def parse_scalar(self, s):
        if isinstance(s, str) and "/" in s:
            num, den = s.split("/")
            return self(Fraction(int(num), int(den)))
        if isinstance(s, str):
            return self(int(s))
        return self(s)

    def signed(self, x):
        """Symmetric representative, used only for display."""
        if self.kind == "Q":
            return x
        return x - self.modulus if x > self.modulus // 2 else x


def Fp(p: int) -> LocalRing:
    return LocalRing("Fp", p, 1)


def Q() -> LocalRing:
    return LocalRing("Q")


def Zmod(p: int, k: int) -> LocalRing:
    return LocalRing("Zmod", p, k)


def parse_ring(spec: str) -> LocalRing:
    """Parse ``Fp:<p>``, ``Q`` or ``Zmod:<p>^<k>``."""
    spec = spec.strip()
    if spec == "Q":
        return Q()
    m = re.fullmatch(r"Fp:(\d+)", spec)
    if m:
        return Fp(int(m.group(1)))
    m = re.fullmatch(r"Zmod:(\d+)\^(\d+)", spec)
    if m:
        return Zmod(int(m.group(1)), int(m.group(2)))
    raise ValueError(f"cannot parse ring {spec!r}")


# ---------------------------------------------------------------------------
# plain matrix helpers

def zeros(R, rows, cols):
    z = R.zero()
    return [[z] * cols for _ in range(rows)]


def identity(R, n):
    M = zeros(R, n, n)
    for i in range(n):
        M[i][i] = R.one()
    return M


def transpose(M, cols=None):
    if not M:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*M)]


def matmul(R, A, B, inner=None):
    """``A @ B``; ``inner`` gives the shared dimension when ``A`` has no rows."""
    if not A:
        return []
    n = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [R.zero()] * n
        for a, brow in zip(row, B):
            if a:
                for j, b in enumerate(brow):
                    if b:
                        acc[j] += a * b
        out.append([R(x) for x in acc])
    return out


def matvec(R, A, x):
    return [R(sum((a * b for a, b in zip(row, x) if a and b), R.zero())) for row in A]


def is_zero_matrix(M):
    return all(x == 0 for row in M for x in row)


# ---------------------------------------------------------------------------
# echelon forms

def _howell(R, rows, track=None):
    """Howell form of the row list ``rows`` (modified copies are returned).

    ``track`` is an optional list of transform rows kept in step with
    ``rows``.  Returns ``(rows, track, pivots)`` where ``pivots`` lists
    ``(row index, column, exponent)`` and zero rows trail the pivot rows.
    """
    rows = [list(r) for r in rows]
    track = [list(t) for t in track] if track is not None else None
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        best, best_e = None, None
        for i in range(r, len(rows)):
            x = rows[i][c]
            if x:
                e = R.valuation(x)
                if best is None or e < best_e:
                    best, best_e = i, e
                    if e == 0:
                        break
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        if track is not None:
            track[r], track[best] = track[best], track[r]
        e, uinv = R.unit_part(rows[r][c])
        if uinv != 1:
            rows[r] = [R(x * uinv) for x in rows[r]]
            if track is not None:
                track[r] = [R(x * uinv) for x in track[r]]
        pe = R.uniformizer_power(e)
        prow = rows[r]
        for i in range(r + 1, len(rows)):
            a = rows[i][c]
            if a:
                q = R.divide(a, pe)
                rows[i] = [R(x - q * y) for x, y in zip(rows[i], prow)]
                if track is not None:
                    track[i] = [R(x - q * y) for x, y in zip(track[i], track[r])]
        if e > 0:
            ann = R.uniformizer_power(R.k - e)
            extra = [R(ann * x) for x in prow]
            if any(extra):
                rows.append(extra)
                if track is not None:
                    track.append([R(ann * x) for x in track[r]])
        pivots.append((r, c, e))
        r += 1
    # reduce entries above each pivot
    for (i, c, e) in pivots:
        pivrow = rows[i]
        for j in range(i):
            a = rows[j][c]
            if a:
                q, _rem = R.reduce(a, e)
                if q:
                    rows[j] = [R(x - q * y) for x, y in zip(rows[j], pivrow)]
                    if track is not None:
                        track[j] = [R(x - q * y) for x, y in zip(track[j], track[i])]
    return rows, track, pivots


def normal_form(R, M, ncols=None):
    """Canonical echelon form ``N`` of the row space of ``M`` and ``U`` with ``N = U M``.

    Over a field this is the reduced row echelon form.  Over ``Z/p^k`` it is
    the Howell form, which may need more rows than ``M`` has; ``U`` then has
    one row per row of ``N``.  Zero rows are kept only up to the row count
    of ``M``.
    """
    m = len(M)
    rows, track, pivots = _howell(R, M, identity(R, m))
    keep = max(m, len(pivots))
    rows, track = rows[:keep], track[:keep]
    if not rows and ncols is not None:
        return [], []
    return rows, track


def _echelon_pivots(R, M):
    rows, _, pivots = _howell(R, M)
    return rows, pivots


def solve_linear(R, A, b, ncols=None):
    """Deterministic solution ``x`` of ``A x = b`` or ``None``.

    Free unknowns are set to zero and every pivot unknown takes its least
    representative, so the answer is canonical for the pivot structure.
    ``ncols`` is the number of unknowns, needed when ``A`` has no rows.
    """
    n = len(A[0]) if A else (ncols or 0)
    if ncols is not None:
        n = ncols
    if not A:
        return [R.zero()] * n
    aug = [list(row) + [R(bi)] for row, bi in zip(A, b)]
    rows, pivots = _echelon_pivots(R, aug)
    x = [R.zero()] * n
    for (i, c, e) in pivots:
        if c == n:
            return None
    for (i, c, e) in reversed(pivots):
        row = rows[i]
        rhs = row[n] - sum((row[j] * x[j] for j in range(c + 1, n) if row[j] and x[j]), R.zero())
        val = R.divide(R(rhs), R.uniformizer_power(e))
        if val is None:
            return None
        x[c] = val
    return x


def kernel_basis(R, A, ncols=None):
    """Canonical generators (as lists) of ``{x : A x = 0}``.

    Over a field the result is a basis; over ``Z/p^k`` it is the generating
    set read off the Howell form of ``[A^T | I]``.
    """
    n = len(A[0]) if A else (ncols or 0)
    if ncols is not None:
        n = ncols
    m = len(A)
    if n == 0:
        return []
    At = transpose(A, n) if A else [[] for _ in range(n)]
    aug = [list(At[i]) + [R.one() if j == i else R.zero() for j in range(n)] for i in range(n)]
    rows, pivots = _echelon_pivots(R, aug)
    return [rows[i][m:] for (i, c, e) in pivots if c >= m]


def in_span(R, gens, v):
    """Whether ``v`` lies in the span of the vectors ``gens``."""
    if not any(v):
        return True
    if not gens:
        return False
    A = transpose(gens, len(v))
    return solve_linear(R, A, v, ncols=len(gens)) is not None


def span_length(R, gens):
    """Composition length of the submodule spanned by ``gens``."""
    if not gens:
        return 0
    _, pivots = _echelon_pivots(R, gens)
    return sum(R.length - e for (_i, _c, e) in pivots)


def residue_rank(R, M):
    """Rank of ``M`` reduced to the residue field."""
    k = R.residue_field()
    Mk = [[k(R.residue(x)) for x in row] for row in M]
    _, pivots = _echelon_pivots(k, Mk)
    return len(pivots)


# ---------------------------------------------------------------------------
# finitely presented modules

@dataclass
class ModulePresentation:
    """``coker(relations)`` on ``generators`` free generators.

    ``relations`` is a list of columns (each a list of length
    ``generators``).  ``representatives`` optionally carries vectors of an
    ambient free module giving each generator, as produced by
    :func:`homology_module`.
    """

    ring: LocalRing
    generators: int
    relations: list
    representatives: Optional[list] = None

    def length(self) -> int:
        return self.ring.length * self.generators - span_length(self.ring, self.relations)

    def cardinality(self) -> int:
        if not self.ring.is_finite:
            raise ValueError("cardinality is only defined over finite rings")
        return self.ring.p ** self.length()

    def is_zero(self) -> bool:
        return self.length() == 0


def minimal_generators(M: ModulePresentation):
    """Nakayama-minimal generator subset of ``M``.

    Returns ``(count, projection)`` where ``projection`` is the
    ``generators x count`` selection matrix of the kept generators.  The
    earliest generators are kept whenever possible.
    """
    R = M.ring
    g = M.generators
    k = R.residue_field()
    # relations reduced mod m, with generator order reversed so that
    # pivots (redundant generators) fall on the latest generators
    rel_rows = [[k(R.residue(col[g - 1 - j])) for j in range(g)] for col in M.relations]
    redundant = set()
    if rel_rows:
        _, pivots = _echelon_pivots(k, rel_rows)
        redundant = {g - 1 - c for (_i, c, _e) in pivots}
    keep = [i for i in range(g) if i not in redundant]
    proj = zeros(R, g, len(keep))
    for j, i in enumerate(keep):
        proj[i][j] = R.one()
    return len(keep), proj


class Subquotient:
    """``U / W`` for submodules ``W <= U`` of a free module, given by generators."""

    def __init__(self, R, dim, U, W):
        self.ring = R
        self.dim = dim
        self.U = [list(u) for u in U]
        self.W = [list(w) for w in W]

    def length(self) -> int:
        return span_length(self.ring, self.U) - span_length(self.ring, self.W)

    def presentation(self) -> ModulePresentation:
        R = self.ring
        g = len(self.U)
        if g == 0:
            return ModulePresentation(R, 0, [], [])
        # c with U c in span(W)
        cols = self.U + [[R(-x) for x in w] for w in self.W]
        A = transpose(cols, self.dim) if self.dim else []
        if not A:
            rels = [[R.one() if i == j else R.zero() for i in range(g)] for j in range(g)]
        else:
            rels = [v[:g] for v in kernel_basis(R, A, ncols=len(cols))]
            rels = [r for r in rels if any(r)]
        return ModulePresentation(R, g, rels, self.U)


def homology_module(R, d_in, d_out, dim=None):
    """Presentation of ``ker(d_out) / im(d_in)`` on a free module of rank ``dim``.

    ``d_in`` maps into the module (``dim`` rows), ``d_out`` maps out of it
    (``dim`` columns).  Raises ``ValueError`` when ``d_out d_in != 0``.
    """
    if dim is None:
        dim = len(d_in) if d_in else (len(d_out[0]) if d_out else 0)
    if d_in and d_out and not is_zero_matrix(matmul(R, d_out, d_in)):
        raise ValueError("d_out * d_in is not zero")
    Z = kernel_basis(R, d_out, ncols=dim) if d_out else identity(R, dim)
    B = transpose(d_in, dim) if d_in else []
    B = [b for b in B if any(b)]
    return Subquotient(R, dim, Z, B).presentation()


def induced_map_is_iso(R, F, S1: Subquotient, S2: Subquotient) -> bool:
    """Whether the matrix ``F`` induces an isomorphism ``S1 -> S2``.

    Surjectivity: every generator of ``S2.U`` lies in ``F(S1.U) + S2.W``.
    Injectivity: whenever ``F(U c)`` lies in ``S2.W`` the vector ``U c`` lies
    in ``S1.W``.
    """
    FU = [matvec(R, F, u) for u in S1.U] if S1.U else []
    target = FU + S2.W
    for u2 in S2.U:
        if not in_span(R, target, u2):
            return False
    if not S1.U:
        return True
    cols = FU + [[R(-x) for x in w] for w in S2.W]
    if S2.dim == 0:
        ker = identity(R, len(S1.U))
    else:
        A = transpose(cols, S2.dim)
        ker = [v[:len(S1.U)] for v in kernel_basis(R, A, ncols=len(cols))]
    for c in ker:
        u = [R(sum((ci * uj[t] for ci, uj in zip(c, S1.U)), R.zero())) for t in range(S1.dim)]
        if not in_span(R, S1.W, u):
            return False
    return True
