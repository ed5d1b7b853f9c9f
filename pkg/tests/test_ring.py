import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from multimodel.ring import (Fp, Q, Zmod, parse_ring, normal_form, solve_linear, kernel_basis,
                             minimal_generators, homology_module, ModulePresentation, matmul,
                             matvec, identity, Subquotient, induced_map_is_iso, span_length)

SMALL_RINGS = [Fp(2), Fp(3), Fp(5), Zmod(2, 2), Zmod(2, 3), Zmod(3, 2), Zmod(2, 4)]


def matrices(R, max_rows=3, max_cols=3):
    el = st.integers(0, R.modulus - 1).map(R)
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(el, min_size=n, max_size=n), min_size=m, max_size=m)))


# -- parsing and scalars ---------------------------------------------------

def test_parse_ring_spellings():
    assert parse_ring("Fp:5") == Fp(5)
    assert parse_ring("Q") == Q()
    assert parse_ring("Zmod:3^2") == Zmod(3, 2)
    assert str(Zmod(3, 2)) == "Zmod:3^2"
    with pytest.raises(ValueError):
        parse_ring("Zmod:6^1")


def test_scalar_serialization_round_trip():
    R = Q()
    assert R.parse_scalar(R.format_scalar(Fraction(-3, 4))) == Fraction(-3, 4)
    S = Zmod(3, 2)
    assert S.format_scalar(S(-1)) == "8"


# -- is_unit ---------------------------------------------------------------

def test_is_unit_examples():
    assert Zmod(3, 2).is_unit(1) and Fp(7).is_unit(1) and Q().is_unit(1)
    assert not Zmod(3, 2).is_unit(3)
    assert Zmod(3, 2).is_unit(4)


@pytest.mark.parametrize("p,k", [(p, k) for p in (2, 3, 5, 7) for k in range(1, 10) if p ** k <= 512])
def test_is_unit_exhaustive(p, k):
    R = Zmod(p, k)
    for x in range(R.modulus):
        has_inverse = any((x * y) % R.modulus == 1 for y in range(R.modulus))
        assert R.is_unit(x) == has_inverse
        assert R.is_unit(x) != R.in_max_ideal(x)


# -- normal form -----------------------------------------------------------

def test_normal_form_examples():
    R = Zmod(3, 2)
    N, U = normal_form(R, [[0, 0], [0, 0]])
    assert N == [[0, 0], [0, 0]] and U == identity(R, 2)
    N, _ = normal_form(R, [[3]])
    assert N == [[3]]
    F5 = Fp(5)
    N, U = normal_form(F5, [[2, 0], [0, 1]])
    assert N == identity(F5, 2)
    assert matmul(F5, U, [[2, 0], [0, 1]]) == N


@pytest.mark.parametrize("R", SMALL_RINGS, ids=str)
@given(data=st.data())
def test_normal_form_idempotent_and_transform(R, data):
    M = data.draw(matrices(R))
    N, U = normal_form(R, M)
    assert matmul(R, U, M, len(M)) == N
    N2, _ = normal_form(R, N)
    assert N2[:len(N)] == N


def _row_space(R, rows, n):
    span = set()
    for coeffs in itertools.product(range(R.modulus), repeat=len(rows)):
        span.add(tuple(R(sum(c * r[j] for c, r in zip(coeffs, rows))) for j in range(n)))
    return span


@pytest.mark.parametrize("R", [Zmod(2, 2), Zmod(3, 2), Fp(3)], ids=str)
@given(data=st.data())
def test_normal_form_canonical_for_row_space(R, data):
    M = data.draw(matrices(R, 2, 2))
    n = len(M[0])
    N, _ = normal_form(R, M)
    assert _row_space(R, N, n) == _row_space(R, M, n)
    # any generating set of the same row space gives the same form
    shuffled = list(reversed(M)) + [[R(a + b) for a, b in zip(M[0], M[-1])]]
    N2, _ = normal_form(R, shuffled)
    assert [r for r in N2 if any(r)] == [r for r in N if any(r)]


# -- solving ---------------------------------------------------------------

def test_solve_examples():
    R = Zmod(3, 2)
    assert solve_linear(R, identity(R, 2), [4, 7]) == [4, 7]
    assert solve_linear(R, [[3]], [6]) == [2]
    assert solve_linear(R, [[3]], [1]) is None


def _all_vectors(R, n):
    return itertools.product(range(R.modulus), repeat=n)


@pytest.mark.parametrize("R", SMALL_RINGS, ids=str)
@given(data=st.data())
def test_solve_sound_and_complete(R, data):
    A = data.draw(matrices(R, 2, 3))
    n = len(A[0])
    b = data.draw(st.lists(st.integers(0, R.modulus - 1).map(R), min_size=len(A), max_size=len(A)))
    x = solve_linear(R, A, b)
    exists = any(matvec(R, A, list(v)) == b for v in _all_vectors(R, n))
    assert (x is not None) == exists
    if x is not None:
        assert matvec(R, A, x) == b


def test_kernel_examples():
    R = Zmod(3, 2)
    assert kernel_basis(R, identity(R, 2)) == []
    assert kernel_basis(R, [[3]]) == [[3]]
    assert kernel_basis(Fp(5), [[0]]) == [[1]]


@pytest.mark.parametrize("R", SMALL_RINGS, ids=str)
@given(data=st.data())
def test_kernel_complete(R, data):
    A = data.draw(matrices(R, 2, 3))
    n = len(A[0])
    K = kernel_basis(R, A)
    for k in K:
        assert not any(matvec(R, A, k))
    kernel = {v for v in _all_vectors(R, n) if not any(matvec(R, A, list(v)))}
    if K:
        assert _row_space(R, K, n) == kernel
    else:
        assert kernel == {(0,) * n}


# -- modules ---------------------------------------------------------------

def test_minimal_generators_examples():
    R = Zmod(3, 2)
    assert minimal_generators(ModulePresentation(R, 3, []))[0] == 3
    assert minimal_generators(ModulePresentation(R, 1, [[3]]))[0] == 1
    assert minimal_generators(ModulePresentation(R, 1, [[1]]))[0] == 0


@pytest.mark.parametrize("R", [Zmod(3, 2), Zmod(2, 3), Fp(3)], ids=str)
@given(data=st.data())
def test_minimal_generators_count_and_surjectivity(R, data):
    g = data.draw(st.integers(1, 3))
    rels = data.draw(st.lists(st.lists(st.integers(0, R.modulus - 1).map(R), min_size=g, max_size=g),
                              max_size=3))
    M = ModulePresentation(R, g, rels)
    count, proj = minimal_generators(M)
    k = R.residue_field()
    rank_mod_m = len([r for r in normal_form(k, [[k(R.residue(x)) for x in c] for c in rels])[0]
                      if any(r)]) if rels else 0
    assert count == g - rank_mod_m
    # surjective: the chosen generators plus the relations span R^g
    cols = [[proj[i][j] for i in range(g)] for j in range(count)] + [list(c) for c in rels]
    assert span_length(R, cols) == g * R.length


def test_homology_module_examples():
    R = Zmod(3, 2)
    H = homology_module(R, [[0, 0], [0, 0]], [[0, 0]], 2)
    assert H.generators == 2 and H.length() == 4
    H = homology_module(R, [[3]], [[0]], 1)
    assert H.cardinality() == 3
    assert homology_module(R, identity(R, 2), [], 2).is_zero()
    with pytest.raises(ValueError):
        homology_module(R, [[1]], [[1]], 1)


def test_induced_iso_detects_wrong_annihilator():
    R = Zmod(3, 2)
    free = Subquotient(R, 1, [[1]], [])
    assert induced_map_is_iso(R, [[1]], free, free)
    assert not induced_map_is_iso(R, [[3]], free, free)
    z3 = Subquotient(R, 1, [[1]], [[3]])
    assert not induced_map_is_iso(R, [[1]], free, z3)
    assert induced_map_is_iso(R, [[1]], z3, z3)
