"""Exact linear algebra over GF(p): matrices, subspaces, direct sums.

Structural identities (rank-nullity, the dimension law for sums and
intersections, preimage maximality) are checked by exhaustive enumeration
at small sizes, which is feasible because the spaces are finite.
"""

import pytest
from hypothesis import given, settings, strategies as st

from dpdecomp.errors import NotDirectSum, ShapeError
from dpdecomp.fields import Poly, PrimeField
from dpdecomp.linalg import (DirectSumDecomposition, MatrixFp, Subspace,
                             column_space, is_direct_sum, is_independent,
                             is_invariant, null_space, poly_eval_matrix,
                             preimage, row_space, rref, solve_right,
                             subspace_intersect, subspace_sum)

F2 = PrimeField(2)
F3 = PrimeField(3)
F5 = PrimeField(5)


@st.composite
def matrices(draw, max_dim=3, primes=(2, 3, 5)):
    F = PrimeField(draw(st.sampled_from(primes)))
    nr = draw(st.integers(1, max_dim))
    nc = draw(st.integers(1, max_dim))
    entries = draw(st.lists(st.integers(0, F.p - 1), min_size=nr * nc,
                            max_size=nr * nc))
    return MatrixFp(F, nr, nc, entries)


@st.composite
def square_matrices(draw, max_dim=3, primes=(2, 3, 5)):
    F = PrimeField(draw(st.sampled_from(primes)))
    n = draw(st.integers(1, max_dim))
    entries = draw(st.lists(st.integers(0, F.p - 1), min_size=n * n,
                            max_size=n * n))
    return MatrixFp(F, n, n, entries)


@st.composite
def subspace_pairs(draw, ambient=3, primes=(2, 3)):
    F = PrimeField(draw(st.sampled_from(primes)))
    def span(k):
        return [draw(st.lists(st.integers(0, F.p - 1), min_size=ambient,
                              max_size=ambient)) for _ in range(k)]
    S = Subspace(F, ambient, span(draw(st.integers(0, 3))))
    T = Subspace(F, ambient, span(draw(st.integers(0, 3))))
    return S, T


# === matrices ===

def test_shape_checks():
    A = MatrixFp.from_rows(F3, [[1, 2], [0, 1]])
    B = MatrixFp.from_rows(F3, [[1], [2]])
    with pytest.raises(ShapeError):
        A + B
    with pytest.raises(ShapeError):
        B @ A @ B  # (2x1)(2x2) mismatch
    assert (A @ B).rows() == [(2,), (2,)]


def test_matvec_hand_example():
    A = MatrixFp.from_rows(F3, [[1, 1, 0], [0, 2, 0], [0, 0, 1]])
    assert A.matvec((1, 2, 0)) == (0, 1, 0)


@given(square_matrices())
def test_pow_repeated_product(A):
    assert A ** 0 == MatrixFp.identity(A.field, A.nrows)
    assert A ** 3 == A @ A @ A


@given(square_matrices())
def test_inverse_or_singular(A):
    if A.is_invertible():
        inv = A.inverse()
        eye = MatrixFp.identity(A.field, A.nrows)
        assert A @ inv == eye
        assert inv @ A == eye
        assert A ** -1 == inv
    else:
        with pytest.raises(ValueError):
            A.inverse()


def test_inverse_hand_example():
    # [[1,1],[1,2]] over GF(3): det = 1, inverse = [[2,2],[2,1]]
    A = MatrixFp.from_rows(F3, [[1, 1], [1, 2]])
    assert A.inverse() == MatrixFp.from_rows(F3, [[2, 2], [2, 1]])


@given(matrices())
def test_rref_idempotent_and_rank(M):
    red, rank, pivots = rref(M)
    red2, rank2, pivots2 = rref(red)
    assert red == red2 and rank == rank2 and pivots == pivots2
    assert rank == len(pivots) <= min(M.nrows, M.ncols)


@given(matrices(max_dim=3, primes=(2, 3)))
def test_rank_nullity(M):
    assert M.rank() + null_space(M).dim == M.ncols


@given(matrices(max_dim=3, primes=(2, 3)))
def test_null_space_members_annihilate(M):
    ns = null_space(M)
    zero = (0,) * M.nrows
    for v in ns.vectors():
        assert M.matvec(v) == zero


@given(matrices(max_dim=3, primes=(2, 3)))
def test_solve_right_consistency(M):
    # every column-space member is solvable and the solution reproduces it
    for b in column_space(M).vectors():
        u = solve_right(M, b)
        assert u is not None
        assert M.matvec(u) == tuple(b)
    # anything outside has no solution
    cs = column_space(M)
    for idx in range(M.field.p ** M.nrows):
        digits = []
        c = idx
        for _ in range(M.nrows):
            digits.append(c % M.field.p)
            c //= M.field.p
        if not cs.contains(digits):
            assert solve_right(M, digits) is None


def test_transpose_and_stack():
    A = MatrixFp.from_rows(F2, [[1, 0], [1, 1]])
    assert A.transpose().rows() == [(1, 1), (0, 1)]
    assert A.hstack(A).ncols == 4
    assert A.vstack(A).nrows == 4


# === subspaces ===

def test_subspace_canonical_equality():
    S = Subspace(F3, 2, [(1, 0), (1, 1)])
    T = Subspace(F3, 2, [(1, 1), (0, 1)])
    assert S == T
    assert S.dim == 2
    assert hash(S) == hash(T)


def test_subspace_membership_and_coords():
    S = Subspace(F3, 3, [(1, 1, 0)])
    assert S.contains((2, 2, 0))
    assert not S.contains((1, 2, 0))
    coords = S.coords_of((2, 2, 0))
    assert coords is not None
    assert S.from_coords(coords) == (2, 2, 0)
    assert S.coords_of((0, 0, 1)) is None


@given(subspace_pairs())
def test_vectors_enumeration_count(pair):
    S, _ = pair
    members = set(S.vectors())
    assert len(members) == S.field.p ** S.dim
    assert all(S.contains(v) for v in members)


@given(subspace_pairs())
@settings(max_examples=60)
def test_dimension_law(pair):
    S, T = pair
    assert (S.dim + T.dim
            == subspace_sum(S, T).dim + subspace_intersect(S, T).dim)


@given(subspace_pairs())
@settings(max_examples=60)
def test_intersection_is_lower_bound(pair):
    S, T = pair
    I = subspace_intersect(S, T)
    assert I.is_subspace_of(S) and I.is_subspace_of(T)
    for v in I.vectors():
        assert S.contains(v) and T.contains(v)
    assert S.is_subspace_of(subspace_sum(S, T))


def test_row_column_space_hand_example():
    M = MatrixFp.from_rows(F2, [[1, 1], [1, 1]])
    assert column_space(M) == Subspace(F2, 2, [(1, 1)])
    assert row_space(M) == Subspace(F2, 2, [(1, 1)])
    assert null_space(M) == Subspace(F2, 2, [(1, 1)])


@given(matrices(max_dim=3, primes=(2, 3)))
@settings(max_examples=60)
def test_preimage_is_exact(M):
    # preimage of the column span of the first standard basis image
    S = Subspace(M.field, M.nrows, [M.col(0)])
    pre = preimage(M, S)
    p = M.field.p
    expected = []
    for idx in range(p ** M.ncols):
        digits = []
        c = idx
        for _ in range(M.ncols):
            digits.append(c % p)
            c //= p
        if S.contains(M.matvec(digits)):
            expected.append(tuple(digits))
    assert set(pre.vectors()) == set(expected)


def test_preimage_of_zero_is_kernel():
    M = MatrixFp.from_rows(F3, [[1, 1, 0], [0, 0, 1]])
    assert preimage(M, Subspace.zero(F3, 2)) == null_space(M)


# === direct sums ===

def _example_parts():
    return [Subspace(F3, 3, [(1, 0, 0)]),
            Subspace(F3, 3, [(1, 1, 0)]),
            Subspace(F3, 3, [(0, 0, 1)])]


def test_direct_sum_recognition():
    parts = _example_parts()
    assert is_independent(parts)
    assert is_direct_sum(parts)
    assert not is_direct_sum(parts[:2])  # spans only 2 of 3 dims
    overlapping = [parts[0], Subspace(F3, 3, [(1, 0, 0), (0, 1, 0)])]
    assert not is_independent(overlapping)


def test_decomposition_rejects_bad_parts():
    with pytest.raises(ValueError):
        DirectSumDecomposition([Subspace.full(F3, 2)])  # fewer than 2 parts
    dependent = [Subspace(F3, 2, [(1, 0)]), Subspace(F3, 2, [(1, 0)])]
    with pytest.raises(NotDirectSum):
        DirectSumDecomposition(dependent)
    short = [Subspace(F3, 3, [(1, 0, 0)]), Subspace(F3, 3, [(0, 1, 0)])]
    with pytest.raises(NotDirectSum):
        DirectSumDecomposition(short)


def test_decompose_vector_frozen():
    D = DirectSumDecomposition(_example_parts())
    assert D.decompose_vector((1, 2, 0)) == [(2, 0, 0), (2, 2, 0), (0, 0, 0)]


def test_components_sum_back():
    D = DirectSumDecomposition(_example_parts())
    p = 3
    for idx in range(27):
        x = (idx % p, (idx // p) % p, idx // p**2)
        comps = D.decompose_vector(x)
        total = tuple(sum(c[k] for c in comps) % p for k in range(3))
        assert total == x
        for i, c in enumerate(comps):
            assert D.parts[i].contains(c)


def test_local_coords_embed_roundtrip():
    D = DirectSumDecomposition(_example_parts())
    locals_ = D.local_coords((1, 2, 0))
    for i, loc in enumerate(locals_):
        assert D.embed(i, loc) == D.decompose_vector((1, 2, 0))[i]


def test_projectors():
    D = DirectSumDecomposition(_example_parts())
    eye = MatrixFp.identity(F3, 3)
    total = MatrixFp.zeros(F3, 3, 3)
    for i in range(D.r):
        P = D.projector(i)
        assert P @ P == P
        total = total + P
    assert total == eye


def test_invariance_check():
    A = MatrixFp.from_rows(F3, [[1, 1, 0], [0, 2, 0], [0, 0, 1]])
    for part in _example_parts():
        assert is_invariant(A, part)
    assert not is_invariant(A, Subspace(F3, 3, [(0, 1, 0)]))


def test_poly_eval_matrix_hand_example():
    # f(x) = x^2 + 1 at A = [[0,1],[1,0]] over GF(2): A^2 = I, so f(A) = 0
    A = MatrixFp.from_rows(F2, [[0, 1], [1, 0]])
    f = Poly(F2, [1, 0, 1])
    assert poly_eval_matrix(f, A) == MatrixFp.zeros(F2, 2, 2)
