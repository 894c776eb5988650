import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from torilat import intmat

small_ints = st.integers(min_value=-9, max_value=9)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [draw(st.lists(small_ints, min_size=c, max_size=c)) for _ in range(r)], c


def det(rows):
    return int(round(sympy.Matrix(rows).det())) if rows else 1


def determinantal_divisors(A, ncols):
    """d_k = gcd of all k x k minors; the invariant factors are d_k / d_{k-1}."""
    out, prev = [], 1
    for k in range(1, min(len(A), ncols) + 1):
        g = 0
        for rs in _combos(len(A), k):
            for cs in _combos(ncols, k):
                g = math.gcd(g, det([[A[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def _combos(n, k):
    import itertools

    return itertools.combinations(range(n), k)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_smith_decomposition(m):
    A, c = m
    U, D, V = intmat.smith(A, c)
    lhs = intmat.imatmul(intmat.imatmul(intmat.to_array(U), intmat.to_array(A)), intmat.to_array(V))
    assert np.array_equal(lhs, intmat.to_array(D, (len(A), c)))
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    diag = [D[i][i] for i in range(min(len(A), c))]
    assert all(D[i][j] == 0 for i in range(len(A)) for j in range(c) if i != j)
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert nz == diag[: len(nz)]
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))


@settings(max_examples=100, deadline=None)
@given(matrices(4, 4))
def test_smith_diagonal_matches_minors(m):
    A, c = m
    assert intmat.smith_diagonal(A, c) == determinantal_divisors(A, c)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_smith_diagonal_matches_sympy(m):
    A, c = m
    S = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
    expected = [abs(int(S[i, i])) for i in range(min(len(A), c)) if S[i, i] != 0]
    assert intmat.smith_diagonal(A, c) == sorted(expected, key=lambda x: x)


def test_smith_handles_large_entries():
    A = [[2**70, 3], [6, 2**65 + 1]]
    U, D, V = intmat.smith(A, 2)
    prod = sympy.Matrix(U) * sympy.Matrix(A) * sympy.Matrix(V)
    assert prod == sympy.Matrix(D)
    assert D[0][0] * D[1][1] == abs(sympy.Matrix(A).det())


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_kernel_basis_is_saturated_kernel(m):
    A, c = m
    K = intmat.kernel_basis(A, c)
    rank = sympy.Matrix(A).rank()
    assert len(K) == c - rank
    for v in K:
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in A)
    if K:
        assert intmat.is_saturated(intmat.transpose(K, c))


@settings(max_examples=100, deadline=None)
@given(matrices(), st.integers(0, 2**31))
def test_hnf_is_canonical_under_row_operations(m, seed):
    A, c = m
    rng = np.random.default_rng(seed)
    n = len(A)
    T = np.eye(n, dtype=np.int64)
    for _ in range(4):
        i, j = rng.choice(n, 2, replace=n < 2) if n > 1 else (0, 0)
        if i != j:
            T[i] += int(rng.integers(-2, 3)) * T[j]
    B = intmat.as_rows(intmat.imatmul(T, intmat.to_array(A)))
    assert intmat.hnf_basis(A, c) == intmat.hnf_basis(B, c)


@settings(max_examples=60, deadline=None)
@given(matrices(4, 4))
def test_hnf_transform(m):
    A, c = m
    H, piv, U = intmat.hnf(A, c, transform=True)
    HU = intmat.imatmul(intmat.to_array(U), intmat.to_array(A))
    assert np.array_equal(HU[: len(H)], intmat.to_array(H, (len(H), c)))
    assert abs(det(U)) == 1


def test_inverse_unimodular_roundtrip():
    M = [[2, 3, 0], [1, 2, 0], [4, 7, 1]]
    assert abs(det(M)) == 1
    inv = intmat.inverse_unimodular(M)
    assert np.array_equal(intmat.imatmul(intmat.to_array(M), intmat.to_array(inv)), np.eye(3, dtype=np.int64))


def test_inverse_unimodular_rejects_singular_over_z():
    with pytest.raises(Exception):
        intmat.inverse_unimodular([[2, 0], [0, 1]])


def test_quotient_invariants():
    big = [[1, 0], [0, 1]]
    small = [[2, 0], [0, 6]]
    assert intmat.quotient_invariants(big, small, 2) == (0, [2, 6])
