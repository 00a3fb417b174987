from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lenscoh.fp_linalg import (
    FpMatrix,
    NoSolution,
    SparseSystem,
    Subspace,
    check_odd_prime,
    image_basis,
    is_prime,
    kernel_basis,
    quotient_coordinates,
    quotient_representatives,
    random_matrix,
    rref,
    solve,
    sparse_solve,
)

PRIMES = [3, 5, 7]


def det_mod(a: np.ndarray, p: int) -> int:
    """Leibniz-formula determinant, for the minor oracle."""
    n = a.shape[0]
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod = prod * int(a[i, perm[i]]) % p
        total += -prod if inv % 2 else prod
    return total % p


def rank_by_minors(a: np.ndarray, p: int) -> int:
    rows, cols = a.shape
    for k in range(min(rows, cols), 0, -1):
        for ri in itertools.combinations(range(rows), k):
            for ci in itertools.combinations(range(cols), k):
                if det_mod(a[np.ix_(ri, ci)], p):
                    return k
    return 0


def matrices(max_dim=4):
    return st.tuples(st.sampled_from(PRIMES), st.integers(1, max_dim), st.integers(1, max_dim)).flatmap(
        lambda t: st.lists(
            st.lists(st.integers(0, t[0] - 1), min_size=t[2], max_size=t[2]), min_size=t[1], max_size=t[1]
        ).map(lambda rows: FpMatrix(rows, t[0]))
    )


def test_prime_helpers():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert check_odd_prime(5) == 5
    for bad in (2, 4, 9, 1, 0, -3):
        with pytest.raises(ValueError):
            check_odd_prime(bad)


def test_matrix_arithmetic_and_field_mixing():
    A = FpMatrix([[1, 2], [3, 4]], 5)
    B = FpMatrix.identity(2, 5)
    assert A @ B == A
    assert (A + A) == FpMatrix([[2, 4], [1, 3]], 5)
    assert (A - A) == FpMatrix.zeros(2, 2, 5)
    assert A.T == FpMatrix([[1, 3], [2, 4]], 5)
    with pytest.raises(ValueError):
        A @ FpMatrix.identity(2, 3)


@given(matrices())
@settings(max_examples=200, deadline=None)
def test_rank_matches_minor_oracle(M):
    assert M.rank() == rank_by_minors(M.array, M.p)


def test_seeded_rref_idempotence_and_rank_nullity():
    rng = np.random.default_rng(20240601)
    for case in range(1200):
        p = PRIMES[case % 3]
        rows, cols = int(rng.integers(1, 8)), int(rng.integers(1, 8))
        M = random_matrix(rng, rows, cols, p)
        R, piv, rank = rref(M)
        R2, piv2, rank2 = rref(R)
        assert R2 == R and piv2 == piv and rank2 == rank
        K = kernel_basis(M)
        assert rank + K.dim == cols
        for v in K.basis:
            assert not ((M.array @ v) % p).any()
        assert image_basis(M).dim == rank


@given(matrices(5), st.data())
@settings(max_examples=150, deadline=None)
def test_solve_consistent_and_inconsistent(M, data):
    x = np.array(data.draw(st.lists(st.integers(0, M.p - 1), min_size=M.cols, max_size=M.cols)))
    b = (M.array @ x) % M.p
    y = solve(M, b)
    assert np.array_equal((M.array @ y) % M.p, b)
    if M.rank() < M.rows:
        # some right-hand side is outside the image
        img = image_basis(M)
        target = next(e for e in np.eye(M.rows, dtype=np.int64) if not img.contains(e))
        with pytest.raises(NoSolution):
            solve(M, target)


def test_subspace_canonical_and_membership():
    p = 5
    U = Subspace.span([[1, 2, 0], [2, 4, 0], [0, 0, 1]], 3, p)
    V = Subspace.span([[0, 0, 3], [3, 1, 0]], 3, p)
    assert U == V and hash(U) == hash(V)
    assert U.dim == 2
    assert U.contains([1, 2, 4]) and not U.contains([1, 0, 0])
    assert (U + Subspace.span([[1, 0, 0]], 3, p)) == Subspace.full(3, p)
    assert Subspace.zero(3, p).dim == 0
    assert Subspace.zero(0, p).dim == 0


def test_quotient_representatives_and_coordinates():
    p = 7
    V = Subspace.full(3, p)
    W = Subspace.span([[1, 1, 0]], 3, p)
    reps = quotient_representatives(V, W)
    assert len(reps) == 2
    v = np.array([2, 5, 3])
    c = quotient_coordinates(v, reps, W)
    residue = (v - sum(int(ci) * r for ci, r in zip(c, reps))) % p
    assert W.contains(residue)
    with pytest.raises(ValueError):
        quotient_representatives(W, V)


@given(matrices(5), st.data())
@settings(max_examples=100, deadline=None)
def test_sparse_system_agrees_with_dense(M, data):
    p = M.p
    x = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=M.cols, max_size=M.cols)))
    b = (M.array @ x) % p
    rows = [({j: int(v) for j, v in enumerate(row) if v}, int(r)) for row, r in zip(M.array, b)]
    y = sparse_solve(rows, M.cols, p)
    assert np.array_equal((M.array @ y) % p, b)
    S = SparseSystem(M.cols, p)
    for r, rhs in rows:
        S.add_row(r, rhs)
    assert S.rank == M.rank()
    assert len(S.nullspace()) == M.cols - M.rank()
    for v in S.nullspace():
        assert not ((M.array @ v) % p).any()


def test_sparse_inconsistency_certificate_reads_zero_equals_one():
    p = 5
    rows = [({0: 1, 1: 1}, 1), ({1: 1, 2: 2}, 3), ({0: 1, 2: 3}, 0)]
    S = SparseSystem(3, p, track=True)
    for r, rhs in rows:
        S.add_row(r, rhs)
    assert not S.consistent
    combo = S.inconsistency
    lhs = np.zeros(3, dtype=np.int64)
    rhs = 0
    for k, c in combo.items():
        for j, v in rows[k][0].items():
            lhs[j] += c * v
        rhs += c * rows[k][1]
    assert not (lhs % p).any() and rhs % p == 1
    with pytest.raises(NoSolution):
        S.solution()
