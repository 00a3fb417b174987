from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lenscoh.complexes import (
    ChainComplex,
    GroupRingComplex,
    apply_augmentation,
    borel_cohomology_dims,
    borel_total_complex,
    cohomology_dims,
    cohomology_mod_p,
    complex_from_json,
    dumps_complex,
    gr_element,
    gr_matmul,
    gr_mul,
    homology_ranks_over_Z,
    norm_element,
    permute_basis,
    underlying_complex,
    verify_complex,
)
from lenscoh.spaces import LensParams, lens_complex, residual_action_complex, sphere_complex, standard_resolution


def uct_dims(C: ChainComplex, p: int) -> list[int]:
    """Oracle: dim H^j(C; Z_p) from integral homology by universal coefficients."""
    H = homology_ranks_over_Z(C)
    out = []
    for j, (free, tors) in enumerate(H):
        prev = H[j - 1][1] if j else []
        out.append(free + sum(1 for t in tors if t % p == 0) + sum(1 for t in prev if t % p == 0))
    return out


def test_group_ring_arithmetic():
    n = 5
    t = gr_element(n, {1: 1})
    assert np.array_equal(gr_mul(t, gr_element(n, {4: 1})), gr_element(n, {0: 1}))
    N = norm_element(n)
    tm1 = gr_element(n, {1: 1, 0: -1})
    assert not gr_mul(N, tm1).any()
    A = np.stack([t, N]).reshape(1, 2, n)
    B = np.stack([tm1, tm1]).reshape(2, 1, n)
    assert np.array_equal(gr_matmul(A, B)[0, 0], gr_mul(t, tm1))


def test_constructor_rejects_bad_composite_and_report_names_degree():
    with pytest.raises(ValueError):
        ChainComplex((1, 1, 1), {1: np.array([[1]]), 2: np.array([[1]])})
    bad = ChainComplex.unchecked((1, 1, 1), {1: np.array([[1]]), 2: np.array([[1]])})
    rep = verify_complex(bad)
    assert not rep.ok and rep.degree == 2
    shape = ChainComplex.unchecked((1, 2), {1: np.array([[1]])})
    assert not verify_complex(shape).ok
    gbad = GroupRingComplex.unchecked(3, (1, 1, 1), {i: gr_element(3, {0: 1}).reshape(1, 1, 3) for i in (1, 2)})
    assert not verify_complex(gbad).ok


@pytest.mark.parametrize(
    "p,m,n,q", [(3, 2, 3, (1, 2)), (3, 3, 9, (1, 2, 4)), (3, 3, 4, (1, 3, 1)), (5, 2, 25, (2, 3)), (5, 4, 5, (1, 2, 3, 4))]
)
def test_constructed_complexes_square_to_zero(p, m, n, q):
    P = LensParams(p, m, n, q)
    for C in (sphere_complex(P), lens_complex(P), standard_resolution(n, 2 * m + 3), underlying_complex(sphere_complex(P))):
        assert verify_complex(C).ok


def test_json_round_trip_both_kinds():
    P = LensParams(3, 3, 9, (1, 2, 4))
    for C in (lens_complex(P), sphere_complex(P)):
        doc = json.loads(dumps_complex(C))
        back = complex_from_json(doc)
        assert type(back) is type(C)
        assert dumps_complex(back) == dumps_complex(C)


@pytest.mark.parametrize("p,n,m", [(3, 9, 3), (3, 3, 2), (5, 25, 2), (3, 4, 3), (5, 10, 2)])
def test_lens_cohomology_matches_universal_coefficients(p, n, m):
    L = lens_complex(LensParams(p, m, n))
    assert cohomology_dims(L, p) == uct_dims(L, p)


def test_integral_homology_of_lens_space():
    H = homology_ranks_over_Z(lens_complex(LensParams(3, 3, 9)))
    assert H == [(1, []), (0, [9]), (0, []), (0, [9]), (0, []), (1, [])]


def test_residual_action_underlying_space_is_lens_p():
    P = LensParams(3, 3, 9)
    U = underlying_complex(residual_action_complex(P))
    assert homology_ranks_over_Z(U)[1] == (0, [3])
    assert cohomology_dims(U, 3) == [1] * 6


def test_cohomology_representatives_are_cocycles():
    L = lens_complex(LensParams(5, 3, 25))
    H = cohomology_mod_p(L, 5)
    for j, reps in enumerate(H.reps):
        for k, v in enumerate(reps):
            assert not ((L.coboundary(j) @ v) % 5).any()
            assert np.array_equal(H.coordinates(j, v) % 5, np.eye(len(reps), dtype=np.int64)[k])


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_cohomology_is_basis_independent(seed):
    rng = np.random.default_rng(seed)
    L = lens_complex(LensParams(3, 3, 9, (1, 2, 4)))
    U = underlying_complex(residual_action_complex(LensParams(3, 3, 9)))
    for C in (L, U):
        perms = [list(rng.permutation(r)) for r in C.ranks]
        assert cohomology_dims(permute_basis(C, perms), 3) == cohomology_dims(C, 3)


def test_augmentation_of_resolution_is_classifying_chains():
    W = standard_resolution(6, 7)
    C = apply_augmentation(W)
    assert [int(C.d(i)[0, 0]) for i in range(1, 8)] == [0, 6, 0, 6, 0, 6, 0]


def test_borel_construction_of_a_free_orbit_is_a_point():
    # the fibre G itself: W tensor_G Z[G] is the underlying complex of W, i.e. chains on E_G
    n, D = 3, 6
    W = standard_resolution(n, D + 1)
    orbit = GroupRingComplex(n, (1,), {})
    T = borel_total_complex(W, orbit, D + 1)
    assert cohomology_dims(T, 3)[: D + 1] == [1] + [0] * D


@pytest.mark.parametrize("p,m", [(3, 2), (3, 3), (5, 2)])
def test_free_action_borel_vanishes_above_dimension(p, m):
    P = LensParams(p, m, p * p)
    C = residual_action_complex(P)
    D = 2 * m + 4
    dims = borel_cohomology_dims(standard_resolution(p, D + 1), C, p, D)
    assert all(d == 0 for d in dims[2 * m:])
    assert dims[: 2 * m] == [1] * (2 * m)


def test_borel_rejects_mismatched_inputs():
    W = standard_resolution(3, 4)
    with pytest.raises(ValueError):
        borel_total_complex(W, sphere_complex(LensParams(5, 2, 5)), 3)
    with pytest.raises(ValueError):
        borel_total_complex(W, sphere_complex(LensParams(3, 2, 3)), 9)


def test_euler_characteristic():
    assert lens_complex(LensParams(3, 3, 9)).euler_characteristic() == 0
