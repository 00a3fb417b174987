from __future__ import annotations

import numpy as np
import pytest

from lenscoh.complexes import cohomology_dims, gr_element, homology_ranks_over_Z, norm_element, underlying_complex
from lenscoh.spaces import (
    LensParams,
    classifying_complex,
    default_degree_bound,
    fold_group_ring,
    lens_complex,
    residual_action_complex,
    sphere_complex,
    standard_resolution,
)


def test_params_validation():
    P = LensParams(3, 3, 9)
    assert P.q == (1, 1, 1) and P.dimension == 5
    assert P.to_json() == {"p": 3, "m": 3, "n": 9, "q": [1, 1, 1]}
    for bad in [dict(p=4, m=3, n=9), dict(p=3, m=1, n=9), dict(p=3, m=3, n=1), dict(p=3, m=2, n=9, q=(3, 1)),
                dict(p=3, m=2, n=9, q=(1,))]:
        with pytest.raises(ValueError):
            LensParams(**bad)


def test_twisting_exponents_invert_weights():
    P = LensParams(3, 3, 9, (1, 2, 4))
    for q, r in zip(P.q, P.twisting_exponents()):
        assert q * r % 9 == 1


def test_sphere_boundaries():
    P = LensParams(3, 2, 9, (2, 1))
    S = sphere_complex(P)
    r1 = P.twisting_exponents()[0]
    assert np.array_equal(S.d(1)[0, 0], gr_element(9, {r1: 1, 0: -1}))
    assert np.array_equal(S.d(2)[0, 0], norm_element(9))
    assert S.top == 3


def test_sphere_is_a_homology_sphere():
    P = LensParams(5, 3, 25, (1, 2, 3))
    H = homology_ranks_over_Z(underlying_complex(sphere_complex(P)))
    assert H[0] == (1, []) and H[5] == (1, [])
    assert all(h == (0, []) for h in H[1:5])


def test_resolution_is_acyclic():
    W = standard_resolution(4, 6)
    H = homology_ranks_over_Z(underlying_complex(W))
    assert H[0] == (1, [])
    assert all(h == (0, []) for h in H[1:6])
    with pytest.raises(ValueError):
        standard_resolution(1, 3)


def test_classifying_and_lens_boundaries():
    C = classifying_complex(5, 5)
    assert [int(C.d(i)[0, 0]) for i in range(1, 6)] == [0, 5, 0, 5, 0]
    L = lens_complex(LensParams(3, 3, 9))
    assert [int(L.d(i)[0, 0]) for i in range(1, 6)] == [0, 9, 0, 9, 0]


def test_default_bound():
    assert default_degree_bound(3, 3) == 14


def test_fold_group_ring():
    v = np.arange(9)
    assert fold_group_ring(v, 3).tolist() == [0 + 3 + 6, 1 + 4 + 7, 2 + 5 + 8]
    with pytest.raises(ValueError):
        fold_group_ring(v, 4)


def test_residual_action():
    P = LensParams(3, 2, 9, (1, 2))
    R = residual_action_complex(P)
    assert R.n == 3
    assert cohomology_dims(underlying_complex(R), 3) == [1, 1, 1, 1]
    with pytest.raises(ValueError):
        residual_action_complex(LensParams(3, 2, 3))


def test_residual_action_orbit_space_is_lens_p_squared():
    from lenscoh.complexes import apply_augmentation

    C = apply_augmentation(residual_action_complex(LensParams(3, 3, 9)))
    assert [int(C.d(i)[0, 0]) for i in range(1, 6)] == [0, 9, 0, 9, 0]
