from __future__ import annotations

import json

import numpy as np
import pytest

from lenscoh.complexes import cohomology_dims
from lenscoh.products import (
    build_diagonal,
    check_chain_map,
    generator_argument,
    lens_ring,
    ring_of_group,
    truncate_ring,
)
from lenscoh.spaces import LensParams, lens_complex, standard_resolution


def classical_cup_constant(n: int, i: int, j: int, p: int) -> int:
    """Oracle: product of the dual basis classes e_i e_j = c e_{i+j} for Z_n, mod p."""
    return (n * (n - 1) // 2) % p if i % 2 and j % 2 else 1


@pytest.mark.parametrize("n,p", [(3, 3), (9, 3), (5, 5), (25, 5), (6, 3), (15, 5)])
def test_diagonal_is_a_chain_map_and_matches_classical_products(n, p):
    D = 7
    diag = build_diagonal(standard_resolution(n, D + 1), p, D)
    assert check_chain_map(diag) == []
    for i in range(D + 1):
        for j in range(D + 1 - i):
            assert diag.cup_constant(i, j) % p == classical_cup_constant(n, i, j, p)


@pytest.mark.parametrize("n,p", [(3, 3), (9, 3), (5, 5), (25, 5)])
def test_group_ring_axioms(n, p):
    R = ring_of_group(n, p, 8 if p == 3 else 6)
    assert all(R.check_axioms().values())
    assert R.dims == (1,) * (R.top + 1)


@pytest.mark.parametrize("p", [3, 5])
def test_bockstein_of_s_is_t_for_prime_order(p):
    R = ring_of_group(p, p, 6)
    _, s = R.generator("s")
    _, t = R.generator("t")
    assert np.array_equal(R.beta(1, s), t)
    assert R.labels[:4] == (("1",), ("s",), ("t",), ("s*t",))


@pytest.mark.parametrize("p", [3, 5])
def test_bockstein_vanishes_for_square_order(p):
    R = ring_of_group(p * p, p, 6)
    assert not R.beta(1, R.generator("s")[1]).any()
    L = lens_ring(LensParams(p, 3, p * p))
    assert not L.beta(1, L.generator("x")[1]).any()


@pytest.mark.parametrize("n,p", [(3, 3), (9, 3), (5, 5), (25, 5)])
def test_bockstein_squares_to_zero(n, p):
    R = ring_of_group(n, p, 7)
    for i in range(R.top - 1):
        assert not ((R.bockstein[i + 1] @ R.bockstein[i]) % p).any()


def test_lens_ring_is_the_truncation():
    P = LensParams(3, 3, 9)
    L = lens_ring(P)
    assert L.top == 5
    assert list(L.dims) == cohomology_dims(lens_complex(P), 3)
    assert [l[0] for l in L.labels] == ["1", "x", "z", "x*z", "z^2", "x*z^2"]
    assert all(L.check_axioms().values())
    # the Bockstein recomputed on the lens complex agrees with the truncated group one
    G = truncate_ring(ring_of_group(9, 3, 5), 5)
    for i in range(4):
        assert np.array_equal(L.bockstein[i] % 3, G.bockstein[i] % 3)


def test_lens_ring_with_p_equal_n_has_nonzero_bockstein():
    L = lens_ring(LensParams(3, 2, 3))
    assert np.array_equal(L.beta(1, L.generator("x")[1]), L.generator("z")[1])


def test_generator_argument():
    for p, m in [(3, 2), (3, 3), (5, 3)]:
        L = lens_ring(LensParams(p, m, p * p))
        assert all(generator_argument(L, m).values())


def test_truncation_rejects_growing_and_json_is_plain():
    R = ring_of_group(3, 3, 4)
    with pytest.raises(ValueError):
        truncate_ring(R, 5)
    doc = R.to_json()
    assert json.loads(json.dumps(doc)) == doc
    assert doc["generators"]["s"][0] == 1


def test_ring_argument_validation():
    with pytest.raises(ValueError):
        ring_of_group(1, 3, 4)
    with pytest.raises(ValueError):
        ring_of_group(3, 4, 4)
    with pytest.raises(ValueError):
        lens_ring(LensParams(3, 2, 4))


def test_zero_bockstein_is_still_a_derivation():
    R = ring_of_group(3, 3, 5)
    zero = {i: np.zeros_like(M) for i, M in R.bockstein.items()}
    Z = R.with_bockstein(zero)
    assert Z.check_bockstein()
    assert not Z.beta(1, Z.generator("s")[1]).any()
