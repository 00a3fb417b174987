from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lenscoh.products import lens_ring, ring_of_group
from lenscoh.rings import (
    Certificate,
    ConstantAssignment,
    NonConfluentError,
    RingPresentation,
    Rewriter,
    SearchSpaceTooLarge,
    case_i_family,
    case_ii_family,
    check_bockstein_relation,
    evaluate_monomial,
    match_presentation,
    monomial_basis,
    parse_presentation,
    poincare_series,
    presentation_json,
    quotient_dims,
)
from lenscoh.spaces import LensParams
from lenscoh.spectral import run_branch, tot_ring


def case_i_table(p: int, n: int) -> list[int]:
    """Oracle: 1 at j = 0, 2p-1 mod 2p, 2 in between, 0 above 2np - 1."""
    return [1 if j % (2 * p) in (0, 2 * p - 1) else 2 for j in range(2 * n * p)]


def zero_constant_count(p: int, n: int, d: int) -> int:
    """Oracle: brute-force count of monomials outside the (monomial) ideal when every constant is 0."""
    hs = list(range(1, 2 * p - 2, 2))
    total = 0
    for e, i, k in itertools.product(range(2), range(p), range(n)):
        base = e + 2 * i + 2 * p * k
        if base == d:
            total += 1
        if i == 0:
            total += sum(1 for h in hs if base + h == d)
    return total


def test_parse_text_and_json_round_trip():
    text = "gen x 1; gen y 1; gen z 2; const A; rel x^2; rel z^3 - A*x*y*z^2; bockstein x -> 0;"
    P = parse_presentation(text, 3, 5, name="demo")
    assert P.constants == ("A",)
    assert P.bockstein == (("x", None),)
    again = parse_presentation(P.to_text(), 3, 5, name="demo")
    assert again == P
    assert RingPresentation.from_json(P.to_json()) == P
    assert presentation_json(P) == presentation_json(again)
    for bad in ("gen x", "frob x", "gen x 1; rel q^2;", "bockstein x => y", "gen x 1; gen z 2; rel z - x;"):
        with pytest.raises(ValueError):
            parse_presentation(bad, 3, 5)


def test_monomial_basis_case_ii():
    P = case_ii_family(3, 3)
    assert monomial_basis(P, 4) == ["z^2"]
    assert monomial_basis(P, 5) == ["x*z^2"]
    assert poincare_series(P) == [1] * 6
    assert poincare_series(case_ii_family(3, 3, top=7)) == [1] * 6 + [0, 0]
    with pytest.raises(ValueError):
        monomial_basis(P, 6)


def test_exterior_generator():
    P = parse_presentation("gen e 1 exterior;", 5, 3)
    assert poincare_series(P) == [1, 1, 0, 0]


@pytest.mark.parametrize("p,n", [(3, 2), (3, 4), (5, 2), (5, 3), (5, 4), (3, 5)])
def test_case_i_zero_constants_confluent_and_counted(p, n):
    assert math.gcd(p, n) == 1
    P = case_i_family(p, n)
    series = poincare_series(P)
    assert series == quotient_dims(P)
    assert series == [zero_constant_count(p, n, d) for d in range(P.top + 1)]
    assert series == case_i_table(p, n)
    assert sum(series) == 2 * n * (2 * p - 1)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_rewriting_agrees_with_linear_algebra_or_names_the_obstruction(data):
    p, n = data.draw(st.sampled_from([(3, 2), (5, 2)]))
    P = case_i_family(p, n)
    values = {c: data.draw(st.integers(0, p - 1), label=c) for c in P.constants}
    try:
        series = poincare_series(P, assignment=values)
    except NonConfluentError as err:
        assert "critical pair" in str(err)
        return
    assert series == quotient_dims(P, assignment=values)


def test_rewriter_normal_form_is_reduced():
    P = case_ii_family(3, 3)
    rw = Rewriter(P)
    z3 = (0, 3)
    assert rw.normal_form({z3: 1}) == {}
    assert rw.normal_form({(1, 2): 2}) == {(1, 2): 2}


def test_forced_vanishing_of_diagonal_constants():
    assert ConstantAssignment({"B1_3": 2}).respects_forced_vanishing()
    assert not ConstantAssignment({"B3_3": 1}).respects_forced_vanishing()


def test_match_case_ii_against_lens_ring_with_bockstein():
    R = lens_ring(LensParams(3, 3, 9))
    fam = case_ii_family(3, 3, bockstein_x=None)
    certs = match_presentation(R, fam)
    assert [c.level for c in certs] == [0]
    assert check_bockstein_relation(R, certs[0], fam)
    # the relations really vanish on the certified images
    images = {k: (d, np.array(v)) for k, (d, v) in certs[0].generators.items()}
    deg, val = evaluate_monomial(R, fam, (2, 0), images)
    assert deg == 2 and not val.any()
    assert certs[0].to_json()["level"] == 0
    assert not check_bockstein_relation(R, certs[0], case_ii_family(3, 3, bockstein_x="z"))


def test_bockstein_hint_for_prime_order():
    R = lens_ring(LensParams(3, 3, 3))
    fam = case_ii_family(3, 3, bockstein_x="z")
    certs = match_presentation(R, fam)
    assert certs and all(check_bockstein_relation(R, c, fam) for c in certs)
    zeroed = R.with_bockstein({i: np.zeros_like(M) for i, M in R.bockstein.items()})
    assert not check_bockstein_relation(zeroed, certs[0], fam)


def test_bockstein_check_on_group_ring_and_negative_control():
    R = ring_of_group(3, 3, 5)
    cert = Certificate({"x": R.generators["s"], "y": R.generators["t"]}, {}, 0)
    fam = case_i_family(3, 2)
    assert check_bockstein_relation(R, cert, fam)
    zeroed = R.with_bockstein({i: np.zeros_like(M) for i, M in R.bockstein.items()})
    assert not check_bockstein_relation(zeroed, cert, fam)


@pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (3, 4)])
def test_match_case_i_family_against_tot_ring(p, n):
    T = tot_ring(run_branch(p, n * p, "case1").final)
    certs = match_presentation(T.ring, case_i_family(p, n))
    assert len(certs) >= 1
    assert all(set(c.constants.values()) <= {0} for c in certs)


def test_negative_control_and_caps():
    R = lens_ring(LensParams(3, 3, 9))
    assert match_presentation(R, case_i_family(3, 1, top=5)) == []
    assert match_presentation(R, case_ii_family(3, 2, top=5)) == []
    with pytest.raises(SearchSpaceTooLarge):
        match_presentation(R, case_ii_family(3, 3), max_nodes=1)
    with pytest.raises(ValueError):
        match_presentation(R, case_ii_family(5, 3))
