"""Cell structures for lens spaces, spheres and classifying spaces of Z_n.

The sphere S^{2m-1} with the rotation action
``(xi_1, ..., xi_m) -> (zeta^{q_1} xi_1, ..., zeta^{q_m} xi_m)`` has the
standard join cell structure: one free orbit of cells in every dimension,
with

    d(e_{2i-1}) = (t^{r_i} - 1) e_{2i-2},     d(e_{2i}) = N e_{2i-1},

where ``N = 1 + t + ... + t^{n-1}`` and ``r_i`` is the inverse of ``q_i``
mod n.  Every builder re-checks ``d∘d = 0`` on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .complexes import ChainComplex, GroupRingComplex, apply_augmentation, gr_element, norm_element
from .fp_linalg import check_odd_prime


def default_degree_bound(m: int, p: int) -> int:
    return 2 * m + 2 * p + 2


@dataclass(frozen=True)
class LensParams:
    """Parameters of ``L^{2m-1}(n; q_1, ..., q_m)`` with coefficients in Z_p."""

    p: int
    m: int
    n: int
    q: tuple[int, ...] = field(default=())

    def __post_init__(self):
        check_odd_prime(self.p)
        if self.m < 2:
            raise ValueError(f"m must be > 1, got {self.m}")
        if self.n < 2:
            raise ValueError(f"group order must be >= 2, got {self.n}")
        q = tuple(int(x) for x in self.q) if self.q else (1,) * self.m
        if len(q) != self.m:
            raise ValueError(f"expected {self.m} rotation weights, got {len(q)}")
        bad = [x for x in q if gcd(x, self.n) != 1]
        if bad:
            raise ValueError(f"weights {bad} are not prime to n = {self.n}")
        object.__setattr__(self, "q", q)

    @property
    def dimension(self) -> int:
        return 2 * self.m - 1

    def twisting_exponents(self) -> tuple[int, ...]:
        return tuple(pow(x, -1, self.n) for x in self.q)

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "n": self.n, "q": list(self.q)}


def _rank_one(n: int, boundaries: dict[int, np.ndarray], top: int) -> GroupRingComplex:
    return GroupRingComplex(
        n, (1,) * (top + 1), {i: e.reshape(1, 1, n) for i, e in boundaries.items()}
    )


def standard_resolution(n: int, D: int) -> GroupRingComplex:
    """Periodic free resolution of Z over Z[Z_n], truncated at degree D."""
    if n < 2:
        raise ValueError("group order must be >= 2")
    if D < 0:
        raise ValueError("degree bound must be nonnegative")
    t_minus_1 = gr_element(n, {1: 1, 0: -1})
    norm = norm_element(n)
    bd = {i: (t_minus_1 if i % 2 else norm) for i in range(1, D + 1)}
    return _rank_one(n, bd, D)


def classifying_complex(n: int, D: int) -> ChainComplex:
    """Cellular chains of the (D+1)-skeleton model of B_{Z_n}: boundaries 0, n, 0, n, ..."""
    return apply_augmentation(standard_resolution(n, D))


def sphere_complex(params: LensParams) -> GroupRingComplex:
    """Free Z[Z_n]-cell structure of S^{2m-1} with the rotation action."""
    n = params.n
    norm = norm_element(n)
    bd = {}
    for i, r in enumerate(params.twisting_exponents(), start=1):
        bd[2 * i - 1] = gr_element(n, {r: 1, 0: -1})
        if 2 * i <= params.dimension:
            bd[2 * i] = norm
    return _rank_one(n, bd, params.dimension)


def lens_complex(params: LensParams) -> ChainComplex:
    """Cellular chains of L^{2m-1}(n; q): one cell per dimension, boundaries 0, ±n."""
    return apply_augmentation(sphere_complex(params))


def fold_group_ring(values: np.ndarray, k: int) -> np.ndarray:
    """Image of a group-ring array under Z[Z_n] -> Z[Z_k] (k | n), ``t -> t``."""
    n = values.shape[-1]
    if n % k:
        raise ValueError(f"{k} does not divide {n}")
    return values.reshape(values.shape[:-1] + (n // k, k)).sum(axis=-2)


def residual_action_complex(params: LensParams) -> GroupRingComplex:
    """L^{2m-1}(p; q) with its free action of G/N = Z_p, for G = Z_{p^2}.

    Obtained from the Z_{p^2} sphere complex by dividing out the subgroup
    N = <t^p>: coefficients are pushed along Z[Z_{p^2}] -> Z[Z_p].  The
    underlying complex is the lens space L(p; q) (p cells per dimension); the
    augmentation is the orbit space L(p^2; q).
    """
    p = params.p
    if params.n != p * p:
        raise ValueError(f"residual action needs n = p^2 = {p * p}, got n = {params.n}")
    S = sphere_complex(params)
    bd = {i: fold_group_ring(m, p) for i, m in S.boundaries.items()}
    return GroupRingComplex(p, S.ranks, bd)
