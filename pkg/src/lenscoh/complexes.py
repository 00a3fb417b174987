"""Chain complexes over Z and over the group ring Z[Z_n].

Conventions
-----------
* Boundaries lower degree: ``d_i : C_i -> C_{i-1}``, stored as matrices whose
  columns are the images of basis elements of ``C_i``.
* A group-ring matrix is an integer array of shape ``(rows, cols, n)``; entry
  ``[r, c, g]`` is the coefficient of ``t**g``.
* Cochains are dual: ``delta^j = transpose(d_{j+1})``.
* Tensor products carry the Koszul sign ``(-1)**deg(left)`` on the right
  differential.  The products module uses the same rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fp_linalg import (
    FpMatrix,
    Subspace,
    check_odd_prime,
    image_basis,
    int_matmul,
    kernel_basis,
    quotient_coordinates,
    quotient_representatives,
)


# ---------------------------------------------------------------------------
# group ring arithmetic


def gr_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product in Z[t]/(t^n - 1) of two coefficient vectors."""
    n = a.shape[-1]
    out = np.zeros(n, dtype=np.int64)
    for g in np.nonzero(a)[0]:
        out += int(a[g]) * np.roll(b, int(g))
    return out


def gr_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Product of group-ring matrices of shapes (r, s, n) and (s, c, n)."""
    n = A.shape[2]
    out = np.zeros((A.shape[0], B.shape[1], n), dtype=np.int64)
    for g in range(n):
        Ag = A[:, :, g]
        if not Ag.any():
            continue
        out += np.einsum("rs,sck->rck", Ag, np.roll(B, g, axis=2))
    return out


def gr_element(n: int, terms: dict[int, int]) -> np.ndarray:
    """Group-ring element ``sum c * t**e`` with exponents reduced mod n."""
    v = np.zeros(n, dtype=np.int64)
    for e, c in terms.items():
        v[e % n] += c
    return v


def norm_element(n: int) -> np.ndarray:
    return np.ones(n, dtype=np.int64)


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class ChainComplex:
    """Finite chain complex of free abelian groups in degrees ``0..top``."""

    ranks: tuple[int, ...]
    boundaries: dict[int, np.ndarray] = field(repr=False)

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, "ranks", ranks)
        bd = {}
        for i in range(1, len(ranks)):
            m = self.boundaries.get(i)
            if m is None:
                m = np.zeros((ranks[i - 1], ranks[i]), dtype=np.int64)
            m = np.array(m, dtype=np.int64).reshape(ranks[i - 1], ranks[i])
            m.setflags(write=False)
            bd[i] = m
        object.__setattr__(self, "boundaries", bd)
        report = verify_complex(self)
        if not report.ok:
            raise ValueError(report.message)

    @classmethod
    def unchecked(cls, ranks, boundaries) -> "ChainComplex":
        """Build without the d∘d check (for exercising :func:`verify_complex`)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "ranks", tuple(ranks))
        object.__setattr__(obj, "boundaries", {i: np.asarray(m, dtype=np.int64) for i, m in boundaries.items()})
        return obj

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def d(self, i: int) -> np.ndarray:
        """Boundary out of degree ``i`` (zero outside the stored range)."""
        if 1 <= i <= self.top:
            return self.boundaries[i]
        rows = self.ranks[i - 1] if 0 <= i - 1 <= self.top else 0
        cols = self.ranks[i] if 0 <= i <= self.top else 0
        return np.zeros((rows, cols), dtype=np.int64)

    def coboundary(self, j: int) -> np.ndarray:
        """Integer coboundary ``C^j -> C^{j+1}``."""
        return self.d(j + 1).T

    def euler_characteristic(self) -> int:
        return sum((-1) ** j * r for j, r in enumerate(self.ranks))

    def to_json(self) -> dict:
        return {
            "kind": "chain",
            "ranks": list(self.ranks),
            "boundaries": {str(i): m.tolist() for i, m in sorted(self.boundaries.items())},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ChainComplex":
        if doc.get("kind") != "chain":
            raise ValueError("not a chain complex document")
        ranks = doc["ranks"]
        bd = {
            int(i): np.array(m, dtype=np.int64).reshape(ranks[int(i) - 1], ranks[int(i)])
            for i, m in doc["boundaries"].items()
        }
        return cls(tuple(ranks), bd)


@dataclass(frozen=True)
class GroupRingComplex:
    """Finite complex of free Z[Z_n]-modules in degrees ``0..top``."""

    n: int
    ranks: tuple[int, ...]
    boundaries: dict[int, np.ndarray] = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("group order must be positive")
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, "ranks", ranks)
        bd = {}
        for i in range(1, len(ranks)):
            m = self.boundaries.get(i)
            if m is None:
                m = np.zeros((ranks[i - 1], ranks[i], self.n), dtype=np.int64)
            m = np.array(m, dtype=np.int64).reshape(ranks[i - 1], ranks[i], self.n)
            m.setflags(write=False)
            bd[i] = m
        object.__setattr__(self, "boundaries", bd)
        report = verify_complex(self)
        if not report.ok:
            raise ValueError(report.message)

    @classmethod
    def unchecked(cls, n, ranks, boundaries) -> "GroupRingComplex":
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "ranks", tuple(ranks))
        object.__setattr__(obj, "boundaries", {i: np.asarray(m, dtype=np.int64) for i, m in boundaries.items()})
        return obj

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def d(self, i: int) -> np.ndarray:
        if 1 <= i <= self.top:
            return self.boundaries[i]
        rows = self.ranks[i - 1] if 0 <= i - 1 <= self.top else 0
        cols = self.ranks[i] if 0 <= i <= self.top else 0
        return np.zeros((rows, cols, self.n), dtype=np.int64)

    def truncate(self, top: int) -> "GroupRingComplex":
        top = min(top, self.top)
        return GroupRingComplex(
            self.n, self.ranks[: top + 1], {i: self.boundaries[i] for i in range(1, top + 1)}
        )

    def to_json(self) -> dict:
        return {
            "kind": "group_ring",
            "group_order": self.n,
            "ranks": list(self.ranks),
            "boundaries": {str(i): m.tolist() for i, m in sorted(self.boundaries.items())},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GroupRingComplex":
        if doc.get("kind") != "group_ring":
            raise ValueError("not a group-ring complex document")
        n = int(doc["group_order"])
        ranks = doc["ranks"]
        bd = {
            int(i): np.array(m, dtype=np.int64).reshape(ranks[int(i) - 1], ranks[int(i)], n)
            for i, m in doc["boundaries"].items()
        }
        return cls(n, tuple(ranks), bd)


def complex_from_json(doc: dict):
    return GroupRingComplex.from_json(doc) if doc.get("kind") == "group_ring" else ChainComplex.from_json(doc)


def dumps_complex(C) -> str:
    return json.dumps(C.to_json(), sort_keys=True)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class ComplexReport:
    ok: bool
    degree: int | None = None
    message: str = "ok"


def verify_complex(C) -> ComplexReport:
    """Check matrix shapes and ``d_{i} d_{i+1} = 0`` exactly."""
    grp = isinstance(C, GroupRingComplex)
    ranks = C.ranks
    for i, m in C.boundaries.items():
        want = (ranks[i - 1], ranks[i]) + ((C.n,) if grp else ())
        if m.shape != want:
            return ComplexReport(False, i, f"d_{i} has shape {m.shape}, expected {want}")
    for i in range(2, len(ranks)):
        a, b = C.boundaries[i - 1], C.boundaries[i]
        prod = gr_matmul(a, b) if grp else int_matmul(a, b)
        if prod.any():
            return ComplexReport(False, i, f"d_{i - 1} d_{i} != 0 (composite out of degree {i})")
    return ComplexReport(True)


# ---------------------------------------------------------------------------
# cohomology


@dataclass(frozen=True)
class GradedVectorSpaceWithReps:
    """Mod-p cohomology of a cochain complex, degree by degree, with cocycle reps."""

    p: int
    dims: tuple[int, ...]
    reps: tuple[tuple[np.ndarray, ...], ...] = field(repr=False)
    cocycles: tuple[Subspace, ...] = field(repr=False)
    coboundaries: tuple[Subspace, ...] = field(repr=False)

    def coordinates(self, j: int, v) -> np.ndarray:
        """Coordinates of the class of cocycle ``v`` in the ``reps[j]`` basis."""
        return quotient_coordinates(v, self.reps[j], self.coboundaries[j])


def cohomology_mod_p(C: ChainComplex, p: int) -> GradedVectorSpaceWithReps:
    p = check_odd_prime(p)
    dims, reps, Z, B = [], [], [], []
    for j in range(C.top + 1):
        r = C.ranks[j]
        delta = FpMatrix(C.coboundary(j), p)
        Zj = kernel_basis(delta) if delta.rows else Subspace.full(r, p)
        prev = FpMatrix(C.coboundary(j - 1), p) if j > 0 else None
        Bj = image_basis(prev) if prev is not None and prev.cols else Subspace.zero(r, p)
        R = quotient_representatives(Zj, Bj)
        dims.append(len(R))
        reps.append(tuple(R))
        Z.append(Zj)
        B.append(Bj)
    return GradedVectorSpaceWithReps(p, tuple(dims), tuple(reps), tuple(Z), tuple(B))


def homology_ranks_over_Z(C: ChainComplex) -> list[tuple[int, list[int]]]:
    """Integral homology as (free rank, torsion coefficients) per degree.

    Smith normal form via sympy; used for acyclicity checks only.
    """
    from sympy import Matrix
    from sympy.matrices.normalforms import smith_normal_form

    def invariants(m: np.ndarray) -> list[int]:
        if m.size == 0:
            return []
        snf = smith_normal_form(Matrix(m.tolist()))
        return [abs(int(snf[k, k])) for k in range(min(snf.shape)) if snf[k, k] != 0]

    out = []
    for i in range(C.top + 1):
        d_in = invariants(C.d(i + 1)) if i + 1 <= C.top else []
        d_out_rank = len(invariants(C.d(i))) if i >= 1 else 0
        free = C.ranks[i] - d_out_rank - len(d_in)
        out.append((free, [e for e in d_in if e > 1]))
    return out


# ---------------------------------------------------------------------------
# constructions


def apply_augmentation(W: GroupRingComplex) -> ChainComplex:
    """Collapse the group: ``sum c_g t^g -> sum c_g``, giving ``Z tensor_G W``."""
    return ChainComplex(W.ranks, {i: m.sum(axis=2) for i, m in W.boundaries.items()})


def underlying_complex(W: GroupRingComplex) -> ChainComplex:
    """Restriction of scalars to Z; basis ``t^k e_a`` ordered by (a, k)."""
    n = W.n
    ranks = tuple(r * n for r in W.ranks)
    bd = {}
    for i, m in W.boundaries.items():
        out = np.zeros((ranks[i - 1], ranks[i]), dtype=np.int64)
        rows, cols, _ = m.shape
        for a2 in range(rows):
            for a in range(cols):
                lam = m[a2, a]
                for k in range(n):
                    out[a2 * n : (a2 + 1) * n, a * n + k] = np.roll(lam, k)
        bd[i] = out
    return ChainComplex(ranks, bd)


def _total_basis(W: GroupRingComplex, C: GroupRingComplex, d: int):
    index = {}
    for i in range(d + 1):
        j = d - i
        if i > W.top or j > C.top or j < 0:
            continue
        for a in range(W.ranks[i]):
            for b in range(C.ranks[j]):
                for k in range(W.n):
                    index[(i, a, b, k)] = len(index)
    return index


def borel_total_complex(W: GroupRingComplex, C: GroupRingComplex, max_degree: int) -> ChainComplex:
    """Total complex of ``W tensor_{Z[G]} C`` in total degrees ``0..max_degree``.

    The tensor is over the group ring, ``g w (x) c = w (x) g^{-1} c``, which is
    the cellular model of the Borel construction ``(E_G x X)/G``.  Basis order
    is lexicographic in (W-degree, W-index, C-index, group exponent).
    Cohomology is only meaningful below ``max_degree`` unless W reaches past it.
    """
    if W.n != C.n:
        raise ValueError(f"group orders differ: {W.n} vs {C.n}")
    if max_degree > W.top:
        raise ValueError(f"resolution only reaches degree {W.top} < {max_degree}")
    n = W.n
    bases = [_total_basis(W, C, d) for d in range(max_degree + 1)]
    ranks = tuple(len(b) for b in bases)
    bd = {}
    for d in range(1, max_degree + 1):
        src, tgt = bases[d], bases[d - 1]
        M = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for (i, a, b, k), col in src.items():
            j = d - i
            if i >= 1:
                dw = W.boundaries[i]
                for a2 in np.nonzero(dw[:, a].any(axis=1))[0]:
                    for g in np.nonzero(dw[a2, a])[0]:
                        M[tgt[(i - 1, int(a2), b, (k - int(g)) % n)], col] += dw[a2, a, g]
            if j >= 1:
                dc = C.boundaries[j]
                sign = -1 if i % 2 else 1
                for b2 in np.nonzero(dc[:, b].any(axis=1))[0]:
                    for h in np.nonzero(dc[b2, b])[0]:
                        M[tgt[(i, a, int(b2), (k + int(h)) % n)], col] += sign * dc[b2, b, h]
        bd[d] = M
    return ChainComplex(ranks, bd)


def borel_cohomology_dims(W: GroupRingComplex, C: GroupRingComplex, p: int, D: int) -> list[int]:
    """``dim H^j((W tensor_G C); Z_p)`` for ``j = 0..D``; W must reach degree ``D + 1``."""
    T = borel_total_complex(W, C, D + 1)
    return list(cohomology_mod_p(T, p).dims[: D + 1])


def cohomology_dims(C: ChainComplex, p: int) -> list[int]:
    return list(cohomology_mod_p(C, p).dims)


def permute_basis(C: ChainComplex, perms: Sequence[Sequence[int]]) -> ChainComplex:
    """Same complex with basis of degree i reordered by ``perms[i]``."""
    bd = {}
    for i, m in C.boundaries.items():
        bd[i] = m[np.ix_(list(perms[i - 1]), list(perms[i]))]
    return ChainComplex(C.ranks, bd)
