"""Cup products, truncation and the mod-p Bockstein.

Cup products on H*(B_{Z_n}; Z_p) come from an equivariant diagonal
approximation ``W -> W (x) W`` on the standard resolution, built degree by
degree by solving the chain-map equation mod p.  Lens space rings are the
truncations of these rings; their Bockstein is then recomputed directly on
the lens cellular complex from integer lifts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .complexes import ChainComplex, GroupRingComplex, apply_augmentation, cohomology_mod_p
from .fp_linalg import FpMatrix, SparseSystem, check_odd_prime, int_matmul, quotient_coordinates, solve
from .spaces import LensParams, lens_complex, standard_resolution


class DiagonalLiftError(RuntimeError):
    """The chain-map equation had no solution; W was not a resolution."""


# ---------------------------------------------------------------------------
# diagonal approximation


@dataclass(frozen=True)
class DiagonalMap:
    """Equivariant chain map ``W -> W (x) W`` on a rank-one resolution, mod p.

    ``components[d][(i, j)]`` is an ``(n, n)`` array whose entry ``[a, b]`` is
    the coefficient of ``t^a e_i (x) t^b e_j`` in ``Delta(e_d)``.
    """

    W: GroupRingComplex = field(repr=False)
    p: int
    top: int
    components: dict[int, dict[tuple[int, int], np.ndarray]] = field(repr=False)

    def cup_constant(self, i: int, j: int) -> int:
        """``(e_i^* cup e_j^*)(e_{i+j})`` for trivial coefficients."""
        return int(self.components[i + j][(i, j)].sum() % self.p)


def _scalar_boundary(W: GroupRingComplex, i: int) -> np.ndarray:
    return W.boundaries[i][0, 0]


def _tensor_boundary(W: GroupRingComplex, X: dict[tuple[int, int], np.ndarray], d: int, p: int):
    """Apply ``d (x) 1 + (-1)^i 1 (x) d`` to an element of ``(W (x) W)_d``."""
    n = W.n
    out = {(i, d - 1 - i): np.zeros((n, n), dtype=np.int64) for i in range(d)}
    for (i, j), arr in X.items():
        if i >= 1:
            lam = _scalar_boundary(W, i)
            for g in np.nonzero(lam)[0]:
                out[(i - 1, j)] += int(lam[g]) * np.roll(arr, int(g), axis=0)
        if j >= 1:
            lam = _scalar_boundary(W, j)
            sign = -1 if i % 2 else 1
            for h in np.nonzero(lam)[0]:
                out[(i, j - 1)] += sign * int(lam[h]) * np.roll(arr, int(h), axis=1)
    return {k: v % p for k, v in out.items()}


def _diagonal_action(lam: np.ndarray, X: dict[tuple[int, int], np.ndarray], p: int):
    """``lam`` acting on ``W (x) W`` through the diagonal ``t -> t (x) t``."""
    out = {}
    for key, arr in X.items():
        acc = np.zeros_like(arr)
        for g in np.nonzero(lam)[0]:
            acc += int(lam[g]) * np.roll(np.roll(arr, int(g), axis=0), int(g), axis=1)
        out[key] = acc % p
    return out


def build_diagonal(W: GroupRingComplex, p: int, D: int | None = None) -> DiagonalMap:
    """Lift the identity of Z to a diagonal, one degree at a time.

    In degree d the unknown is ``Delta(e_d)`` and the equation is
    ``d_{W(x)W} Delta(e_d) = Delta(d e_d)``; a particular solution with free
    variables zeroed is taken.
    """
    p = check_odd_prime(p)
    D = W.top if D is None else D
    if D > W.top:
        raise ValueError("diagonal requested beyond the top of W")
    if any(r != 1 for r in W.ranks):
        raise ValueError("build_diagonal expects a rank-one resolution")
    n = W.n
    e00 = np.zeros((n, n), dtype=np.int64)
    e00[0, 0] = 1
    comps: dict[int, dict[tuple[int, int], np.ndarray]] = {0: {(0, 0): e00}}
    for d in range(1, D + 1):
        rhs = _diagonal_action(_scalar_boundary(W, d), comps[d - 1], p)
        system = SparseSystem((d + 1) * n * n, p)
        rows: dict[int, dict[int, int]] = {}

        def eq_index(i, a, b):
            return (i * n + a) * n + b

        for i in range(d + 1):
            j = d - i
            lam_i = _scalar_boundary(W, i) if i >= 1 else None
            lam_j = _scalar_boundary(W, j) if j >= 1 else None
            sign = -1 if i % 2 else 1
            for a in range(n):
                for b in range(n):
                    col = (i * n + a) * n + b
                    if lam_i is not None:
                        for g in np.nonzero(lam_i)[0]:
                            r = eq_index(i - 1, (a + int(g)) % n, b)
                            rows.setdefault(r, {})
                            rows[r][col] = rows[r].get(col, 0) + int(lam_i[g])
                    if lam_j is not None:
                        for h in np.nonzero(lam_j)[0]:
                            r = eq_index(i, a, (b + int(h)) % n)
                            rows.setdefault(r, {})
                            rows[r][col] = rows[r].get(col, 0) + sign * int(lam_j[h])
        for i in range(d):
            block = rhs[(i, d - 1 - i)]
            for a in range(n):
                for b in range(n):
                    r = eq_index(i, a, b)
                    system.add_row(rows.get(r, {}), int(block[a, b]))
        if not system.consistent:
            raise DiagonalLiftError(f"chain-map equation unsolvable in degree {d}")
        x = system.solution().reshape(d + 1, n, n)
        comps[d] = {(i, d - i): x[i] for i in range(d + 1)}
    return DiagonalMap(W, p, D, comps)


def check_chain_map(diag: DiagonalMap) -> list[int]:
    """Degrees where ``d Delta = Delta d`` fails (empty list means exact)."""
    bad = []
    W, p = diag.W, diag.p
    for d in range(1, diag.top + 1):
        lhs = _tensor_boundary(W, diag.components[d], d, p)
        rhs = _diagonal_action(_scalar_boundary(W, d), diag.components[d - 1], p)
        if any(not np.array_equal(lhs[k], rhs[k]) for k in lhs):
            bad.append(d)
    return bad


# ---------------------------------------------------------------------------
# cohomology rings


@dataclass(frozen=True)
class CohomologyRing:
    """Graded-commutative Z_p-algebra through degree ``top``.

    ``mult[(i, j)][a, b, :]`` are the coordinates of ``basis_i[a] * basis_j[b]``
    in degree ``i + j``; ``bockstein[i]`` is a ``(dim_{i+1}, dim_i)`` matrix or
    the whole map is ``None`` when unknown.
    """

    p: int
    top: int
    labels: tuple[tuple[str, ...], ...]
    mult: dict[tuple[int, int], np.ndarray] = field(repr=False)
    bockstein: dict[int, np.ndarray] | None = field(default=None, repr=False)
    generators: dict[str, tuple[int, tuple[int, ...]]] = field(default_factory=dict)
    cochain_basis: dict[int, np.ndarray] | None = field(default=None, repr=False, compare=False)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(l) for l in self.labels)

    def dim(self, d: int) -> int:
        return len(self.labels[d]) if 0 <= d <= self.top else 0

    def zero(self, d: int) -> np.ndarray:
        return np.zeros(self.dim(d), dtype=np.int64)

    def basis_vector(self, d: int, k: int) -> np.ndarray:
        v = self.zero(d)
        v[k] = 1
        return v

    def unit(self) -> np.ndarray:
        return self.basis_vector(0, 0)

    def generator(self, name: str) -> tuple[int, np.ndarray]:
        d, vec = self.generators[name]
        return d, np.array(vec, dtype=np.int64)

    def product(self, i: int, u, j: int, v) -> np.ndarray:
        if i + j > self.top or self.dim(i) == 0 or self.dim(j) == 0:
            return self.zero(i + j) if i + j <= self.top else np.zeros(0, dtype=np.int64)
        T = self.mult[(i, j)]
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return np.einsum("a,b,abk->k", u, v, T) % self.p

    def power(self, i: int, u, k: int) -> tuple[int, np.ndarray]:
        deg, acc = 0, self.unit()
        for _ in range(k):
            if deg + i > self.top:
                return deg + i, np.zeros(0, dtype=np.int64)
            acc = self.product(deg, acc, i, u)
            deg += i
        return deg, acc

    def beta(self, i: int, u) -> np.ndarray:
        if self.bockstein is None:
            raise ValueError("ring carries no Bockstein")
        if i + 1 > self.top:
            return np.zeros(0, dtype=np.int64)
        return (self.bockstein[i] @ np.asarray(u, dtype=np.int64)) % self.p

    # -- axioms ---------------------------------------------------------------

    def _basis_pairs(self):
        for i in range(self.top + 1):
            for j in range(self.top + 1 - i):
                for a in range(self.dim(i)):
                    for b in range(self.dim(j)):
                        yield i, a, j, b

    def check_unit(self) -> bool:
        if self.dim(0) != 1:
            return False
        one = self.unit()
        for d in range(self.top + 1):
            for k in range(self.dim(d)):
                e = self.basis_vector(d, k)
                if not (np.array_equal(self.product(0, one, d, e), e) and np.array_equal(self.product(d, e, 0, one), e)):
                    return False
        return True

    def check_graded_commutative(self) -> bool:
        p = self.p
        for i, a, j, b in self._basis_pairs():
            u, v = self.basis_vector(i, a), self.basis_vector(j, b)
            sign = -1 if (i * j) % 2 else 1
            if not np.array_equal(self.product(i, u, j, v), (sign * self.product(j, v, i, u)) % p):
                return False
        return True

    def check_associative(self) -> bool:
        for i in range(self.top + 1):
            for j in range(self.top + 1 - i):
                for k in range(self.top + 1 - i - j):
                    for a, b, c in itertools.product(range(self.dim(i)), range(self.dim(j)), range(self.dim(k))):
                        u, v, w = self.basis_vector(i, a), self.basis_vector(j, b), self.basis_vector(k, c)
                        left = self.product(i + j, self.product(i, u, j, v), k, w)
                        right = self.product(i, u, j + k, self.product(j, v, k, w))
                        if not np.array_equal(left, right):
                            return False
        return True

    def check_bockstein(self) -> bool:
        """``beta beta = 0`` and the derivation rule, wherever defined."""
        if self.bockstein is None:
            return True
        p = self.p
        for i in range(self.top - 1):
            if ((self.bockstein[i + 1] @ self.bockstein[i]) % p).any():
                return False
        for i, a, j, b in self._basis_pairs():
            if i + j + 1 > self.top:
                continue
            u, v = self.basis_vector(i, a), self.basis_vector(j, b)
            lhs = self.beta(i + j, self.product(i, u, j, v))
            sign = -1 if i % 2 else 1
            rhs = (self.product(i + 1, self.beta(i, u), j, v) + sign * self.product(i, u, j + 1, self.beta(j, v))) % p
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def check_axioms(self) -> dict[str, bool]:
        return {
            "unit": self.check_unit(),
            "graded_commutative": self.check_graded_commutative(),
            "associative": self.check_associative(),
            "bockstein": self.check_bockstein(),
        }

    # -- transport ------------------------------------------------------------

    def rename(self, mapping: dict[str, str]) -> "CohomologyRing":
        """Rename generator symbols in labels and the generator table."""

        def relabel(label: str) -> str:
            parts = []
            for factor in label.split("*"):
                base, _, exp = factor.partition("^")
                base = mapping.get(base, base)
                parts.append(base + ("^" + exp if exp else ""))
            return "*".join(parts)

        labels = tuple(tuple(relabel(l) for l in ls) for ls in self.labels)
        gens = {mapping.get(k, k): v for k, v in self.generators.items()}
        return CohomologyRing(self.p, self.top, labels, self.mult, self.bockstein, gens, self.cochain_basis)

    def with_bockstein(self, bockstein: dict[int, np.ndarray] | None) -> "CohomologyRing":
        return CohomologyRing(
            self.p, self.top, self.labels, self.mult, bockstein, self.generators, self.cochain_basis
        )

    def to_json(self) -> dict:
        triples = []
        for (i, j), T in sorted(self.mult.items()):
            for a, b, k in zip(*np.nonzero(T)):
                triples.append([f"{i}:{a}", f"{j}:{b}", f"{i + j}:{k}", int(T[a, b, k])])
        doc = {
            "p": self.p,
            "top": self.top,
            "dims": list(self.dims),
            "basis": [list(l) for l in self.labels],
            "multiplication": triples,
            "generators": {k: [d, list(vec)] for k, (d, vec) in sorted(self.generators.items())},
        }
        if self.bockstein is not None:
            doc["bockstein"] = {str(i): m.tolist() for i, m in sorted(self.bockstein.items())}
        return doc


def truncate_ring(R: CohomologyRing, top: int) -> CohomologyRing:
    """Kill every degree above ``top``."""
    if top > R.top:
        raise ValueError(f"cannot truncate at {top} above the ring's top degree {R.top}")
    mult = {(i, j): T for (i, j), T in R.mult.items() if i + j <= top}
    bock = None
    if R.bockstein is not None:
        bock = {i: m for i, m in R.bockstein.items() if i + 1 <= top}
    gens = {k: v for k, v in R.generators.items() if v[0] <= top}
    cb = None if R.cochain_basis is None else {d: M for d, M in R.cochain_basis.items() if d <= top}
    return CohomologyRing(R.p, top, R.labels[: top + 1], mult, bock, gens, cb)


def _change_basis(R: CohomologyRing, P: dict[int, np.ndarray], labels) -> CohomologyRing:
    """Re-express R in new bases; columns of ``P[d]`` are new basis vectors."""
    p = R.p
    Pinv = {}
    for d, M in P.items():
        F = FpMatrix(M, p)
        Pinv[d] = np.array([solve(F, e) for e in np.eye(M.shape[0], dtype=np.int64)]).T.reshape(M.shape)
    mult = {}
    for (i, j), T in R.mult.items():
        T2 = np.einsum("abk,ax,by->xyk", T, P[i], P[j]) % p
        mult[(i, j)] = np.einsum("xyk,lk->xyl", T2, Pinv[i + j]) % p
    bock = None
    if R.bockstein is not None:
        bock = {i: (Pinv[i + 1] @ m @ P[i]) % p for i, m in R.bockstein.items()}
    cb = None
    if R.cochain_basis is not None:
        cb = {d: (R.cochain_basis[d] @ P[d]) % p for d in P}
    return CohomologyRing(p, R.top, tuple(tuple(l) for l in labels), mult, bock, {}, cb)


# ---------------------------------------------------------------------------
# Bockstein


def bockstein(C: ChainComplex, p: int) -> dict[int, np.ndarray]:
    """Chain-level Bockstein ``H^j -> H^{j+1}`` for 0 -> Z_p -> Z_{p^2} -> Z_p -> 0.

    Lift a mod-p cocycle to the integers, apply the integral coboundary,
    divide by p and reduce.  Matrices are in the cohomology_mod_p rep bases.
    The top degree maps to nothing and is omitted.
    """
    if not isinstance(C, ChainComplex):
        raise TypeError("Bockstein needs an integral ChainComplex")
    p = check_odd_prime(p)
    H = cohomology_mod_p(C, p)
    out = {}
    for j in range(C.top):
        delta = C.coboundary(j)
        cols = []
        for u in H.reps[j]:
            w = int_matmul(delta, np.asarray(u, dtype=np.int64))
            if (w % p).any():
                raise ValueError(f"representative in degree {j} is not a mod-p cocycle")
            cols.append(H.coordinates(j + 1, (w // p) % p))
        out[j] = np.array(cols, dtype=np.int64).T.reshape(H.dims[j + 1], H.dims[j]) % p
    return out


# ---------------------------------------------------------------------------
# rings of cyclic groups and lens spaces


def _raw_group_ring(n: int, p: int, D: int) -> tuple[CohomologyRing, object]:
    W = standard_resolution(n, D + 1)
    cochains = apply_augmentation(W)
    H = cohomology_mod_p(cochains, p)
    diag = build_diagonal(W, p, D)
    mult = {}
    for i in range(D + 1):
        for j in range(D + 1 - i):
            T = np.zeros((H.dims[i], H.dims[j], H.dims[i + j]), dtype=np.int64)
            c = diag.cup_constant(i, j)
            for a, u in enumerate(H.reps[i]):
                for b, v in enumerate(H.reps[j]):
                    w = np.array([int(u[0]) * int(v[0]) * c % p])
                    T[a, b] = H.coordinates(i + j, w)
            mult[(i, j)] = T % p
    bock = {i: m for i, m in bockstein(cochains, p).items() if i < D}
    labels = tuple(tuple(f"h{d}_{k}" for k in range(H.dims[d])) for d in range(D + 1))
    cb = {d: np.array(H.reps[d], dtype=np.int64).reshape(H.dims[d], -1).T for d in range(D + 1)}
    return CohomologyRing(p, D, labels, mult, bock, {}, cb), diag


def ring_of_group(n: int, p: int, D: int) -> CohomologyRing:
    """H*(B_{Z_n}; Z_p) through degree D, in the monomial basis ``s^e t^k`` when possible.

    ``s`` is the degree-1 basis class; ``t`` is ``beta(s)`` when that is
    nonzero (n = p) and the degree-2 basis class otherwise.
    """
    p = check_odd_prime(p)
    if n < 2:
        raise ValueError("group order must be >= 2")
    if D < 0:
        raise ValueError("degree bound must be nonnegative")
    raw, _ = _raw_group_ring(n, p, D)
    if any(k != 1 for k in raw.dims):
        return raw
    s = raw.basis_vector(1, 0) if D >= 1 else None
    t = None
    if D >= 2:
        bs = raw.beta(1, s)
        t = bs if bs.any() else raw.basis_vector(2, 0)
    P = {0: np.eye(1, dtype=np.int64)}
    labels = [("1",)]
    for d in range(1, D + 1):
        k = d // 2
        if d % 2:
            _, tk = raw.power(2, t, k) if k else (0, raw.unit())
            vec = raw.product(1, s, 2 * k, tk)
            label = "s" + (f"*t^{k}" if k > 1 else "*t" if k == 1 else "")
        else:
            _, vec = raw.power(2, t, k)
            label = f"t^{k}" if k > 1 else "t"
        if not vec.any():
            return raw
        P[d] = vec.reshape(1, 1)
        labels.append((label,))
    R = _change_basis(raw, P, labels)
    gens = {}
    if D >= 1:
        gens["s"] = (1, (1,))
    if D >= 2:
        gens["t"] = (2, (1,))
    return CohomologyRing(R.p, R.top, R.labels, R.mult, R.bockstein, gens, R.cochain_basis)


def lens_ring(params: LensParams) -> CohomologyRing:
    """H*(L^{2m-1}(n; q); Z_p) as the truncation of H*(B_{Z_n}; Z_p) at 2m-1.

    Generators are renamed ``x`` (degree 1) and ``z`` (degree 2).  The
    Bockstein is recomputed on the lens cellular complex itself.
    """
    p, n, top = params.p, params.n, params.dimension
    if n % p:
        raise ValueError(f"truncation model needs p | n (p={p}, n={n})")
    R = truncate_ring(ring_of_group(n, p, top), top).rename({"s": "x", "t": "z"})
    L = lens_complex(params)
    # one cell per dimension on both sides, so B_{Z_n} cochain vectors are lens cochains
    return R.with_bockstein(bockstein_in_basis(L, p, R.cochain_basis))


def bockstein_in_basis(C: ChainComplex, p: int, basis: dict[int, np.ndarray]) -> dict[int, np.ndarray]:
    """Chain-level Bockstein of C expressed in given cocycle bases (columns)."""
    H = cohomology_mod_p(C, p)
    out = {}
    for j in range(min(C.top, max(basis))):
        cols = []
        for u in basis[j].T:
            w = int_matmul(C.coboundary(j), u % p)
            if (w % p).any():
                raise ValueError(f"basis vector in degree {j} is not a mod-p cocycle")
            cols.append(quotient_coordinates(w // p, list(basis[j + 1].T), H.coboundaries[j + 1]))
        out[j] = np.array(cols, dtype=np.int64).reshape(basis[j].shape[1], basis[j + 1].shape[1]).T % p
    return out


def generator_argument(R: CohomologyRing, m: int) -> dict[str, bool]:
    """Mechanical version of the inductive generator argument for L^{2m-1}.

    Checks that ``z^i`` and ``x z^i`` are nonzero through the top and that
    multiplication by z maps H^{2m-3} onto H^{2m-1}.
    """
    dx, x = R.generator("x")
    dz, z = R.generator("z")
    powers_ok, odd_ok = True, True
    for i in range(m):
        _, zi = R.power(dz, z, i)
        powers_ok &= bool(zi.any())
        odd_ok &= bool(R.product(dx, x, 2 * i, zi).any())
    top = 2 * m - 1
    cols = [R.product(dz, z, top - 2, R.basis_vector(top - 2, k)) for k in range(R.dim(top - 2))]
    rank = FpMatrix(np.array(cols).T, R.p).rank() if cols else 0
    return {
        "z_powers_nonzero": powers_ok,
        "x_z_powers_nonzero": odd_ok,
        "z_cup_onto_top": rank == R.dim(top) and R.dim(top) > 0,
        "x_squared_zero": not R.product(dx, x, dx, x).any(),
        "z_to_the_m_zero": R.power(dz, z, m)[0] > R.top,
    }
