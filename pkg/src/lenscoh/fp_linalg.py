"""Exact linear algebra over the prime field Z_p.

Dense matrices are numpy ``int64`` arrays with entries in ``[0, p)``.
Everything is canonical (reduced row echelon based), so equal inputs give
byte-identical outputs.  Integer (unreduced) matrices use the same dtype and
go through :func:`int_matmul`, which refuses to overflow.

A small sparse eliminator (:class:`SparseSystem`) handles the large but very
sparse systems that appear when lifting diagonals and solving for
differentials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

_INT64_SAFE = 2**62


class NoSolution(ArithmeticError):
    """Raised by :func:`solve` when ``b`` is not in the column space of ``M``."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_odd_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool) or p == 2 or not is_prime(int(p)):
        raise ValueError(f"modulus must be an odd prime, got {p!r}")
    return int(p)


def int_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Integer matrix product with an explicit overflow guard."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.size and B.size:
        bound = int(np.abs(A).max()) * int(np.abs(B).max()) * max(A.shape[-1], 1)
        if bound >= _INT64_SAFE:
            raise OverflowError("integer matrix product may overflow int64")
    return A @ B


class FpMatrix:
    """Immutable dense matrix over Z_p."""

    __slots__ = ("p", "_a")

    def __init__(self, entries, p: int):
        self.p = check_odd_prime(p)
        a = np.array(entries, dtype=np.int64, copy=True)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError("FpMatrix entries must be two-dimensional")
        a %= self.p
        a.setflags(write=False)
        self._a = a

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FpMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls(np.eye(n, dtype=np.int64), p)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    def _same_field(self, other: "FpMatrix") -> None:
        if other.p != self.p:
            raise ValueError(f"modulus mismatch: {self.p} vs {other.p}")

    def __matmul__(self, other):
        if isinstance(other, FpMatrix):
            self._same_field(other)
            return FpMatrix(self._a @ other._a, self.p)
        v = np.asarray(other, dtype=np.int64) % self.p
        return (self._a @ v) % self.p

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._same_field(other)
        return FpMatrix(self._a + other._a, self.p)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        self._same_field(other)
        return FpMatrix(self._a - other._a, self.p)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpMatrix)
            and other.p == self.p
            and other.shape == self.shape
            and bool(np.array_equal(other._a, self._a))
        )

    def __hash__(self):
        return hash((self.p, self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self._a.tolist()})"

    @property
    def T(self) -> "FpMatrix":
        return FpMatrix(self._a.T, self.p)

    def rank(self) -> int:
        return rref(self)[2]


def _rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    R = a.copy() % p
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        inv = pow(int(R[r, c]), -1, p)
        R[r] = (R[r] * inv) % p
        col = R[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            R[hit] = (R[hit] - np.outer(col[hit], R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rref(M: FpMatrix) -> tuple[FpMatrix, list[int], int]:
    """Reduced row echelon form; returns ``(R, pivots, rank)``."""
    R, pivots = _rref_array(M.array, M.p)
    return FpMatrix(R, M.p), pivots, len(pivots)


@dataclass(frozen=True)
class Subspace:
    """Subspace of Z_p^ambient_dim, stored by its canonical rref basis (rows)."""

    p: int
    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.int64)
        b = np.zeros((0, self.ambient_dim), dtype=np.int64) if b.size == 0 else b.reshape(-1, self.ambient_dim)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def span(cls, vectors, ambient_dim: int, p: int) -> "Subspace":
        a = np.asarray(vectors, dtype=np.int64)
        if a.size == 0:
            return cls.zero(ambient_dim, p)
        a = a.reshape(-1, ambient_dim) % p
        R, piv = _rref_array(a, p)
        return cls(p, ambient_dim, R[: len(piv)])

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(p, ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64))

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(p, ambient_dim, np.eye(ambient_dim, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def vectors(self) -> list[np.ndarray]:
        return [row.copy() for row in self.basis]

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64).reshape(1, self.ambient_dim) % self.p
        return Subspace.span(np.vstack([self.basis, v]), self.ambient_dim, self.p).dim == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        joined = Subspace.span(np.vstack([self.basis, other.basis]), self.ambient_dim, self.p)
        return joined.dim == self.dim

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(np.vstack([self.basis, other.basis]), self.ambient_dim, self.p)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and (self.p, self.ambient_dim) == (other.p, other.ambient_dim)
            and self.basis.shape == other.basis.shape
            and bool(np.array_equal(self.basis, other.basis))
        )

    def __hash__(self):
        return hash((self.p, self.ambient_dim, self.basis.tobytes()))


def kernel_basis(M: FpMatrix) -> Subspace:
    """Canonical basis of ``{v : M v = 0}``."""
    p, cols = M.p, M.cols
    R, pivots = _rref_array(M.array, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    vecs = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = (-R[r, f]) % p
        vecs.append(v)
    return Subspace.span(np.array(vecs, dtype=np.int64).reshape(-1, cols), cols, p)


def image_basis(M: FpMatrix) -> Subspace:
    """Column space of ``M`` as a subspace of Z_p^rows."""
    return Subspace.span(M.array.T, M.rows, M.p)


def solve(M: FpMatrix, b) -> np.ndarray:
    """Some ``v`` with ``M v = b``; free variables are set to zero.

    Raises :class:`NoSolution` if ``b`` is not in the image of ``M``.
    """
    p = M.p
    b = np.asarray(b, dtype=np.int64).reshape(-1) % p
    if b.shape[0] != M.rows:
        raise ValueError(f"rhs has length {b.shape[0]}, expected {M.rows}")
    aug = np.hstack([M.array, b.reshape(-1, 1)])
    R, pivots = _rref_array(aug, p)
    if pivots and pivots[-1] == M.cols:
        raise NoSolution("right-hand side is not in the column space")
    v = np.zeros(M.cols, dtype=np.int64)
    for r, c in enumerate(pivots):
        v[c] = R[r, -1]
    return v


def quotient_representatives(V: Subspace, W: Subspace) -> list[np.ndarray]:
    """Vectors of ``V`` whose classes form a basis of ``V / W``."""
    if (V.p, V.ambient_dim) != (W.p, W.ambient_dim):
        raise ValueError("subspaces live in different ambient spaces")
    if not V.contains_subspace(W):
        raise ValueError("W is not contained in V")
    reps = []
    current = W
    for v in V.basis:
        if not current.contains(v):
            reps.append(v.copy())
            current = current + Subspace.span(v, V.ambient_dim, V.p)
    return reps


def quotient_coordinates(v, reps: Sequence[np.ndarray], W: Subspace) -> np.ndarray:
    """Coordinates of the class of ``v`` in ``V/W`` relative to ``reps``.

    ``v`` must lie in ``span(reps) + W``.
    """
    p, n = W.p, W.ambient_dim
    cols = [np.asarray(r, dtype=np.int64) for r in reps] + list(W.basis)
    if not cols:
        if np.any(np.asarray(v) % p):
            raise NoSolution("vector is not in span(reps) + W")
        return np.zeros(0, dtype=np.int64)
    A = FpMatrix(np.array(cols).reshape(-1, n).T, p)
    x = solve(A, v)
    return x[: len(reps)]


def random_matrix(rng: np.random.Generator, rows: int, cols: int, p: int) -> FpMatrix:
    return FpMatrix(rng.integers(0, p, size=(rows, cols)), p)


class SparseSystem:
    """Incremental sparse Gaussian elimination over Z_p.

    Rows are ``{column: coefficient}`` dicts with a right-hand side.  Each
    stored pivot row is keyed by its smallest column.  With ``track=True``
    every reduced row remembers which input rows produced it, so that an
    inconsistency comes with a certificate (a combination of input rows that
    reads ``0 = nonzero``).
    """

    def __init__(self, ncols: int, p: int, track: bool = False):
        self.p = check_odd_prime(p)
        self.ncols = ncols
        self.track = track
        self.pivots: dict[int, tuple[dict[int, int], int, dict[int, int]]] = {}
        self.inconsistency: dict[int, int] | None = None
        self.nrows = 0

    def add_row(self, row: dict[int, int], rhs: int = 0) -> None:
        p = self.p
        row = {c: v % p for c, v in row.items() if v % p}
        rhs %= p
        combo = {self.nrows: 1} if self.track else {}
        self.nrows += 1
        while row:
            c = min(row)
            if c not in self.pivots:
                inv = pow(row[c], -1, p)
                row = {k: (v * inv) % p for k, v in row.items()}
                rhs = (rhs * inv) % p
                if self.track:
                    combo = {k: (v * inv) % p for k, v in combo.items()}
                self.pivots[c] = (row, rhs, combo)
                return
            prow, prhs, pcombo = self.pivots[c]
            f = row[c]
            for k, v in prow.items():
                nv = (row.get(k, 0) - f * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            rhs = (rhs - f * prhs) % p
            if self.track:
                for k, v in pcombo.items():
                    nv = (combo.get(k, 0) - f * v) % p
                    if nv:
                        combo[k] = nv
                    else:
                        combo.pop(k, None)
        if rhs and self.inconsistency is None:
            # 0 = rhs: normalise the certificate so the combination reads 0 = 1
            inv = pow(rhs, -1, p)
            self.inconsistency = {k: (v * inv) % p for k, v in combo.items()}

    @property
    def consistent(self) -> bool:
        return self.inconsistency is None

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def free_columns(self) -> list[int]:
        return [c for c in range(self.ncols) if c not in self.pivots]

    def _back_substitute(self, free_values: dict[int, int], homogeneous: bool) -> np.ndarray:
        p = self.p
        x = np.zeros(self.ncols, dtype=np.int64)
        for c, v in free_values.items():
            x[c] = v % p
        for c in sorted(self.pivots, reverse=True):
            prow, prhs, _ = self.pivots[c]
            acc = 0 if homogeneous else prhs
            for k, v in prow.items():
                if k != c:
                    acc -= v * int(x[k])
            x[c] = acc % p
        return x

    def solution(self) -> np.ndarray:
        """Particular solution with every free column set to zero."""
        if not self.consistent:
            raise NoSolution("inconsistent sparse system")
        return self._back_substitute({}, homogeneous=False)

    def nullspace(self) -> list[np.ndarray]:
        """Basis of the homogeneous solution space, one vector per free column."""
        return [self._back_substitute({f: 1}, homogeneous=True) for f in self.free_columns()]


def sparse_solve(rows: Iterable[tuple[dict[int, int], int]], ncols: int, p: int) -> np.ndarray:
    system = SparseSystem(ncols, p)
    for row, rhs in rows:
        system.add_row(row, rhs)
    return system.solution()
