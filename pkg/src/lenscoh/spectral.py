"""Symbolic multiplicative spectral sequence for X -> X_G -> B_G.

E_2 = Z_p[s, t]/(s^2) (x) Z_p[a, b]/(a^2, b^m) with s, t, a, b in bidegrees
(1, 0), (2, 0), (0, 1), (0, 2).  Every E_2^{k,l} on the grid k >= 0,
0 <= l <= 2m - 1 is spanned by the single monomial

    e(k, l) = s^(k mod 2) t^(k div 2) a^(l mod 2) b^(l div 2),

so every later page is a set of alive bidegrees, each still represented by
its monomial.  A differential d_r is a scalar lambda(c) per alive source c
whose target c + (r, 1 - r) is alive.  Applying a rule means: fix the listed
scalars, impose the derivation law on every pair of alive classes, and
solve.  Inconsistency is returned as a certificate; unknowns that the law
leaves free inside the reporting window are surfaced, never silently zeroed.

Computations run on an internal column window that is 2m + 2 wider than the
reporting bound, so that every constraint touching a reported bidegree is
present.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .fp_linalg import SparseSystem, check_odd_prime
from .products import CohomologyRing
from .rings import RingPresentation, case_ii_family, quotient_dims, tot_presentation_case_i, _relation_parts, _subalgebra_spans
from .spaces import default_degree_bound

Bidegree = tuple[int, int]

CONSISTENT = "CONSISTENT-AND-VANISHING"
CONTRADICTION = "CONTRADICTION"
SURVIVES = "SURVIVES-TO-INFINITY"
UNDETERMINED = "UNDETERMINED"


@dataclass(frozen=True)
class E2Algebra:
    """The bigraded algebra on s, t, a, b, restricted to columns k <= K."""

    p: int
    m: int
    K: int

    def __post_init__(self):
        check_odd_prime(self.p)
        if self.m < 2:
            raise ValueError(f"m must be > 1, got {self.m}")

    @property
    def rows(self) -> int:
        return 2 * self.m

    def in_grid(self, c: Bidegree) -> bool:
        k, l = c
        return 0 <= k <= self.K and 0 <= l < 2 * self.m

    def grid(self) -> list[Bidegree]:
        return [(k, l) for k in range(self.K + 1) for l in range(2 * self.m)]

    def name(self, c: Bidegree) -> str:
        k, l = c
        parts = []
        for sym, e in (("s", k % 2), ("t", k // 2), ("a", l % 2), ("b", l // 2)):
            if e:
                parts.append(sym if e == 1 else f"{sym}^{e}")
        return "*".join(parts) or "1"

    def parse(self, text: str) -> tuple[int, Bidegree]:
        """``"3*t*a*b^2"`` -> (3, (2, 5)).  Factors may repeat; signs are tracked."""
        coef, c = 1, (0, 0)
        body = text.replace(" ", "")
        if body.startswith("-"):
            coef, body = -1, body[1:]
        for factor in body.split("*"):
            if not factor or factor == "1":
                continue
            if factor.isdigit():
                coef *= int(factor)
                continue
            sym, _, e = factor.partition("^")
            e = int(e) if e else 1
            step = {"s": (1, 0), "t": (2, 0), "a": (0, 1), "b": (0, 2)}.get(sym)
            if step is None:
                raise ValueError(f"unknown symbol {sym!r}")
            for _ in range(e):
                sign = self.product((c[0], c[1]), step, strict=False)
                coef *= sign
                c = (c[0] + step[0], c[1] + step[1])
        return coef % self.p, c

    def product(self, c1: Bidegree, c2: Bidegree, strict: bool = True) -> int:
        """Coefficient of e(c1 + c2) in e(c1) * e(c2): 0 or +-1."""
        (k1, l1), (k2, l2) = c1, c2
        if (k1 % 2 and k2 % 2) or (l1 % 2 and l2 % 2):
            return 0
        if strict and l1 + l2 >= 2 * self.m:
            return 0
        return -1 if (l1 % 2 and k2 % 2) else 1

    def total_dim(self, j: int) -> int:
        return sum(1 for l in range(min(j, 2 * self.m - 1) + 1) if j - l <= self.K)


@dataclass(frozen=True)
class DifferentialRule:
    """Values of d_r on chosen classes: source bidegree -> coefficient of the target monomial."""

    r: int
    values: Mapping[Bidegree, int] = field(default_factory=dict)
    label: str = ""

    @classmethod
    def from_strings(cls, E: E2Algebra, r: int, values: Mapping[str, str | int], label: str = "") -> "DifferentialRule":
        """``{"b": "t*a"}`` style rule; targets must sit in bidegree source + (r, 1 - r)."""
        out: dict[Bidegree, int] = {}
        for src, tgt in values.items():
            c_src, c = E.parse(src)
            if c_src != 1:
                raise ValueError(f"rule source {src!r} must be a bare monomial")
            if isinstance(tgt, int) or str(tgt).strip() == "0":
                if int(tgt) != 0:
                    raise ValueError("integer targets must be 0; give a monomial otherwise")
                out[c] = 0
                continue
            coef, t = E.parse(str(tgt))
            want = (c[0] + r, c[1] - r + 1)
            if t != want:
                raise ValueError(f"d_{r}({src}) must land in bidegree {want}, got {t} for {tgt!r}")
            out[c] = coef
        return cls(r, out, label)


@dataclass
class Page:
    """E_r: alive bidegrees in the internal window plus the scalars of d_r."""

    E: E2Algebra
    r: int
    alive: frozenset[Bidegree]
    D: int
    differential: dict[Bidegree, int] = field(default_factory=dict)

    def delta(self) -> Bidegree:
        return (self.r, 1 - self.r)

    def target(self, c: Bidegree) -> Bidegree:
        return (c[0] + self.r, c[1] - self.r + 1)

    def dim(self, c: Bidegree) -> int:
        return 1 if c in self.alive else 0

    def product(self, c1: Bidegree, c2: Bidegree) -> int:
        w = (c1[0] + c2[0], c1[1] + c2[1])
        if c1 not in self.alive or c2 not in self.alive or w not in self.alive:
            return 0
        return self.E.product(c1, c2)

    def visible(self, c: Bidegree) -> bool:
        return c[0] + c[1] <= self.D

    def dims_table(self, D: int | None = None) -> list[list[int]]:
        """``table[l][k]`` for k + l <= D."""
        D = self.D if D is None else D
        return [[self.dim((k, l)) for k in range(D - l + 1)] for l in range(min(D, self.E.rows - 1) + 1)]

    def total_dims(self, D: int | None = None) -> list[int]:
        D = self.D if D is None else D
        return [sum(self.dim((j - l, l)) for l in range(min(j, self.E.rows - 1) + 1)) for j in range(D + 1)]

    def representatives(self, c: Bidegree) -> list[str]:
        return [self.E.name(c)] if c in self.alive else []

    def nonzero_differentials(self) -> dict[Bidegree, int]:
        return {c: v for c, v in self.differential.items() if v}

    def check_d_squared(self) -> bool:
        d = self.nonzero_differentials()
        return not any(self.target(c) in d for c in d)

    def check_derivation(self) -> list[str]:
        """Violations of d(uv) = d(u)v + (-1)^|u| u d(v) among visible pairs."""
        bad = []
        lam = self.differential
        for c1 in sorted(self.alive):
            for c2 in sorted(self.alive):
                w = (c1[0] + c2[0], c1[1] + c2[1])
                T = self.target(w)
                if T not in self.alive or not self.visible(w):
                    continue
                p = self.E.p
                lhs = self.product(c1, c2) * lam.get(w, 0)
                sign = -1 if (c1[0] + c1[1]) % 2 else 1
                rhs = lam.get(c1, 0) * self.product(self.target(c1), c2) + sign * lam.get(c2, 0) * self.product(
                    c1, self.target(c2)
                )
                if (lhs - rhs) % p:
                    bad.append(f"{self.E.name(c1)} * {self.E.name(c2)}")
        return bad

    def next_alive(self) -> frozenset[Bidegree]:
        d = self.nonzero_differentials()
        hit = {self.target(c) for c in d}
        return frozenset(c for c in self.alive if c not in d and c not in hit)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "dims": self.dims_table(),
            "differential": [
                [self.E.name(c), self.E.name(self.target(c)), v]
                for c, v in sorted(self.nonzero_differentials().items())
                if self.visible(c)
            ],
        }


@dataclass
class ConsistencyReport:
    consistent: bool
    determined: bool
    message: str = ""
    certificate: list[str] = field(default_factory=list)
    free: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "consistent": self.consistent,
            "determined": self.determined,
            "message": self.message,
            "certificate": self.certificate,
            "free": self.free,
        }


def build_e2(p: int, m: int, D: int | None = None) -> Page:
    p = check_odd_prime(p)
    if m < 2:
        raise ValueError(f"m must be > 1, got {m}")
    D = default_degree_bound(m, p) if D is None else D
    if D < 0:
        raise ValueError("degree bound must be nonnegative")
    E = E2Algebra(p, m, D + 2 * m + 2)
    return Page(E, 2, frozenset(E.grid()), D)


E2_GENERATORS = ((1, 0), (2, 0), (0, 1), (0, 2))


def _pairs(page: Page):
    alive = sorted(page.alive)
    if page.r == 2 and len(page.alive) == len(page.E.grid()):
        # E_2 is generated by s, t, a, b: the law on (generator, class) pairs
        # already forces it on all pairs
        for g in E2_GENERATORS:
            for c in alive:
                yield g, c
                yield c, g
        return
    for i, c1 in enumerate(alive):
        for c2 in alive[i:]:
            yield c1, c2


def _leibniz_rows(page: Page, index: dict[Bidegree, int]):
    """Yield (description, row) for every constraint d(uv) = d(u)v +- u d(v)."""
    E = page.E
    for c1, c2 in _pairs(page):
        w = (c1[0] + c2[0], c1[1] + c2[1])
        T = page.target(w)
        if T not in page.alive:
            continue
        row: dict[int, int] = {}
        coef_w = page.product(c1, c2)
        if coef_w and w in index:
            row[index[w]] = row.get(index[w], 0) + coef_w
        if c1 in index:
            row[index[c1]] = row.get(index[c1], 0) - page.product(page.target(c1), c2)
        if c2 in index:
            sign = -1 if (c1[0] + c1[1]) % 2 else 1
            row[index[c2]] = row.get(index[c2], 0) - sign * page.product(c1, page.target(c2))
        row = {k: v % E.p for k, v in row.items() if v % E.p}
        if row:
            yield (c1, c2, w, T), row


def _describe(page: Page, key, lam: np.ndarray | None, index) -> str:
    E, r = page.E, page.r
    c1, c2, w, T = key
    p = E.p

    def val(c):
        return 0 if lam is None or c not in index else int(lam[index[c]])

    rhs = (val(c1) * page.product(page.target(c1), c2)
           + (-1 if (c1[0] + c1[1]) % 2 else 1) * val(c2) * page.product(c1, page.target(c2))) % p
    lhs = (page.product(c1, c2) * val(w)) % p
    left = f"d_{r}[({E.name(c1)})({E.name(c2)})]"
    if page.product(c1, c2) == 0:
        left = f"0 = {left}"
    return f"{left}: derivation gives {rhs}*({E.name(T)}) but the product side gives {lhs}*({E.name(T)}) mod {p}"


def apply_rule(page: Page, rule: DifferentialRule) -> tuple[ConsistencyReport, Page | None]:
    """Extend ``rule`` to d_r by the derivation law and turn the page."""
    if rule.r != page.r:
        raise ValueError(f"rule for d_{rule.r} applied to E_{page.r}")
    E, p = page.E, page.E.p
    unknowns = sorted(c for c in page.alive if page.target(c) in page.alive)
    index = {c: i for i, c in enumerate(unknowns)}
    system = SparseSystem(len(unknowns), p, track=True)
    keys: list = []

    for c, v in sorted(rule.values.items()):
        if c in index:
            system.add_row({index[c]: 1}, v)
            keys.append(("rule", c))
        elif v % p:
            where = E.name(c)
            what = "is zero on this page" if c not in page.alive else f"has its target {E.name(page.target(c))} zero"
            msg = f"d_{page.r}({where}) = {v}*({E.name(page.target(c))}) impossible: {where} {what}"
            return ConsistencyReport(False, False, msg, [msg]), None

    rows = sorted(_leibniz_rows(page, index), key=lambda kr: (sum(kr[0][2]), kr[0][2], kr[0][0]))
    for key, row in rows:
        keys.append(key)
        if system.consistent:
            system.add_row(row)
            if not system.consistent:
                # rebuild the system without this row to evaluate the identity
                prior = SparseSystem(len(unknowns), p)
                for k2, v2 in sorted(rule.values.items()):
                    if k2 in index:
                        prior.add_row({index[k2]: 1}, v2)
                for key2, row2 in rows:
                    if key2 == key:
                        break
                    prior.add_row(row2)
                prev_solution = prior.solution() if prior.consistent else None
                msg = _describe(page, key, prev_solution, index)
                cert = []
                for k, coef in sorted((system.inconsistency or {}).items()):
                    kk = keys[k]
                    if kk[0] == "rule":
                        cert.append(f"{coef} x [rule d_{page.r}({E.name(kk[1])}) = {rule.values[kk[1]]}]")
                    else:
                        cert.append(f"{coef} x [{_describe(page, kk, None, index).split(':')[0]}]")
                return ConsistencyReport(False, False, msg, cert), None

    lam = system.solution()
    free = []
    for vec in system.nullspace():
        support = [unknowns[i] for i in np.nonzero(vec)[0] if page.visible(unknowns[i])]
        free.extend(support)
    free = sorted(set(free))
    differential = {c: int(lam[i]) for i, c in enumerate(unknowns) if lam[i]}
    turned = Page(E, page.r, page.alive, page.D, differential)
    report = ConsistencyReport(
        True,
        not free,
        "" if not free else "derivation law leaves d_%d free on %s" % (page.r, ", ".join(E.name(c) for c in free)),
        [],
        [E.name(c) for c in free],
    )
    nxt = Page(E, page.r + 1, turned.next_alive(), page.D)
    return report, (turned, nxt)


@dataclass
class BranchResult:
    name: str
    p: int
    m: int
    D: int
    classification: str
    pages: list[Page]
    reports: list[tuple[int, ConsistencyReport]]
    final: Page | None
    message: str = ""

    @property
    def e_infinity_dims(self) -> list[int] | None:
        return None if self.final is None else self.final.total_dims()

    def to_json(self) -> dict:
        return {
            "branch": self.name,
            "p": self.p,
            "m": self.m,
            "max_degree": self.D,
            "classification": self.classification,
            "message": self.message,
            "pages": [pg.to_json() for pg in self.pages],
            "reports": [{"r": r, **rep.to_json()} for r, rep in self.reports],
            "e_infinity": None if self.final is None else self.final.dims_table(),
            "total_dims": self.e_infinity_dims,
        }


def branch_rules(p: int, m: int, branch: str) -> dict[int, DifferentialRule]:
    """Rules for the proof's branches.

    ``case2``: d_2(a) = t, d_2(b) = 0.  ``case1``: d_2(a) = 0, d_2(b) = t a and
    d_2p(a b^(p-1)) = t^p.  ``case1-d2p+1``: d_2p trivial on a b^(p-1) and
    d_(2p+1)(b^p) = s t^p.  ``case1-trivial``: both of these vanish.
    """
    d2_case1 = {(0, 1): 0, (0, 2): 1}
    if branch == "case2":
        return {2: DifferentialRule(2, {(0, 1): 1, (0, 2): 0}, "d_2(a) = t, d_2(b) = 0")}
    if branch == "case1":
        return {
            2: DifferentialRule(2, d2_case1, "d_2(a) = 0, d_2(b) = t*a"),
            2 * p: DifferentialRule(2 * p, {(0, 2 * p - 1): 1}, f"d_{2 * p}(a*b^{p - 1}) = t^{p}"),
        }
    if branch == "case1-d2p+1":
        return {
            2: DifferentialRule(2, d2_case1, "d_2(a) = 0, d_2(b) = t*a"),
            2 * p: DifferentialRule(2 * p, {(0, 2 * p - 1): 0}, f"d_{2 * p}(a*b^{p - 1}) = 0"),
            2 * p + 1: DifferentialRule(2 * p + 1, {(0, 2 * p): 1}, f"d_{2 * p + 1}(b^{p}) = s*t^{p}"),
        }
    if branch == "case1-trivial":
        return {
            2: DifferentialRule(2, d2_case1, "d_2(a) = 0, d_2(b) = t*a"),
            2 * p: DifferentialRule(2 * p, {(0, 2 * p - 1): 0}, f"d_{2 * p}(a*b^{p - 1}) = 0"),
            2 * p + 1: DifferentialRule(2 * p + 1, {(0, 2 * p): 0}, f"d_{2 * p + 1}(b^{p}) = 0"),
        }
    raise ValueError(f"unknown branch {branch!r}")


BRANCHES = ("case2", "case1", "case1-d2p+1", "case1-trivial")


def run_rules(p: int, m: int, rules: Mapping[int, DifferentialRule], D: int | None = None, name: str = "") -> BranchResult:
    """Turn pages r = 2, ..., 2m with the given rules (empty rule where none is given)."""
    page = build_e2(p, m, D)
    D = page.D
    pages: list[Page] = []
    reports: list[tuple[int, ConsistencyReport]] = []
    for r in range(2, max([2 * m, *rules]) + 1):
        rule = rules.get(r, DifferentialRule(r, {}))
        report, out = apply_rule(page, rule)
        reports.append((r, report))
        if out is None:
            return BranchResult(name, p, m, D, CONTRADICTION, pages + [page], reports, None, report.message)
        turned, page = out
        pages.append(turned)
        if not report.determined:
            return BranchResult(name, p, m, D, UNDETERMINED, pages, reports, None, report.message)
    final = page
    pages.append(final)
    dims = final.total_dims()
    above = [j for j, d in enumerate(dims) if d and j > 2 * m - 1]
    if above:
        tail = dims[2 * m:]
        periodic = len(tail) >= 4 and all(tail[i] == tail[i - 2] for i in range(2, len(tail)))
        msg = f"E_inf nonzero in total degrees {above[0]}..{above[-1]} above {2 * m - 1}" + (
            " (periodic in t)" if periodic else ""
        )
        return BranchResult(name, p, m, D, SURVIVES, pages, reports, final, msg)
    return BranchResult(name, p, m, D, CONSISTENT, pages, reports, final, "")


def run_branch(p: int, m: int, branch: str, D: int | None = None) -> BranchResult:
    return run_rules(p, m, branch_rules(p, m, branch), D, branch)


def collapse_page(result: BranchResult) -> int | None:
    """Smallest r with E_r = E_inf (all later differentials zero within the window)."""
    if result.final is None:
        return None
    last = 2
    for pg in result.pages:
        if any(pg.visible(c) for c in pg.nonzero_differentials()):
            last = pg.r
    return last + 1


def explore_cases(p: int, m: int, D: int | None = None) -> list[BranchResult]:
    """Run every branch of the proof and classify it."""
    return [run_branch(p, m, b, D) for b in BRANCHES]


def admissible(results: list[BranchResult]) -> list[str]:
    return [r.name for r in results if r.classification == CONSISTENT]


# ---------------------------------------------------------------------------
# Tot E_inf


@dataclass
class TotRing:
    ring: CohomologyRing
    case: str
    generators: dict[str, Bidegree]
    checks: dict[str, bool]
    presentation: RingPresentation

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "generators": {k: list(v) for k, v in sorted(self.generators.items())},
            "checks": dict(sorted(self.checks.items())),
            "presentation": self.presentation.to_text(),
            "ring": self.ring.to_json(),
        }


def _is_stable(page: Page) -> bool:
    E = page.E
    for r in range(page.r, 2 * E.m + 1):
        for c in page.alive:
            t = (c[0] + r, c[1] - r + 1)
            if page.visible(c) and t in page.alive:
                return False
    return True


def tot_ring(final: Page) -> TotRing:
    """The associated graded algebra Tot E_inf with canonical generators."""
    if not _is_stable(final):
        raise ValueError(f"E_{final.r} is not stable: a later differential can still be nonzero")
    E, p, D = final.E, final.E.p, final.D
    basis: list[list[Bidegree]] = []
    for j in range(D + 1):
        basis.append(sorted((c for c in final.alive if c[0] + c[1] == j), key=lambda c: -c[0]))
    labels = tuple(tuple(E.name(c) for c in b) for b in basis)
    pos = {c: (j, k) for j, b in enumerate(basis) for k, c in enumerate(b)}
    mult = {}
    for i in range(D + 1):
        for j in range(D + 1 - i):
            T = np.zeros((len(basis[i]), len(basis[j]), len(basis[i + j])), dtype=np.int64)
            for a, c1 in enumerate(basis[i]):
                for b, c2 in enumerate(basis[j]):
                    w = (c1[0] + c2[0], c1[1] + c2[1])
                    coef = final.product(c1, c2)
                    if coef:
                        T[a, b, pos[w][1]] = coef % p
            mult[(i, j)] = T

    case = "ii" if (0, 2) in final.alive else "i"
    m = E.m
    if case == "ii":
        gens = {"x": (1, 0), "z": (0, 2)}
    else:
        gens = {"x": (1, 0), "y": (2, 0), "z": (0, 2 * p)}
        gens.update({f"w{h}": (0, h) for h in range(1, 2 * p - 2, 2)})
    table = {}
    for name, c in gens.items():
        d = c[0] + c[1]
        vec = np.zeros(len(basis[d]) if d <= D else 0, dtype=np.int64)
        if c in final.alive:
            vec[pos[c][1]] = 1
        table[name] = (d, tuple(int(v) for v in vec))
    R = CohomologyRing(p, D, labels, mult, None, table)

    if case == "ii":
        presentation = case_ii_family(p, m, top=D)
    else:
        presentation = tot_presentation_case_i(p, m // p, top=D)
    images = {k: (d, np.array(v, dtype=np.int64)) for k, (d, v) in table.items()}
    checks: dict[str, bool] = {}
    for rel in presentation.relations:
        parts = _relation_parts(R, presentation, rel, images)
        checks[f"{presentation.format_relation(rel)} = 0"] = parts is None or not parts[0].any()
    spans = _subalgebra_spans(R, images, D)
    checks["generates"] = all(spans[j].dim == R.dim(j) for j in range(D + 1))
    checks["dims match presentation"] = quotient_dims(presentation, D) == list(R.dims)
    if case == "i":
        dx, vx = images["x"]
        for h in range(1, 2 * p - 2, 2):
            dw, vw = images[f"w{h}"]
            checks[f"x*w{h} != 0"] = dx + dw <= D and bool(R.product(dx, vx, dw, vw).any())
    return TotRing(R, case, gens, checks, presentation)


def explore_report(p: int, m: int, D: int | None = None) -> dict:
    results = explore_cases(p, m, D)
    return {
        "p": p,
        "m": m,
        "branches": [r.to_json() for r in results],
        "admissible": admissible(results),
    }
