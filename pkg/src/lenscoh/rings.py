"""Graded-commutative ring presentations and certificate-producing matching.

A presentation is a list of generators (name, degree, exterior flag, weight)
and relations.  Relation coefficients are integers or a single symbolic
constant per term, so the theorem's families (with A_h, B_hh', ...) can be
written down before their constants are known.

Normal forms use leading-term rewriting under the order
(degree, weight, reverse lexicographic from the last generator).  Confluence
is checked on all critical pairs up to the top degree; a failure names the
pair.  :func:`quotient_dims` gives the same dimensions by plain linear
algebra and works for any relation set.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

import numpy as np

from .fp_linalg import FpMatrix, NoSolution, Subspace, SparseSystem, check_odd_prime, solve

Monomial = tuple[int, ...]


class NonConfluentError(ValueError):
    """Rewriting left a critical pair unresolved."""


class SearchSpaceTooLarge(RuntimeError):
    """The matcher exceeded its node budget."""


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    exterior: bool = False
    weight: int = 0

    @property
    def odd(self) -> bool:
        return self.exterior or self.degree % 2 == 1


@dataclass(frozen=True)
class Term:
    coef: int
    symbol: str | None
    mono: Monomial


@dataclass(frozen=True)
class RingPresentation:
    p: int
    generators: tuple[Generator, ...]
    relations: tuple[tuple[Term, ...], ...]
    top: int
    constants: tuple[str, ...] = ()
    bockstein: tuple[tuple[str, str | None], ...] = ()
    name: str = ""

    def __post_init__(self):
        check_odd_prime(self.p)
        for rel in self.relations:
            degs = {self.degree(t.mono) for t in rel}
            if len(degs) > 1:
                raise ValueError(f"relation {self.format_relation(rel)} is not homogeneous")
            for t in rel:
                if t.symbol is not None and t.symbol not in self.constants:
                    raise ValueError(f"unknown constant {t.symbol}")

    # -- basic data -----------------------------------------------------------

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def degree(self, mono: Monomial) -> int:
        return sum(e * g.degree for e, g in zip(mono, self.generators))

    def relation_degree(self, rel) -> int:
        return self.degree(rel[0].mono) if rel else 0

    def format_monomial(self, mono: Monomial) -> str:
        parts = [g.name + (f"^{e}" if e > 1 else "") for g, e in zip(self.generators, mono) if e]
        return "*".join(parts) or "1"

    def format_relation(self, rel) -> str:
        out = []
        for t in rel:
            c = f"{t.coef}" if t.symbol is None else (f"{t.symbol}" if t.coef == 1 else f"{t.coef}*{t.symbol}")
            out.append(f"{c}*{self.format_monomial(t.mono)}")
        return " + ".join(out) or "0"

    def instantiate(self, assignment: Mapping[str, int] | None = None) -> list[dict[Monomial, int]]:
        """Relations as concrete polynomials for a constant assignment."""
        assignment = assignment or {}
        missing = [c for c in self.constants if c not in assignment]
        if missing:
            raise KeyError(f"no value for constants {missing}")
        polys = []
        for rel in self.relations:
            poly: dict[Monomial, int] = {}
            for t in rel:
                if any(g.odd and e > 1 for g, e in zip(self.generators, t.mono)):
                    continue  # an odd generator squares to zero already
                c = t.coef * (assignment[t.symbol] if t.symbol else 1)
                poly[t.mono] = (poly.get(t.mono, 0) + c) % self.p
            polys.append({m: c for m, c in poly.items() if c})
        return polys

    def with_constants(self, assignment: Mapping[str, int]) -> "RingPresentation":
        rels = tuple(
            tuple(Term(c, None, m) for m, c in sorted(poly.items())) for poly in self.instantiate(assignment)
        )
        rels = tuple(r for r in rels if r)
        return RingPresentation(self.p, self.generators, rels, self.top, (), self.bockstein, self.name)

    # -- serialisation --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "p": self.p,
            "top": self.top,
            "generators": [[g.name, g.degree, g.exterior, g.weight] for g in self.generators],
            "constants": list(self.constants),
            "relations": [[[t.coef, t.symbol, list(t.mono)] for t in rel] for rel in self.relations],
            "bockstein": [[a, b] for a, b in self.bockstein],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RingPresentation":
        gens = tuple(Generator(n, d, bool(e), int(w)) for n, d, e, w in doc["generators"])
        rels = tuple(tuple(Term(int(c), s, tuple(m)) for c, s, m in rel) for rel in doc["relations"])
        return cls(
            int(doc["p"]),
            gens,
            rels,
            int(doc["top"]),
            tuple(doc.get("constants", ())),
            tuple((a, b) for a, b in doc.get("bockstein", ())),
            doc.get("name", ""),
        )

    def to_text(self) -> str:
        lines = []
        for g in self.generators:
            extra = (" exterior" if g.exterior else "") + (f" weight {g.weight}" if g.weight else "")
            lines.append(f"gen {g.name} {g.degree}{extra};")
        for c in self.constants:
            lines.append(f"const {c};")
        for rel in self.relations:
            lines.append(f"rel {_format_text_poly(self, rel)};")
        for a, b in self.bockstein:
            lines.append(f"bockstein {a} -> {b if b is not None else 0};")
        return "\n".join(lines)

    # -- algebra --------------------------------------------------------------

    def mono_mul(self, m1: Monomial, m2: Monomial) -> tuple[int, Monomial]:
        """``m1 * m2`` as ``(sign, monomial)``; sign 0 means the product vanishes."""
        sign = 1
        odd_seen = 0
        for k in range(len(self.generators) - 1, -1, -1):
            if self.generators[k].odd:
                if m1[k] and m2[k]:
                    return 0, m1
                if m2[k] and odd_seen % 2:
                    sign = -sign
                odd_seen += m1[k]
        return sign, tuple(a + b for a, b in zip(m1, m2))

    def order_key(self, mono: Monomial):
        w = sum(e * g.weight for e, g in zip(mono, self.generators))
        return (self.degree(mono), w, tuple(reversed(mono)))

    def monomials(self, d: int) -> list[Monomial]:
        """All monomials of degree d in the free graded-commutative algebra."""
        gens = self.generators
        out: list[Monomial] = []

        def rec(k: int, remaining: int, acc: list[int]):
            if k == len(gens):
                if remaining == 0:
                    out.append(tuple(acc))
                return
            g = gens[k]
            emax = 1 if g.odd else (remaining // g.degree if g.degree else 0)
            for e in range(emax + 1):
                if e * g.degree > remaining:
                    break
                acc.append(e)
                rec(k + 1, remaining - e * g.degree, acc)
                acc.pop()

        rec(0, d, [])
        return sorted(out, key=self.order_key)


def _format_text_poly(P: RingPresentation, rel) -> str:
    pieces = []
    for t in rel:
        c = t.coef
        sign = "-" if c < 0 else "+"
        factors = [] if abs(c) == 1 else [str(abs(c))]
        if t.symbol:
            factors.append(t.symbol)
        mono = P.format_monomial(t.mono)
        if mono != "1" or not factors:
            factors.append(mono)
        pieces.append(f"{sign} {'*'.join(factors)}")
    s = " ".join(pieces)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*|\d+|[-+*^])")


def parse_presentation(text: str, p: int, top: int, name: str = "") -> RingPresentation:
    """Parse ``gen x 1 exterior; gen z 2; const A; rel x^2; rel z^3 - A*x*z;``.

    Statements: ``gen NAME DEGREE [exterior] [weight W]``, ``const NAME``,
    ``rel POLYNOMIAL`` and ``bockstein NAME -> NAME|0``.  A polynomial is a sum
    of terms ``[INT*][CONST*]factor*factor...`` with factors ``NAME[^INT]``.
    """
    gens: list[Generator] = []
    consts: list[str] = []
    raw_rels: list[str] = []
    bock: list[tuple[str, str | None]] = []
    for stmt in (s.strip() for s in text.split(";")):
        if not stmt:
            continue
        words = stmt.split()
        head = words[0]
        if head == "gen":
            if len(words) < 3:
                raise ValueError(f"bad generator declaration: {stmt!r}")
            exterior = "exterior" in words[3:]
            weight = int(words[words.index("weight") + 1]) if "weight" in words else 0
            gens.append(Generator(words[1], int(words[2]), exterior, weight))
        elif head == "const":
            consts.extend(words[1:])
        elif head == "rel":
            raw_rels.append(stmt[3:].strip())
        elif head == "bockstein":
            m = re.fullmatch(r"bockstein\s+(\S+)\s*->\s*(\S+)", stmt)
            if not m:
                raise ValueError(f"bad bockstein statement: {stmt!r}")
            bock.append((m.group(1), None if m.group(2) == "0" else m.group(2)))
        else:
            raise ValueError(f"unknown statement {head!r}")
    names = [g.name for g in gens]
    rels = tuple(_parse_poly(r, names, consts) for r in raw_rels)
    return RingPresentation(check_odd_prime(p), tuple(gens), rels, top, tuple(consts), tuple(bock), name)


def _parse_poly(src: str, names: list[str], consts: list[str]) -> tuple[Term, ...]:
    pos, tokens = 0, []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ValueError(f"cannot parse {src[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
        while pos < len(src) and src[pos].isspace():
            pos += 1
    terms: list[Term] = []
    i = 0
    while i < len(tokens):
        sign = 1
        while i < len(tokens) and tokens[i] in "+-":
            sign = -sign if tokens[i] == "-" else sign
            i += 1
        coef, symbol = sign, None
        mono = [0] * len(names)
        while True:
            if i >= len(tokens):
                raise ValueError(f"dangling operator in {src!r}")
            tok = tokens[i]
            i += 1
            if tok.isdigit():
                coef *= int(tok)
            elif tok in consts:
                if symbol is not None:
                    raise ValueError("at most one constant per term")
                symbol = tok
            elif tok in names:
                e = 1
                if i < len(tokens) and tokens[i] == "^":
                    e = int(tokens[i + 1])
                    i += 2
                mono[names.index(tok)] += e
            else:
                raise ValueError(f"unknown symbol {tok!r} in {src!r}")
            if i < len(tokens) and tokens[i] == "*":
                i += 1
                continue
            break
        terms.append(Term(coef, symbol, tuple(mono)))
    return tuple(terms)


# ---------------------------------------------------------------------------
# rewriting


@dataclass
class _Rule:
    lead: Monomial
    tail: dict[Monomial, int]  # lead == tail (already divided by the leading coefficient)
    source: int


class Rewriter:
    """Leading-term rewriting for a concrete (constant-free) presentation."""

    def __init__(self, P: RingPresentation, assignment: Mapping[str, int] | None = None):
        self.P = P
        self.p = P.p
        self.rules: list[_Rule] = []
        for k, poly in enumerate(P.instantiate(assignment)):
            self._add_rule(self._normal_form_step(poly), k)

    def _add_rule(self, poly: dict[Monomial, int], source: int) -> None:
        poly = {m: c for m, c in poly.items() if c % self.p}
        if not poly:
            return
        lead = max(poly, key=self.P.order_key)
        inv = pow(poly[lead], -1, self.p)
        tail = {m: (-c * inv) % self.p for m, c in poly.items() if m != lead}
        self.rules.append(_Rule(lead, tail, source))

    def _normal_form_step(self, poly):
        return {m: c % self.p for m, c in poly.items() if c % self.p}

    def _divides(self, a: Monomial, b: Monomial) -> bool:
        return all(x <= y for x, y in zip(a, b))

    def _mul_poly_mono(self, poly, q: Monomial, left: bool) -> dict[Monomial, int]:
        out: dict[Monomial, int] = {}
        for m, c in poly.items():
            s, r = self.P.mono_mul(q, m) if left else self.P.mono_mul(m, q)
            if s:
                out[r] = (out.get(r, 0) + s * c) % self.p
        return {m: c for m, c in out.items() if c}

    def normal_form(self, poly: Mapping[Monomial, int]) -> dict[Monomial, int]:
        P, p = self.P, self.p
        poly = {m: c % p for m, c in poly.items() if c % p}
        done: dict[Monomial, int] = {}
        while poly:
            m = max(poly, key=P.order_key)
            c = poly.pop(m)
            rule = next((r for r in self.rules if self._divides(r.lead, m)), None)
            if rule is None:
                done[m] = c
                continue
            q = tuple(a - b for a, b in zip(m, rule.lead))
            s, prod = P.mono_mul(rule.lead, q)
            if not s:
                # lead * q vanishes by exterior signs, so m itself is zero here
                continue
            repl = self._mul_poly_mono(rule.tail, q, left=False)
            for mm, cc in repl.items():
                v = (poly.get(mm, 0) + s * c * cc) % p
                if v:
                    poly[mm] = v
                else:
                    poly.pop(mm, None)
        return done

    def critical_pairs(self, top: int) -> Iterator[tuple[str, dict[Monomial, int]]]:
        """Yield (description, residue) for every critical pair up to ``top``."""
        P = self.P
        for r1, r2 in itertools.combinations(self.rules, 2):
            lcm = tuple(max(a, b) for a, b in zip(r1.lead, r2.lead))
            if P.degree(lcm) > top:
                continue
            q1 = tuple(a - b for a, b in zip(lcm, r1.lead))
            q2 = tuple(a - b for a, b in zip(lcm, r2.lead))
            s1, _ = P.mono_mul(r1.lead, q1)
            s2, _ = P.mono_mul(r2.lead, q2)
            if not s1 or not s2:
                continue
            f1 = {m: s1 * c for m, c in self._mul_poly_mono(r1.tail, q1, left=False).items()}
            f2 = {m: s2 * c for m, c in self._mul_poly_mono(r2.tail, q2, left=False).items()}
            diff = dict(f1)
            for m, c in f2.items():
                diff[m] = diff.get(m, 0) - c
            desc = f"({P.format_monomial(r1.lead)}, {P.format_monomial(r2.lead)}) at {P.format_monomial(lcm)}"
            yield desc, self.normal_form(diff)
        for r in self.rules:
            for k, g in enumerate(P.generators):
                if g.odd and r.lead[k] and P.degree(r.lead) + g.degree <= top:
                    q = tuple(1 if i == k else 0 for i in range(len(P.generators)))
                    desc = f"{g.name} * ({P.format_monomial(r.lead)}) with {g.name}^2 = 0"
                    yield desc, self.normal_form(self._mul_poly_mono(r.tail, q, left=True))

    def check_confluent(self, top: int) -> None:
        for desc, residue in self.critical_pairs(top):
            if residue:
                shown = " + ".join(f"{c}*{self.P.format_monomial(m)}" for m, c in sorted(residue.items()))
                raise NonConfluentError(f"critical pair {desc} leaves {shown}")

    def standard_monomials(self, d: int) -> list[Monomial]:
        return [m for m in self.P.monomials(d) if not any(self._divides(r.lead, m) for r in self.rules)]


def monomial_basis(P: RingPresentation, d: int, assignment: Mapping[str, int] | None = None) -> list[str]:
    """Normal-form monomials spanning degree d of the quotient algebra."""
    if d > P.top:
        raise ValueError(f"degree {d} above the presentation's top degree {P.top}")
    rw = Rewriter(P, _default_assignment(P, assignment))
    rw.check_confluent(P.top)
    return [P.format_monomial(m) for m in rw.standard_monomials(d)]


def poincare_series(P: RingPresentation, D: int | None = None, assignment=None) -> list[int]:
    D = P.top if D is None else D
    rw = Rewriter(P, _default_assignment(P, assignment))
    rw.check_confluent(D)
    return [len(rw.standard_monomials(d)) for d in range(D + 1)]


def _default_assignment(P: RingPresentation, assignment):
    if assignment is None and P.constants:
        return {c: 0 for c in P.constants}
    return assignment


def quotient_dims(P: RingPresentation, D: int | None = None, assignment=None) -> list[int]:
    """Dimensions of the quotient by direct linear algebra (no rewriting)."""
    D = P.top if D is None else D
    polys = P.instantiate(_default_assignment(P, assignment))
    dims = []
    for d in range(D + 1):
        monos = P.monomials(d)
        index = {m: k for k, m in enumerate(monos)}
        system = SparseSystem(len(monos), P.p)
        for poly in polys:
            if not poly:
                continue
            e = P.degree(next(iter(poly)))
            if e > d:
                continue
            for q in P.monomials(d - e):
                row: dict[int, int] = {}
                for m, c in poly.items():
                    s, r = P.mono_mul(q, m)
                    if s:
                        row[index[r]] = row.get(index[r], 0) + s * c
                system.add_row(row)
        dims.append(len(monos) - system.rank)
    return dims


# ---------------------------------------------------------------------------
# the theorem's families


def case_ii_family(p: int, m: int, top: int | None = None, bockstein_x: str | None = "") -> RingPresentation:
    """``Z_p[x, z] / <x^2, z^m>`` with deg x = 1, deg z = 2.

    ``bockstein_x`` records the expected Bockstein of x: "z" for L(p), None
    for zero (orbit spaces L(p^2)); the empty string attaches no hint.
    """
    top = 2 * m - 1 if top is None else top
    text = f"gen x 1; gen z 2; rel x^2; rel z^{m};"
    P = parse_presentation(text, p, top, name=f"case (ii), m={m}")
    hint = () if bockstein_x == "" else (("x", bockstein_x),)
    return RingPresentation(P.p, P.generators, P.relations, top, (), hint, P.name)


def case_i_family(p: int, n: int, top: int | None = None) -> RingPresentation:
    """The graded family ``Z_p[x, y, z, u_1, u_3, ..., u_{2p-3}] / I`` with symbolic constants."""
    p = check_odd_prime(p)
    top = 2 * n * p - 1 if top is None else top
    hs = list(range(1, 2 * p - 2, 2))
    lines = ["gen x 1", "gen y 2", f"gen z {2 * p}"] + [f"gen u{h} {h} weight 1" for h in hs]
    consts: list[str] = []
    rels = ["x^2", f"y^{p}", f"z^{n}"]
    for h in hs:
        consts.append(f"A{h}")
        rels.append(f"u{h}*y - A{h}*x*y^{(h + 1) // 2}")
    for h, h2 in itertools.combinations_with_replacement(hs, 2):
        s = h + h2
        if s == 2 * p:
            rels.append(f"u{h}*u{h2}")
        elif h == h2:
            rels.append(f"u{h}*u{h2}")
        elif s < 2 * p:
            b, c = f"B{h}_{h2}", f"C{h}_{h2}"
            consts += [b, c]
            rels.append(f"u{h}*u{h2} - {b}*x*u{s - 1} - {c}*y^{s // 2}")
        else:
            b, c = f"Bp{h}_{h2}", f"Cp{h}_{h2}"
            consts += [b, c]
            rels.append(f"u{h}*u{h2} - {b}*z*x*u{s - 2 * p - 1} - {c}*z*y^{(s - 2 * p) // 2}")
    text = "; ".join(lines + [f"const {c}" for c in consts] + [f"rel {r}" for r in rels]) + ";"
    P = parse_presentation(text, p, top, name=f"case (i), n={n}")
    return RingPresentation(P.p, P.generators, P.relations, top, P.constants, (("x", "y"),), P.name)


def tot_presentation_case_i(p: int, n: int, top: int | None = None) -> RingPresentation:
    """``Z_p[x, y, z, w_h] / <x^2, y^p, z^n, w_h w_h', w_h y>``."""
    hs = list(range(1, 2 * p - 2, 2))
    lines = ["gen x 1", "gen y 2", f"gen z {2 * p}"] + [f"gen w{h} {h} weight 1" for h in hs]
    rels = ["x^2", f"y^{p}", f"z^{n}"] + [f"w{h}*y" for h in hs]
    rels += [f"w{h}*w{h2}" for h, h2 in itertools.combinations_with_replacement(hs, 2)]
    text = "; ".join(lines + [f"rel {r}" for r in rels]) + ";"
    return parse_presentation(text, p, 2 * n * p - 1 if top is None else top, name=f"Tot E_inf case (i), n={n}")


@dataclass(frozen=True)
class ConstantAssignment:
    values: dict[str, int]

    def respects_forced_vanishing(self) -> bool:
        """Constants with h = h' must vanish (the family never introduces them)."""
        for k, v in self.values.items():
            m = re.fullmatch(r"(?:B|C|Bp|Cp)(\d+)_(\d+)", k)
            if m and m.group(1) == m.group(2) and v:
                return False
        return True


# ---------------------------------------------------------------------------
# matching against computed rings


@dataclass(frozen=True)
class Certificate:
    generators: dict[str, tuple[int, tuple[int, ...]]]
    constants: dict[str, int]
    level: int
    unchecked_relations: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "generators": {k: [d, list(v)] for k, (d, v) in sorted(self.generators.items())},
            "constants": dict(sorted(self.constants.items())),
            "level": self.level,
            "unchecked_relations": list(self.unchecked_relations),
        }


def evaluate_monomial(R, P: RingPresentation, mono: Monomial, images: Mapping[str, tuple[int, np.ndarray]]):
    deg, acc = 0, R.unit()
    for g, e in zip(P.generators, mono):
        if not e:
            continue
        d, v = images[g.name]
        for _ in range(e):
            if deg + d > R.top:
                return None
            acc = R.product(deg, acc, d, v)
            deg += d
    return deg, acc


def _relation_parts(R, P, rel, images):
    """Relation value as ``base + sum_c c * part[c]`` in R, or None if above top."""
    deg = P.relation_degree(rel)
    if deg > R.top:
        return None
    base = R.zero(deg)
    parts: dict[str, np.ndarray] = {}
    for t in rel:
        ev = evaluate_monomial(R, P, t.mono, images)
        val = R.zero(deg) if ev is None else ev[1]
        if t.symbol is None:
            base = (base + t.coef * val) % R.p
        else:
            parts[t.symbol] = (parts.get(t.symbol, R.zero(deg)) + t.coef * val) % R.p
    return base, parts


def _solve_constants(R, base, parts) -> list[dict[str, int]] | None:
    names = sorted(parts)
    p = R.p
    if not names:
        return [{}] if not base.any() else None
    A = FpMatrix(np.array([parts[c] for c in names]).reshape(len(names), -1).T, p)
    try:
        x0 = solve(A, (-base) % p) if A.rows else np.zeros(len(names), dtype=np.int64)
    except NoSolution:
        return None
    from .fp_linalg import kernel_basis

    K = kernel_basis(A) if A.rows else Subspace.full(len(names), p)
    sols = []
    for coeffs in itertools.product(range(p), repeat=K.dim):
        x = x0.copy()
        for c, v in zip(coeffs, K.basis):
            x = (x + c * v) % p
        sols.append({nm: int(v) for nm, v in zip(names, x)})
    return sols


def _subalgebra_spans(R, images: Mapping[str, tuple[int, np.ndarray]], upto: int) -> list[Subspace]:
    p = R.p
    spans = [Subspace.span(R.unit(), 1, p)]
    for j in range(1, upto + 1):
        vecs = []
        for d, v in images.values():
            if 1 <= d <= j and v.any():
                for w in spans[j - d].basis:
                    vecs.append(R.product(d, v, j - d, w))
        arr = np.array(vecs, dtype=np.int64).reshape(len(vecs), R.dim(j))
        spans.append(Subspace.span(arr, R.dim(j), p))
    return spans


def _candidates(R, d: int, level: int, dec: Subspace | None) -> list[np.ndarray]:
    p, k = R.p, R.dim(d)
    out = []
    if k:
        units = [1] if level == 0 else list(range(1, p))
        for i in range(k):
            for u in units:
                base = np.zeros(k, dtype=np.int64)
                base[i] = u
                if level >= 2 and dec is not None and dec.dim:
                    for coeffs in itertools.product(range(p), repeat=dec.dim):
                        v = base.copy()
                        for c, w in zip(coeffs, dec.basis):
                            v = (v + c * w) % p
                        out.append(v)
                else:
                    out.append(base)
    out.append(np.zeros(k, dtype=np.int64))
    uniq, seen = [], set()
    for v in out:
        key = tuple(int(x) for x in v)
        if key not in seen:
            seen.add(key)
            uniq.append(v)
    return uniq


def match_presentation(R, family: RingPresentation, max_nodes: int = 200_000, max_level: int = 2) -> list[Certificate]:
    """Find generator images and constants presenting R by ``family``.

    A certificate means: every relation of degree <= R.top vanishes on the
    images, the images generate R, and the instantiated family has the same
    dimensions as R in every degree <= R.top (so the induced surjection is an
    isomorphism).  Candidates are searched in levels (0: basis vectors, 1:
    unit multiples, 2: plus decomposable corrections); the certificates of
    the first level that produces any are returned.
    """
    if R.p != family.p:
        raise ValueError("ring and family have different primes")
    order = sorted(range(len(family.generators)), key=lambda k: (family.generators[k].degree, k))
    gens = [family.generators[k] for k in order]
    rel_needs = []
    for rel in family.relations:
        used = {family.generators[k].name for t in rel for k, e in enumerate(t.mono) if e}
        rel_needs.append(used)
    top = R.top
    dims_cache: dict[tuple, list[int]] = {}

    for level in range(max_level + 1):
        found: list[Certificate] = []
        nodes = 0

        def dfs(pos: int, images: dict, consts: dict, checked: set):
            nonlocal nodes
            nodes += 1
            if nodes > max_nodes:
                raise SearchSpaceTooLarge(f"more than {max_nodes} search nodes at level {level}")
            # relations whose generators are all assigned
            pending = [k for k, need in enumerate(rel_needs) if k not in checked and need <= images.keys()]
            if pending:
                k = pending[0]
                parts = _relation_parts(R, family, family.relations[k], images)
                if parts is None:
                    dfs(pos, images, consts, checked | {k})
                    return
                base, sym = parts
                for c, v in consts.items():
                    if c in sym:
                        base = (base + v * sym.pop(c)) % R.p
                sols = _solve_constants(R, base, sym)
                if sols is None:
                    return
                for sol in sols:
                    dfs(pos, images, {**consts, **sol}, checked | {k})
                return
            next_deg = gens[pos].degree if pos < len(gens) else top + 1
            done_deg = min(next_deg - 1, top)
            spans = _subalgebra_spans(R, images, done_deg)
            if any(spans[j].dim != R.dim(j) for j in range(done_deg + 1)):
                return
            if pos == len(gens):
                full = {c: consts.get(c, 0) for c in family.constants}
                key = tuple(sorted(full.items()))
                if key not in dims_cache:
                    dims_cache[key] = quotient_dims(family, top, full)
                if dims_cache[key] != list(R.dims):
                    return
                unchecked = tuple(
                    family.format_relation(rel) for rel in family.relations if family.relation_degree(rel) > top
                )
                found.append(
                    Certificate(
                        {g: (d, tuple(int(x) for x in v)) for g, (d, v) in images.items()},
                        full,
                        level,
                        unchecked,
                    )
                )
                return
            g = gens[pos]
            dec = None
            if level >= 2 and g.degree <= top:
                lower = {k: v for k, v in images.items() if v[0] < g.degree}
                dec = _subalgebra_spans(R, lower, g.degree)[g.degree]
            cands = _candidates(R, g.degree, level, dec) if g.degree <= top else [np.zeros(0, dtype=np.int64)]
            for v in cands:
                dfs(pos + 1, {**images, g.name: (g.degree, v)}, consts, checked)

        dfs(0, {}, {}, set())
        if found:
            return found
    return []


def check_bockstein_relation(R, certificate: Certificate, family: RingPresentation) -> bool:
    """Do the family's Bockstein hints (e.g. beta(x) = y) hold at the certificate?"""
    if R.bockstein is None:
        raise ValueError("ring carries no Bockstein")
    images = {k: (d, np.array(v, dtype=np.int64)) for k, (d, v) in certificate.generators.items()}
    for src, tgt in family.bockstein:
        d, v = images[src]
        bv = R.beta(d, v)
        if tgt is None:
            if bv.any():
                return False
        else:
            dt, w = images[tgt]
            if dt != d + 1 or not np.array_equal(bv % R.p, w % R.p):
                return False
    return True


def presentation_json(P: RingPresentation) -> str:
    return json.dumps(P.to_json(), sort_keys=True)
