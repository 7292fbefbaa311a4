"""The mirror algebra R_I on theta functions.

R_I is the free S_I-module on theta functions indexed by the integer points
of the cone over the dual intersection complex, with product

    theta_p1 * theta_p2 = sum_{beta, r} N^beta_{p1,p2,-r} q^beta theta_r,

where N is the three-point invariant <[1]_p1, [1]_p2, [pt]_{-r}>_{0,beta}.
Elements are dicts ``{(beta, contact): Fraction}``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from relqc.errors import DataError, IncompleteTableError, NotNefError, SpanningError
from relqc.invariants import Insertion, InvariantEngine, InvariantKey
from relqc.novikov import NovikovTruncation, q_str
from relqc.pair_geometry import (Beta, ConePoint, DualComplex, PairDescription, build_dual_complex,
                                 lattice_points, log_canonical_degree, nef_classification)
from relqc.rational import SpanTracker, nullspace, parse_rational
from relqc.state_space import StateClass

Contact = tuple[int, ...]
RElement = dict  # (beta, contact) -> Fraction


def structure_key(pair: PairDescription, p1: Contact, p2: Contact, r: Contact, beta: Beta) -> InvariantKey:
    """The invariant <[1]_p1, [1]_p2, [pt]_{-r}>_{0,beta} as a key (first
    basis labels only; see :func:`engine_constant` for the full expansion)."""
    neg = tuple(-x for x in r)
    st = pair.stratum_of(neg)
    lab = next(iter(st.point)) if st is not None and st.point else pair.unit_label
    return InvariantKey.make(0, [Insertion(tuple(p1), pair.unit_label), Insertion(tuple(p2), pair.unit_label),
                                 Insertion(neg, lab)], tuple(beta))


def engine_constant(engine: InvariantEngine, p1: Contact, p2: Contact, r: Contact, beta: Beta) -> Fraction:
    """N^beta_{p1,p2,-r} read from an invariant table through the engine."""
    pair = engine.pair
    a = StateClass.unit(pair, p1)
    b = StateClass.unit(pair, p2)
    c = StateClass.point(pair, tuple(-x for x in r))
    terms = []
    for (sa, la), ca in a.items():
        for (sb, lb), cb in b.items():
            for (sc, lc), cc in c.items():
                key = InvariantKey.make(0, [Insertion(sa, la), Insertion(sb, lb), Insertion(sc, lc)], tuple(beta))
                terms.append((ca * cb * cc, key))
    return engine.evaluate(terms)


def balanced_constant(pair: PairDescription, p1, p2, r, beta) -> bool:
    return tuple(a + b - c for a, b, c in zip(p1, p2, r)) == pair.D_degrees(beta)


# -- structure constants ----------------------------------------------------------

@dataclass
class ConstantsManifest:
    """Completeness declaration: every balanced constant with all contact
    totals <= contact_bound and curve weight <= curve_bound is listed or zero."""

    contact_bound: int
    curve_bound: int
    notes: str = ""

    def covers(self, pair: PairDescription, p1, p2, r, beta) -> bool:
        return (max(sum(p1), sum(p2), sum(r)) <= self.contact_bound
                and pair.weight(beta) <= self.curve_bound)

    def to_json(self) -> dict:
        d = {"contact_bound": self.contact_bound, "curve_bound": self.curve_bound}
        if self.notes:
            d["notes"] = self.notes
        return d


class StructureConstants:
    """N^beta_{p1,p2,-r}, from an invariant engine, an explicit table, or both.

    With both sources every explicit entry is checked against the engine by
    :meth:`cross_check`; lookups prefer the explicit table.
    """

    def __init__(self, pair: PairDescription, engine: InvariantEngine | None = None,
                 values: dict | None = None, manifest: ConstantsManifest | None = None):
        if engine is None and values is None:
            raise DataError("structure constants need an invariant table or a constants table")
        self.pair = pair
        self.engine = engine
        self.values: dict = {}
        self.manifest = manifest
        for k, v in (values or {}).items():
            self.set(*k, v)
        self._memo: dict = {}

    @staticmethod
    def _canon(p1, p2, r, beta):
        p1, p2 = sorted((tuple(p1), tuple(p2)))
        return p1, p2, tuple(r), tuple(beta)

    def set(self, p1, p2, r, beta, value) -> None:
        key = self._canon(p1, p2, r, beta)
        value = Fraction(value)
        if not balanced_constant(self.pair, *key):
            raise DataError(f"unbalanced structure constant N^{list(key[3])}_{list(key[0])},{list(key[1])},-{list(key[2])}")
        if value and log_canonical_degree(self.pair, key[3]) != 0:
            raise DataError(f"nonzero structure constant in class {list(key[3])} with (K_X + D).beta != 0")
        if key in self.values and self.values[key] != value:
            raise DataError(f"conflicting values for N^{list(key[3])}_{list(key[0])},{list(key[1])},-{list(key[2])}")
        self.values[key] = value

    def get(self, p1, p2, r, beta) -> Fraction:
        key = self._canon(p1, p2, r, beta)
        if key in self._memo:
            return self._memo[key]
        v = self._lookup(key)
        self._memo[key] = v
        return v

    def _lookup(self, key) -> Fraction:
        p1, p2, r, beta = key
        if not balanced_constant(self.pair, p1, p2, r, beta):
            return Fraction(0)
        if log_canonical_degree(self.pair, beta) != 0:
            return Fraction(0)
        if key in self.values:
            return self.values[key]
        if self.manifest is not None and self.manifest.covers(self.pair, p1, p2, r, beta):
            return Fraction(0)
        if self.engine is not None:
            return engine_constant(self.engine, p1, p2, r, beta)
        raise IncompleteTableError([structure_key(self.pair, p1, p2, r, beta)])

    def cross_check(self) -> list[tuple]:
        """Explicit entries that disagree with the invariant table."""
        if self.engine is None:
            return []
        bad = []
        for key in sorted(self.values):
            other = engine_constant(self.engine, *key)
            if other != self.values[key]:
                bad.append((key, self.values[key], other))
        return bad

    def vanishing_violations(self) -> list[tuple]:
        """Stored constants in classes with (K_X + D).beta != 0 that are nonzero."""
        out = []
        if self.engine is not None:
            for key, v in self.engine.table.values.items():
                if key.m == 3 and v and log_canonical_degree(self.pair, key.beta) != 0:
                    out.append((key, v))
        return out


def store_constants(constants: StructureConstants, path) -> None:
    with open(path, "w") as fh:
        head = {"manifest": constants.manifest.to_json() if constants.manifest else {}}
        fh.write(json.dumps(head, sort_keys=True) + "\n")
        for (p1, p2, r, beta), v in sorted(constants.values.items()):
            rec = {"p1": list(p1), "p2": list(p2), "r": list(r), "beta": list(beta), "value": str(v)}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_constants(path, pair: PairDescription, engine: InvariantEngine | None = None) -> StructureConstants:
    """Read a JSONL constants file: a manifest line, then one constant per line."""
    path = str(path)
    out = StructureConstants(pair, engine=engine, values={})
    try:
        fh = open(path)
    except OSError as exc:
        raise DataError(f"cannot read constants file: {exc.strerror}", path) from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"invalid JSON: {exc.msg}", path, lineno) from None
            if not isinstance(rec, dict):
                raise DataError("record must be a JSON object", path, lineno)
            try:
                if "manifest" in rec:
                    m = rec["manifest"]
                    if m:
                        out.manifest = ConstantsManifest(int(m["contact_bound"]), int(m["curve_bound"]),
                                                         str(m.get("notes", "")))
                    continue
                cs = [tuple(int(x) for x in rec[k]) for k in ("p1", "p2", "r")]
                beta = tuple(int(x) for x in rec["beta"])
                value = parse_rational(rec["value"])
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                raise DataError(f"malformed record: {exc!r}", path, lineno) from None
            if any(len(c) != pair.n for c in cs) or len(beta) != pair.curve_lattice_rank:
                raise DataError("vector of wrong length", path, lineno)
            try:
                out.set(*cs, beta, value)
            except DataError as exc:
                raise DataError(str(exc), path, lineno) from None
    return out


# -- the algebra --------------------------------------------------------------------

def element_str(x: RElement, cx: DualComplex | None = None) -> str:
    if not x:
        return "0"
    parts = []
    for (beta, r), c in sorted(x.items()):
        name = "theta_" + str(ConePoint(r))
        q = q_str(beta)
        body = name if q == "1" else f"{q}*{name}"
        parts.append(body if c == 1 else f"{c}*{body}")
    return " + ".join(parts)


def element_to_json(x: RElement) -> list[dict]:
    return [{"beta": list(b), "theta": list(r), "coeff": str(c)} for (b, r), c in sorted(x.items())]


def _add_into(out: dict, key, c) -> None:
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class MirrorAlgebra:
    """R_I over a truncation, with theta functions up to ``theta_bound``."""

    def __init__(self, constants: StructureConstants, trunc: NovikovTruncation, theta_bound: int):
        self.constants = constants
        self.pair = constants.pair
        self.trunc = trunc
        self.theta_bound = theta_bound
        self.complex = build_dual_complex(self.pair)
        self.points: list[ConePoint] = lattice_points(self.complex, theta_bound)
        self._products: dict = {}

    def theta(self, p) -> RElement:
        p = tuple(p.contact if isinstance(p, ConePoint) else p)
        if self.complex.point(p) is None:
            raise DataError(f"{list(p)} is not an integer point of the cone")
        return {(self.pair.zero_beta, p): Fraction(1)}

    def theta_product(self, p1, p2) -> RElement:
        p1 = tuple(getattr(p1, "contact", p1))
        p2 = tuple(getattr(p2, "contact", p2))
        ck = tuple(sorted((p1, p2)))
        if ck in self._products:
            return self._products[ck]
        out: dict = {}
        missing = []
        for beta in self.trunc:
            r = tuple(a + b - d for a, b, d in zip(p1, p2, self.pair.D_degrees(beta)))
            if self.complex.point(r) is None:
                continue
            try:
                v = self.constants.get(p1, p2, r, beta)
            except IncompleteTableError as exc:
                missing.extend(exc.keys)
                continue
            if v:
                out[(beta, r)] = v
        if missing:
            raise IncompleteTableError(missing)
        self._products[ck] = out
        return out

    def multiply(self, x: RElement, y: RElement) -> RElement:
        out: dict = {}
        for (b1, r1), c1 in x.items():
            for (b2, r2), c2 in y.items():
                base = self.trunc.add(b1, b2)
                if base is None:
                    continue
                for (b3, r3), c3 in self.theta_product(r1, r2).items():
                    beta = self.trunc.add(base, b3)
                    if beta is not None:
                        _add_into(out, (beta, r3), c1 * c2 * c3)
        return out

    def product_of(self, contacts: Sequence) -> RElement:
        x = {(self.pair.zero_beta, self.pair.zero_contact): Fraction(1)}
        for p in contacts:
            x = self.multiply(x, self.theta(p))
        return x

    def add(self, x: RElement, y: RElement, scale=1) -> RElement:
        out = dict(x)
        for k, c in y.items():
            _add_into(out, k, scale * c)
        return out

    def shift(self, x: RElement, gamma: Beta) -> RElement:
        """q^gamma * x inside the truncation."""
        out = {}
        for (b, r), c in x.items():
            beta = self.trunc.add(b, gamma)
            if beta is not None:
                out[(beta, r)] = c
        return out


def term_multidegree(pair: PairDescription, beta: Beta, r: Contact) -> tuple:
    """Multi-degree of q^beta theta_r: theta functions have deg0 = 0."""
    return (Fraction(pair.log_c1_degree(beta)),
            tuple(d + x for d, x in zip(pair.D_degrees(beta), r)))


def product_homogeneity_defects(alg: MirrorAlgebra, p1, p2) -> list:
    """Terms of theta_p1 * theta_p2 whose multi-degree differs from that of the factors."""
    pair = alg.pair
    expected = (Fraction(0), tuple(a + b for a, b in zip(p1, p2)))
    return [(k, term_multidegree(pair, *k)) for k in alg.theta_product(p1, p2)
            if term_multidegree(pair, *k) != expected]


# -- algebra laws ----------------------------------------------------------------------

@dataclass
class LawResult:
    status: str  # "pass", "fail" or "report-only"
    checked: int = 0
    witness: tuple | None = None
    residual: RElement = field(default_factory=dict)
    failures: int = 0

    def to_json(self) -> dict:
        d = {"status": self.status, "checked": self.checked, "failures": self.failures}
        if self.witness is not None:
            d["witness"] = [list(p) for p in self.witness]
            d["residual"] = element_to_json(self.residual)
        return d


def algebra_laws(alg: MirrorAlgebra, stop_at_first: bool = False) -> dict[str, LawResult]:
    """Unit, commutativity and associativity on all thetas up to the bound.

    Associativity is only asserted under the nef hypothesis; for pairs that
    are neither log CY nor (anti-)nef it is reported but marked report-only.
    """
    pts = [p.contact for p in alg.points]
    zero = alg.pair.zero_contact
    out = {}

    unit = LawResult("pass")
    for p in pts:
        unit.checked += 1
        res = alg.add(alg.multiply(alg.theta(zero), alg.theta(p)), alg.theta(p), -1)
        if res:
            unit.failures += 1
            if unit.witness is None:
                unit.witness, unit.residual = (zero, p), res
    unit.status = "fail" if unit.failures else "pass"
    out["unit"] = unit

    comm = LawResult("pass")
    for p1, p2 in itertools.combinations(pts, 2):
        comm.checked += 1
        t1, t2 = alg.theta(p1), alg.theta(p2)
        res = alg.add(alg.multiply(t1, t2), alg.multiply(t2, t1), -1)
        if res:
            comm.failures += 1
            if comm.witness is None:
                comm.witness, comm.residual = (p1, p2), res
    comm.status = "fail" if comm.failures else "pass"
    out["commutativity"] = comm

    assoc = LawResult("pass")
    for p1, p2, p3 in itertools.product(pts, repeat=3):
        assoc.checked += 1
        t1, t2, t3 = alg.theta(p1), alg.theta(p2), alg.theta(p3)
        res = alg.add(alg.multiply(alg.multiply(t1, t2), t3), alg.multiply(t1, alg.multiply(t2, t3)), -1)
        if res:
            assoc.failures += 1
            if assoc.witness is None:
                assoc.witness, assoc.residual = (p1, p2, p3), res
                if stop_at_first:
                    break
    assoc.status = "fail" if assoc.failures else "pass"
    if nef_classification(alg.pair) == "neither":
        assoc.status = "report-only"
    out["associativity"] = assoc
    return out


# -- Frobenius recursion --------------------------------------------------------------

def _require_nef(pair: PairDescription) -> None:
    cls = nef_classification(pair)
    if cls == "neither":
        raise NotNefError("K_X + D is neither nef nor anti-nef on effective classes; "
                          "associativity of R_I is not established, so the chain recursion is refused")


def frobenius_constant(constants: StructureConstants, points: Sequence, beta: Beta) -> Fraction:
    """N^beta_{p1..pm,0}: the theta_0 coefficient of q^beta in theta_p1 * ... * theta_pm,
    computed by chaining structure constants over all splittings of beta."""
    pair = constants.pair
    points = [tuple(getattr(p, "contact", p)) for p in points]
    beta = tuple(beta)
    if len(points) < 2:
        raise ValueError("need at least two theta functions")
    if tuple(sum(p[i] for p in points) for i in range(pair.n)) != pair.D_degrees(beta):
        return Fraction(0)
    if len(points) == 2:
        return constants.get(points[0], points[1], pair.zero_contact, beta)
    _require_nef(pair)
    trunc = NovikovTruncation.below(pair, beta)
    bound = max(sum(sum(p) for p in points), 0)
    alg = MirrorAlgebra(constants, trunc, bound)
    x = alg.product_of(points[:-1])
    total = Fraction(0)
    last = points[-1]
    for (b1, s), c in x.items():
        rest = tuple(a - b for a, b in zip(beta, b1))
        if rest in trunc:
            total += c * constants.get(s, last, pair.zero_contact, rest)
    return total


def frobenius_order_independence(constants: StructureConstants, points: Sequence, beta: Beta) -> Fraction:
    """Largest difference between chain values over all orderings of the points."""
    points = [tuple(getattr(p, "contact", p)) for p in points]
    values = {frobenius_constant(constants, list(order), beta)
              for order in set(itertools.permutations(points))}
    return max(values) - min(values)


def frobenius_descendant(engine: InvariantEngine, points: Sequence, beta: Beta) -> Fraction:
    """<[pt]_0 psi^(m-2), [1]_p1, ..., [1]_pm>_{0,beta}, the descendant invariant
    the chain recursion is expected to reproduce."""
    pair = engine.pair
    points = [tuple(getattr(p, "contact", p)) for p in points]
    zero = pair.zero_contact
    pt = StateClass.point(pair, zero)
    terms = []
    units = [StateClass.unit(pair, p) for p in points]
    for (s0, l0), c0 in pt.items():
        for combo in itertools.product(*(list(u.items()) for u in units)):
            c = c0
            ins = [Insertion(s0, l0, len(points) - 2)]
            for (s, lab), cc in combo:
                c *= cc
                ins.append(Insertion(s, lab))
            terms.append((c, InvariantKey.make(0, ins, tuple(beta))))
    return engine.evaluate(terms)


# -- presentations ------------------------------------------------------------------------

GENERATOR_NAMES = ("x", "y", "z", "w")


def default_generators(cx: DualComplex) -> list[Contact]:
    """Primitive ray generators, then the minimal interior point of each
    higher-dimensional simplex."""
    out = []
    for sigma in cx.simplices:
        c = [0] * cx.n
        for i in sigma:
            c[i] = 1
        out.append(tuple(c))
    return out


def generator_names(k: int) -> list[str]:
    if k <= len(GENERATOR_NAMES):
        return list(GENERATOR_NAMES[:k])
    return [f"x{i + 1}" for i in range(k)]


@dataclass
class Relation:
    terms: dict  # (exponent tuple, beta) -> Fraction

    def specialize_q0(self, zero_beta) -> "Relation":
        return Relation({k: c for k, c in self.terms.items() if k[1] == zero_beta})

    def format(self, names: Sequence[str]) -> str:
        return format_polynomial(self.terms, names)


def _mono_str(exps, beta, names) -> str:
    parts = []
    q = q_str(beta)
    if q != "1":
        parts.append(q)
    for name, e in zip(names, exps):
        if e:
            parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _term_order(item):
    (exps, beta), _ = item
    return (-sum(exps), tuple(-e for e in exps), sum(beta), beta)


def format_polynomial(terms: dict, names: Sequence[str]) -> str:
    if not terms:
        return "0"
    out = ""
    for i, ((exps, beta), c) in enumerate(sorted(terms.items(), key=_term_order)):
        body = _mono_str(exps, beta, names)
        mag = abs(c)
        if not body:
            txt = str(mag)
        elif mag == 1:
            txt = body
        else:
            txt = f"{mag}*{body}"
        if i == 0:
            out = ("-" if c < 0 else "") + txt
        else:
            out += (" - " if c < 0 else " + ") + txt
    return out


@dataclass
class Presentation:
    generators: list[Contact]
    names: list[str]
    relations: list[Relation]
    degree_bound: int
    generator_degrees: list[int] | None = None
    relation_degrees: list[int | None] | None = None

    def relation_strings(self) -> list[str]:
        return [r.format(self.names) for r in self.relations]

    def specialize_q0(self, zero_beta) -> list[str]:
        return [r.specialize_q0(zero_beta).format(self.names) for r in self.relations]

    def text(self) -> str:
        gens = ", ".join(f"{n} = theta_{ConePoint(g)}" for n, g in zip(self.names, self.generators))
        lines = [f"generators: [{gens}]", f"relations: [{', '.join(self.relation_strings())}]"]
        if self.generator_degrees is not None:
            lines.append(f"generator degrees: {self.generator_degrees}")
            lines.append(f"relation degrees: {self.relation_degrees}")
        return "\n".join(lines)

    def to_json(self, zero_beta) -> dict:
        d = {"generators": [{"name": n, "theta": list(g)} for n, g in zip(self.names, self.generators)],
             "relations": self.relation_strings(),
             "relations_at_q0": self.specialize_q0(zero_beta),
             "relation_terms": [[{"exponents": list(e), "beta": list(b), "coeff": str(c)}
                                 for (e, b), c in sorted(r.terms.items(), key=_term_order)]
                                for r in self.relations],
             "degree_bound": self.degree_bound}
        if self.generator_degrees is not None:
            d["generator_degrees"] = self.generator_degrees
            d["relation_degrees"] = self.relation_degrees
        return d


def _exponents(k: int, max_degree: int, weights: Sequence[int] | None = None, cap: int | None = None):
    """Exponent vectors of total degree <= max_degree (and weighted total <= cap)."""
    out = []
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(k), d):
            e = [0] * k
            for i in combo:
                e[i] += 1
            if cap is not None and sum(w * x for w, x in zip(weights, e)) > cap:
                continue
            out.append(tuple(e))
    return out


def mirror_presentation(alg: MirrorAlgebra, generators: Sequence | None = None, degree_bound: int = 2,
                        grading: Sequence[int] | None = None) -> Presentation:
    """Generators and S_I-linear relations among monomials of degree <= degree_bound.

    Raises SpanningError when some theta function up to the algebra's bound is
    not an S_I-combination of monomials in the generators.
    """
    pair = alg.pair
    gens = [tuple(getattr(g, "contact", g)) for g in (generators or default_generators(alg.complex))]
    for g in gens:
        alg.theta(g)
    k = len(gens)
    names = generator_names(k)
    cache: dict = {(0,) * k: {(pair.zero_beta, pair.zero_contact): Fraction(1)}}

    def expand(e):
        if e in cache:
            return cache[e]
        i = max(j for j, x in enumerate(e) if x)
        prev = tuple(x - (j == i) for j, x in enumerate(e))
        cache[e] = alg.multiply(expand(prev), alg.theta(gens[i]))
        return cache[e]

    # spanning: every theta up to the bound from monomials of weighted degree <= bound
    weights = [sum(g) for g in gens]
    span_monos = _exponents(k, alg.theta_bound, weights, alg.theta_bound)
    tracker = SpanTracker()
    for e in span_monos:
        for gamma in alg.trunc:
            tracker.add(alg.shift(expand(e), gamma))
    unreached = [p for p in alg.points
                 if not tracker.contains({(pair.zero_beta, p.contact): Fraction(1)})]
    if unreached:
        raise SpanningError([str(p) for p in unreached])

    # relations: kernel of (monomial, q^gamma) -> R_I, low degree first
    monos = _exponents(k, degree_bound)
    betas = list(alg.trunc)
    cols = sorted(((e, g) for e in monos for g in betas),
                  key=lambda c: (sum(c[0]), tuple(-x for x in c[0]), pair.weight(c[1]), c[1]))
    images = [alg.shift(expand(e), g) for e, g in cols]
    rows_index = sorted({key for img in images for key in img})
    pos = {key: i for i, key in enumerate(rows_index)}
    matrix = [[Fraction(0)] * len(cols) for _ in rows_index]
    for j, img in enumerate(images):
        for key, c in img.items():
            matrix[pos[key]][j] = c
    if not rows_index:
        kernel = [[Fraction(int(i == j)) for i in range(len(cols))] for j in range(len(cols))]
    else:
        kernel = nullspace(matrix, len(cols))
    col_index = {c: i for i, c in enumerate(cols)}

    def lead(vec):
        return max(i for i, c in enumerate(vec) if c)

    kept: list[Relation] = []
    multiples = SpanTracker()
    for vec in sorted(kernel, key=lead):
        v = {i: c for i, c in enumerate(vec) if c}
        if multiples.contains(v):
            continue
        terms = {cols[i]: c for i, c in v.items()}
        lc = terms[cols[lead(vec)]]
        terms = {key: c / lc for key, c in terms.items()}
        kept.append(Relation(terms))
        # every q^gamma * monomial multiple of the new relation that stays in range
        for e in monos:
            for g in betas:
                mult = {}
                ok = True
                for (e2, b2), c in terms.items():
                    ee = tuple(a + b for a, b in zip(e, e2))
                    bb = alg.trunc.add(b2, g)
                    if bb is None:
                        continue
                    if sum(ee) > degree_bound:
                        ok = False
                        break
                    mult[col_index[(ee, bb)]] = c
                if ok and mult:
                    multiples.add(mult)

    pres = Presentation(gens, names, kept, degree_bound)
    if grading is not None:
        if len(grading) != pair.n:
            raise DataError(f"grading needs {pair.n} weights")
        gdeg = [sum(w * x for w, x in zip(grading, g)) for g in gens]
        pres.generator_degrees = gdeg
        rdeg = []
        for rel in kept:
            # q^beta carries the degree of its contact data, sum_i w_i (D_i . beta)
            ds = {sum(d * x for d, x in zip(gdeg, e)) + sum(w * x for w, x in zip(grading, pair.D_degrees(b)))
                  for (e, b) in rel.terms}
            rdeg.append(ds.pop() if len(ds) == 1 else None)
        pres.relation_degrees = rdeg
    return pres


def presentation_residuals(alg: MirrorAlgebra, pres: Presentation) -> list[RElement]:
    """Each relation evaluated in R_I by substituting the generator expansions."""
    out = []
    for rel in pres.relations:
        total: dict = {}
        for (e, beta), c in rel.terms.items():
            contacts = [g for g, x in zip(pres.generators, e) for _ in range(x)]
            total = alg.add(total, alg.shift(alg.product_of(contacts), beta), c)
        out.append(total)
    return out
