"""Tables of formal Gromov-Witten invariants and the universal-equation engine.

Values are looked up in a table first.  Keys that are not stored are
derived, in order, from contact balance and virtual dimension (both force
zero), the string, dilaton and divisor equations, genus-zero TRR, and, for
one- and two-point descendants of nonzero class, the divisor equation run
backwards.  Anything else raises :class:`IncompleteTableError`.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from relqc.errors import ConfigurationError, DataError, IncompleteTableError
from relqc.pair_geometry import Beta, PairDescription
from relqc.rational import parse_rational
from relqc.state_space import basis_degree0, dual_terms, pair_basis


class Insertion(NamedTuple):
    s: tuple[int, ...]
    label: str
    psi: int = 0

    def __str__(self) -> str:
        body = f"[{self.label}]_{list(self.s)}"
        if self.psi:
            body += "psi" if self.psi == 1 else f"psi^{self.psi}"
        return body


class InvariantKey(NamedTuple):
    genus: int
    insertions: tuple[Insertion, ...]
    beta: Beta

    @classmethod
    def make(cls, genus: int, insertions: Iterable, beta) -> "InvariantKey":
        ins = tuple(sorted(Insertion(tuple(i[0]), i[1], i[2] if len(i) > 2 else 0) for i in insertions))
        return cls(int(genus), ins, tuple(beta))

    @property
    def m(self) -> int:
        return len(self.insertions)

    def __str__(self) -> str:
        body = ", ".join(str(i) for i in self.insertions)
        return f"<{body}>_{{g={self.genus},beta={list(self.beta)}}}"

    def sort_key(self):
        return (self.genus, self.beta, self.insertions)


def balanced(pair: PairDescription, key: InvariantKey) -> bool:
    total = [0] * pair.n
    for ins in key.insertions:
        for i, x in enumerate(ins.s):
            total[i] += x
    return tuple(total) == pair.D_degrees(key.beta)


def virtual_dimension_ok(pair: PairDescription, key: InvariantKey) -> bool:
    """(1-g)(dim-3) + m + c1.beta - D.beta == sum deg0 + sum psi."""
    lhs = ((1 - key.genus) * (pair.ambient_dim - 3) + key.m + pair.c1_degree(key.beta)
           - sum(pair.D_degrees(key.beta)))
    rhs = sum(basis_degree0(pair, (i.s, i.label)) + i.psi for i in key.insertions)
    return lhs == rhs


def is_stable(genus: int, m: int, beta: Beta) -> bool:
    return 2 * genus - 2 + m > 0 or any(beta)


@dataclass
class TableManifest:
    """Declared scope of a table.

    ``window`` lists the contact vectors used as t-variables; ``contact_bound``
    bounds max |s_i| of stored keys; ``curve_bound`` bounds the curve weight.
    """

    window: list[tuple[int, ...]] = field(default_factory=list)
    contact_bound: int | None = None
    curve_bound: int | None = None
    max_points: int | None = None
    notes: str = ""

    def to_json(self) -> dict:
        d = {"window": [list(s) for s in self.window]}
        for k in ("contact_bound", "curve_bound", "max_points"):
            if getattr(self, k) is not None:
                d[k] = getattr(self, k)
        if self.notes:
            d["notes"] = self.notes
        return d

    @classmethod
    def from_json(cls, d: dict) -> "TableManifest":
        return cls(window=[tuple(int(x) for x in s) for s in d.get("window", [])],
                   contact_bound=d.get("contact_bound"), curve_bound=d.get("curve_bound"),
                   max_points=d.get("max_points"), notes=str(d.get("notes", "")))


class InvariantTable:
    """Exact values keyed by canonical :class:`InvariantKey`."""

    def __init__(self, pair: PairDescription, values: dict | None = None,
                 manifest: TableManifest | None = None, provenance: dict | None = None):
        self.pair = pair
        self.manifest = manifest or TableManifest()
        self.values: dict[InvariantKey, Fraction] = {}
        self.provenance: dict[InvariantKey, str] = {}
        for key, v in (values or {}).items():
            self.set(key, v, (provenance or {}).get(key, ""))

    def set(self, key: InvariantKey, value, note: str = "") -> None:
        key = InvariantKey.make(*key)
        check_key(self.pair, key)
        if not balanced(self.pair, key):
            raise DataError(f"unbalanced key {key}")
        if key.genus == 0 and not virtual_dimension_ok(self.pair, key):
            raise DataError(f"key violates the virtual dimension constraint: {key}")
        self.values[key] = Fraction(value)
        if note:
            self.provenance[key] = note

    def get(self, key: InvariantKey):
        return self.values.get(key)

    def __contains__(self, key) -> bool:
        return key in self.values

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InvariantTable):
            return NotImplemented
        return self.values == other.values and self.manifest == other.manifest

    def copy(self) -> "InvariantTable":
        t = InvariantTable(self.pair, manifest=self.manifest)
        t.values = dict(self.values)
        t.provenance = dict(self.provenance)
        return t

    def perturbed(self, key: InvariantKey, delta=1) -> "InvariantTable":
        key = InvariantKey.make(*key)
        t = self.copy()
        t.values[key] = t.values.get(key, Fraction(0)) + delta
        t.provenance[key] = "perturbed"
        return t


def check_key(pair: PairDescription, key: InvariantKey) -> None:
    if key.genus < 0:
        raise DataError(f"negative genus in {key}")
    if len(key.beta) != pair.curve_lattice_rank:
        raise DataError(f"curve class {list(key.beta)} has wrong rank")
    for ins in key.insertions:
        if len(ins.s) != pair.n:
            raise DataError(f"contact vector {list(ins.s)} has wrong length")
        if ins.psi < 0:
            raise DataError(f"negative psi power in {key}")
        st = pair.stratum_of(ins.s)
        if st is not None and ins.label not in st.position:
            raise DataError(f"label {ins.label!r} is not a basis class of stratum {list(st.index)}")


# -- file format -------------------------------------------------------------

def _record(key: InvariantKey, value: Fraction, note: str = "") -> dict:
    d = {"g": key.genus, "beta": list(key.beta),
         "insertions": [{"s": list(i.s), "label": i.label, "psi": i.psi} for i in key.insertions],
         "value": str(value)}
    if note:
        d["note"] = note
    return d


def store_table(table: InvariantTable, path) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps({"manifest": table.manifest.to_json()}, sort_keys=True) + "\n")
        for key in sorted(table.values, key=InvariantKey.sort_key):
            rec = _record(key, table.values[key], table.provenance.get(key, ""))
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_table(path, pair: PairDescription) -> InvariantTable:
    path = str(path)
    table = InvariantTable(pair)
    seen_line: dict[InvariantKey, int] = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise DataError(f"cannot read invariant file: {exc.strerror}", path) from None
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
            if "manifest" in rec:
                if lineno != 1 and table.values:
                    raise DataError("manifest must precede all records", path, lineno)
                try:
                    table.manifest = TableManifest.from_json(rec["manifest"])
                except (TypeError, ValueError) as exc:
                    raise DataError(f"malformed manifest: {exc}", path, lineno) from None
                continue
            try:
                ins = [(tuple(int(x) for x in i["s"]), str(i["label"]), int(i.get("psi", 0)))
                       for i in rec["insertions"]]
                key = InvariantKey.make(int(rec["g"]), ins, tuple(int(x) for x in rec["beta"]))
                value = parse_rational(rec["value"])
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                raise DataError(f"malformed record: {exc!r}", path, lineno) from None
            if key in seen_line:
                if table.values[key] != value:
                    raise DataError(
                        f"conflicting values for {key}: {table.values[key]} (line {seen_line[key]}) "
                        f"vs {value} (line {lineno})", path, lineno)
                continue
            try:
                table.set(key, value, str(rec.get("note", "")))
            except DataError as exc:
                raise DataError(str(exc), path, lineno) from None
            seen_line[key] = lineno
    return table


# -- the engine ----------------------------------------------------------------

@dataclass
class Reduction:
    """value = constant + sum(coeff * value(key))."""

    rule: str
    terms: list[tuple[Fraction, InvariantKey]]
    constant: Fraction = Fraction(0)


def _expand(pair, genus, slots: Sequence[tuple[dict, int]], beta) -> list[tuple[Fraction, InvariantKey]]:
    """Multilinear expansion of insertions given as ({(s, label): coeff}, psi)."""
    out = []
    choices = [list(terms.items()) for terms, _ in slots]
    for combo in itertools.product(*choices):
        c = Fraction(1)
        ins = []
        for ((s, lab), coeff), (_, psi) in zip(combo, slots):
            c *= coeff
            ins.append((s, lab, psi))
        if c:
            out.append((c, InvariantKey.make(genus, ins, beta)))
    return out


class InvariantEngine:
    """Evaluates invariants from a table plus the universal equations."""

    def __init__(self, table: InvariantTable):
        self.table = table
        self.pair = table.pair
        self._memo: dict[InvariantKey, Fraction] = {}

    # public API ---------------------------------------------------------------
    def value(self, key) -> Fraction:
        key = InvariantKey.make(*key)
        v = self._memo.get(key)
        if v is None:
            v = self._compute(key)
            self._memo[key] = v
        return v

    def evaluate(self, terms: Iterable[tuple[Fraction, InvariantKey]]) -> Fraction:
        total = Fraction(0)
        missing = []
        for c, k in terms:
            try:
                total += c * self.value(k)
            except IncompleteTableError as exc:
                missing.extend(exc.keys)
        if missing:
            raise IncompleteTableError(missing)
        return total

    def killed(self, key: InvariantKey) -> bool:
        """True when balance, an absent stratum or virtual dimension forces 0."""
        if any(self.pair.stratum_of(i.s) is None for i in key.insertions):
            return True
        if not balanced(self.pair, key):
            return True
        return not virtual_dimension_ok(self.pair, key)

    # reductions ------------------------------------------------------------------
    def reduce_elementary(self, key: InvariantKey) -> Reduction | None:
        """String, dilaton or divisor reduction, or None if none applies."""
        pair = self.pair
        key = InvariantKey.make(*key)
        unit = pair.unit_label
        zero = pair.zero_contact
        g, beta = key.genus, key.beta
        for idx, ins in enumerate(key.insertions):
            if ins.s != zero:
                continue
            rest = key.insertions[:idx] + key.insertions[idx + 1:]
            rest_stable = is_stable(g, len(rest), beta)
            if ins.label == unit and ins.psi == 0:
                if rest_stable:
                    terms = []
                    for j, r in enumerate(rest):
                        if r.psi:
                            new = rest[:j] + (r._replace(psi=r.psi - 1),) + rest[j + 1:]
                            terms.append((Fraction(1), InvariantKey.make(g, new, beta)))
                    return Reduction("string", terms)
                if g == 0 and len(rest) == 2 and not any(beta):
                    if any(r.psi for r in rest):
                        return Reduction("string", [])
                    a, b = rest
                    return Reduction("string", [], pair_basis(pair, (a.s, a.label), (b.s, b.label)))
            if ins.label == unit and ins.psi == 1 and rest_stable:
                return Reduction("dilaton", [(Fraction(2 * g - 2 + len(rest)), InvariantKey.make(g, rest, beta))])
            if ins.label in pair.divisor_labels and ins.psi == 0 and rest_stable:
                terms = []
                d = pair.divisor_degree(ins.label, beta)
                if d:
                    terms.append((Fraction(d), InvariantKey.make(g, rest, beta)))
                for j, r in enumerate(rest):
                    if not r.psi:
                        continue
                    st = pair.stratum_of(r.s)
                    for lab, c in st.cup(ins.label, r.label).items():
                        new = rest[:j] + (Insertion(r.s, lab, r.psi - 1),) + rest[j + 1:]
                        terms.append((c, InvariantKey.make(g, new, beta)))
                return Reduction("divisor", terms)
        return None

    def trr(self, key, psi_index: int | None = None, anchors: tuple[int, int] | None = None) -> Fraction:
        """Genus-zero TRR at marking ``psi_index`` with anchor markings ``anchors``."""
        key = InvariantKey.make(*key)
        if key.genus != 0 or key.m < 3:
            raise ValueError("TRR needs genus 0 and at least three markings")
        ins = key.insertions
        if psi_index is None:
            psi_index = next((i for i, x in enumerate(ins) if x.psi), None)
            if psi_index is None:
                raise ValueError("TRR needs a marking with a psi power")
        if ins[psi_index].psi < 1:
            raise ValueError("chosen marking carries no psi power")
        others = [i for i in range(key.m) if i != psi_index]
        if anchors is None:
            anchors = (others[0], others[1])
        if psi_index in anchors or anchors[0] == anchors[1]:
            raise ValueError("anchors must be two other distinct markings")
        rest = [ins[i] for i in others if i not in anchors]
        g1 = ins[psi_index]._replace(psi=ins[psi_index].psi - 1)
        a2, a3 = ins[anchors[0]], ins[anchors[1]]
        return self._split_sum([g1], [a2, a3], rest, key.beta)

    def wdvv_residual(self, anchors: Sequence, spectators: Sequence = (), beta=None) -> Fraction:
        """LHS - RHS of WDVV splitting (1,2 | 3,4) against (1,3 | 2,4)."""
        a = [Insertion(tuple(x[0]), x[1], x[2] if len(x) > 2 else 0) for x in anchors]
        sp = [Insertion(tuple(x[0]), x[1], x[2] if len(x) > 2 else 0) for x in spectators]
        beta = tuple(beta if beta is not None else self.pair.zero_beta)
        lhs = self._split_sum([a[0], a[1]], [a[2], a[3]], sp, beta)
        rhs = self._split_sum([a[0], a[2]], [a[1], a[3]], sp, beta)
        return lhs - rhs

    def _split_sum(self, left: list, right: list, spectators: list, beta: Beta) -> Fraction:
        """Sum over beta1 + beta2 = beta, S1 | S2 and dual pairs (T, T^vee) of
        <left, S1, T>_{beta1} <T^vee, right, S2>_{beta2}."""
        pair = self.pair
        total = Fraction(0)
        missing = []
        nsp = len(spectators)
        for beta1 in pair.classes_below(beta):
            beta2 = tuple(b - c for b, c in zip(beta, beta1))
            dvec = pair.D_degrees(beta1)
            for r in range(nsp + 1):
                for S1 in itertools.combinations(range(nsp), r):
                    s1 = [spectators[i] for i in S1]
                    s2 = [spectators[i] for i in range(nsp) if i not in S1]
                    m1 = len(left) + len(s1) + 1
                    if not is_stable(0, m1, beta1):
                        continue
                    s = tuple(dvec[i] - sum(x.s[i] for x in left + s1) for i in range(pair.n))
                    st = pair.stratum_of(s)
                    if st is None:
                        continue
                    for lab in st.labels:
                        k1 = InvariantKey.make(0, left + s1 + [Insertion(s, lab, 0)], beta1)
                        if self.killed(k1):
                            continue
                        duals = dual_terms(pair, s, lab)
                        k2s = [(c, InvariantKey.make(0, [Insertion(ds, dl, 0)] + right + s2, beta2))
                               for (ds, dl), c in duals.items()]
                        k2s = [(c, k) for c, k in k2s if not self.killed(k)]
                        if not k2s:
                            continue
                        try:
                            v1 = self.value(k1)
                        except IncompleteTableError as exc:
                            missing.extend(exc.keys)
                            continue
                        if not v1:
                            continue
                        try:
                            total += v1 * self.evaluate(k2s)
                        except IncompleteTableError as exc:
                            missing.extend(exc.keys)
        if missing:
            raise IncompleteTableError(missing)
        return total

    # core --------------------------------------------------------------------
    def _compute(self, key: InvariantKey) -> Fraction:
        check_key(self.pair, key)
        if self.killed(key):
            return Fraction(0)
        g, m, beta = key.genus, key.m, key.beta
        if not is_stable(g, m, beta):
            return Fraction(0)
        stored = self.table.get(key)
        if stored is not None:
            return stored
        if g == 0 and m == 3 and not any(beta) and any(i.psi for i in key.insertions):
            return Fraction(0)
        if g == 0 and m <= 2 and any(i.psi for i in key.insertions):
            return self._backward_divisor(key)
        red = self.reduce_elementary(key)
        if red is not None:
            return red.constant + self.evaluate(red.terms)
        if g == 0 and m >= 3 and any(i.psi for i in key.insertions):
            return self.trr(key)
        raise IncompleteTableError([key])

    def _backward_divisor(self, key: InvariantKey) -> Fraction:
        pair = self.pair
        gamma = next((lab for lab in pair.divisor_labels if pair.divisor_degree(lab, key.beta)), None)
        if gamma is None:
            raise IncompleteTableError([key])
        d = pair.divisor_degree(gamma, key.beta)
        ins = list(key.insertions)
        bigger = InvariantKey.make(0, ins + [Insertion(pair.zero_contact, gamma, 0)], key.beta)
        if self.killed(bigger):
            big = Fraction(0)
        elif key.m == 2:
            big = self._memo.get(bigger)
            if big is None:
                stored = self.table.get(bigger)
                if stored is not None:
                    big = stored
                else:
                    pos = next(i for i, x in enumerate(bigger.insertions) if x.psi)
                    big = self.trr(bigger, psi_index=pos)
        else:
            big = self.value(bigger)
        corrections = []
        for j, r in enumerate(ins):
            if not r.psi:
                continue
            st = pair.stratum_of(r.s)
            for lab, c in st.cup(gamma, r.label).items():
                new = ins[:j] + [Insertion(r.s, lab, r.psi - 1)] + ins[j + 1:]
                corrections.append((c, InvariantKey.make(0, new, key.beta)))
        return (big - self.evaluate(corrections)) / d


def round_trip_residuals(engine: InvariantEngine) -> list[tuple[InvariantKey, str, Fraction]]:
    """For every stored key an elementary equation applies to, the difference
    between the stored value and the value re-derived from its reduction."""
    out = []
    for key in sorted(engine.table.values, key=InvariantKey.sort_key):
        red = engine.reduce_elementary(key)
        if red is None:
            continue
        derived = red.constant + engine.evaluate(red.terms)
        out.append((key, red.rule, engine.table.values[key] - derived))
    return out


def insertion(s, label: str, psi: int = 0) -> Insertion:
    return Insertion(tuple(s), label, psi)


def require_table_pair(table: InvariantTable, pair: PairDescription) -> None:
    if table.pair is not pair:
        raise ConfigurationError("invariant table belongs to a different pair description")


def wdvv_scan(engine: InvariantEngine, classes: Sequence, betas: Iterable, n_spectators: int = 0,
              stop_after: int | None = None) -> tuple[int, list]:
    """WDVV residuals over all anchor quadruples and spectator multisets drawn
    from ``classes`` (insertion triples), keeping only balanced configurations.

    Returns (number of configurations checked, nonzero witnesses).
    """
    pair = engine.pair
    classes = [Insertion(tuple(c[0]), c[1], c[2] if len(c) > 2 else 0) for c in classes]
    checked = 0
    bad = []
    betas = [tuple(b) for b in betas]
    for spec in itertools.combinations_with_replacement(range(len(classes)), n_spectators):
        sp = [classes[i] for i in spec]
        for quad in itertools.product(range(len(classes)), repeat=4):
            anchors = [classes[i] for i in quad]
            total = [sum(x.s[i] for x in anchors + sp) for i in range(pair.n)]
            for beta in betas:
                if tuple(total) != pair.D_degrees(beta):
                    continue
                checked += 1
                r = engine.wdvv_residual(anchors, sp, beta)
                if r:
                    bad.append((tuple(anchors), tuple(sp), beta, r))
                    if stop_after is not None and len(bad) >= stop_after:
                        return checked, bad
    return checked, bad
