"""Geometry of an snc pair (X, D): strata tables, curve classes, dual complex.

Divisor components are indexed 0..n-1.  A stratum is keyed by the sorted
tuple of the components it lies in; ``()`` is X itself.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator

from relqc.errors import ConfigurationError, DataError
from relqc.rational import inverse, parse_rational

Beta = tuple[int, ...]
Index = tuple[int, ...]

NEF_CLASSES = ("log_cy", "kd_nef", "anti_kd_nef", "neither")


@dataclass(frozen=True)
class BasisClass:
    label: str
    degree: int  # real cohomological degree
    hodge_p: int


@dataclass
class StratumData:
    """Cohomology table of one stratum D_I.

    ``cup_tables[name][i][j]`` is the coefficient of basis class j in
    (restriction of the ambient class ``name``) cup (basis class i).  The name
    ``"c1log"`` is reserved for c1(T_X(-log D)).
    """

    index: Index
    basis: list[BasisClass]
    pairing: list[list[Fraction]]
    cup_tables: dict[str, list[list[Fraction]]] = field(default_factory=dict)
    components: int = 1
    log_c1: list[Fraction] | None = None

    @cached_property
    def labels(self) -> list[str]:
        return [b.label for b in self.basis]

    @cached_property
    def position(self) -> dict[str, int]:
        return {b.label: i for i, b in enumerate(self.basis)}

    @cached_property
    def dim(self) -> int:
        return max(b.degree for b in self.basis) // 2

    @cached_property
    def inverse_pairing(self) -> list[list[Fraction]]:
        return inverse(self.pairing)

    @cached_property
    def unit(self) -> dict[str, Fraction]:
        """The identity class: sum of the degree-zero basis classes."""
        return {b.label: Fraction(1) for b in self.basis if b.degree == 0}

    @cached_property
    def point(self) -> dict[str, Fraction]:
        """The point class, summed over components when disconnected.

        Each component contributes its unique top-degree basis class.
        """
        top = max(b.degree for b in self.basis)
        tops = [b.label for b in self.basis if b.degree == top]
        if len(tops) == self.components:
            return {lab: Fraction(1) for lab in tops}
        raise ConfigurationError(
            f"stratum {list(self.index)}: cannot identify point classes "
            f"({len(tops)} top-degree classes, {self.components} components)")

    def cup(self, name: str, label: str) -> dict[str, Fraction]:
        if name not in self.cup_tables:
            raise ConfigurationError(f"stratum {list(self.index)} has no cup table for {name!r}")
        row = self.cup_tables[name][self.position[label]]
        return {self.basis[j].label: c for j, c in enumerate(row) if c}

    def integrate_product(self, a: str, b: str) -> Fraction:
        return self.pairing[self.position[a]][self.position[b]]


@dataclass
class PairDescription:
    """Declarative description of (X, D).

    ``intersection_D[b][i]`` is the integral of D_i over lattice basis class b,
    ``intersection_c1[b]`` that of c1(T_X).  ``divisor_degrees[label][b]`` gives
    the integral of the ambient degree-two class ``label`` over b.
    """

    n: int
    ambient_dim: int
    strata: dict[Index, StratumData]
    curve_lattice_rank: int
    effective_generators: list[Beta]
    intersection_D: list[list[int]]
    intersection_c1: list[int]
    divisor_degrees: dict[str, list[int]] = field(default_factory=dict)
    kd_direct: list[int] | None = None
    nef_flag: str | None = None
    curve_grading: list[int] | None = None
    name: str = ""

    def __post_init__(self):
        self.validate()

    # -- validation ------------------------------------------------------
    def validate(self) -> None:
        if () not in self.strata:
            raise DataError("strata must contain the empty index set (X itself)")
        for idx in self.strata:
            if list(idx) != sorted(set(idx)) or any(i < 0 or i >= self.n for i in idx):
                raise DataError(f"bad stratum index set {list(idx)}")
            for k in range(len(idx)):
                for sub in itertools.combinations(idx, k):
                    if sub not in self.strata:
                        raise DataError(
                            f"stratum {list(idx)} present but its subset {list(sub)} is missing")
        for i in range(self.n):
            if (i,) not in self.strata:
                raise DataError(f"divisor component {i} has no stratum entry")
        for st in self.strata.values():
            _validate_stratum(st)
        r = self.curve_lattice_rank
        if len(self.intersection_D) != r or len(self.intersection_c1) != r:
            raise DataError("intersection_numbers must have one entry per lattice basis class")
        for row in self.intersection_D:
            if len(row) != self.n:
                raise DataError("each intersection_numbers.D entry needs n integers")
        for g in self.effective_generators:
            if len(g) != r:
                raise DataError(f"effective generator {list(g)} has wrong rank")
        w = self.grading
        for g in self.effective_generators:
            if sum(a * b for a, b in zip(w, g)) <= 0:
                raise ConfigurationError(
                    f"curve grading {w} is not positive on generator {list(g)}")
        for lab, degs in self.divisor_degrees.items():
            if lab not in self.strata[()].position:
                raise DataError(f"divisor_degrees names unknown ambient class {lab!r}")
            if len(degs) != r:
                raise DataError(f"divisor_degrees[{lab!r}] has wrong rank")
        if self.kd_direct is not None:
            for b in range(r):
                two_ways = -self.intersection_c1[b] + sum(self.intersection_D[b])
                if two_ways != self.kd_direct[b]:
                    raise ConfigurationError(
                        f"(K_X+D).beta disagrees on basis class {b}: "
                        f"{two_ways} from c1 and D, {self.kd_direct[b]} given")
        if self.nef_flag is not None and self.nef_flag not in NEF_CLASSES:
            raise DataError(f"unknown nef flag {self.nef_flag!r}")
        nef_classification(self)

    # -- basic functionals ------------------------------------------------
    @property
    def grading(self) -> list[int]:
        return self.curve_grading or [1] * self.curve_lattice_rank

    def weight(self, beta: Beta) -> int:
        return sum(a * b for a, b in zip(self.grading, beta))

    def D_degrees(self, beta: Beta) -> tuple[int, ...]:
        return tuple(sum(beta[b] * self.intersection_D[b][i] for b in range(self.curve_lattice_rank))
                     for i in range(self.n))

    def c1_degree(self, beta: Beta) -> int:
        return sum(beta[b] * self.intersection_c1[b] for b in range(self.curve_lattice_rank))

    def log_c1_degree(self, beta: Beta) -> int:
        return self.c1_degree(beta) - sum(self.D_degrees(beta))

    def divisor_degree(self, label: str, beta: Beta) -> int:
        return sum(beta[b] * self.divisor_degrees[label][b] for b in range(self.curve_lattice_rank))

    def stratum_of(self, s) -> StratumData | None:
        return self.strata.get(tuple(i for i, x in enumerate(s) if x != 0))

    @property
    def zero_beta(self) -> Beta:
        return (0,) * self.curve_lattice_rank

    @property
    def zero_contact(self) -> tuple[int, ...]:
        return (0,) * self.n

    @cached_property
    def unit_label(self) -> str:
        unit = self.strata[()].unit
        if len(unit) != 1:
            raise ConfigurationError("X must be connected (exactly one degree-zero class)")
        return next(iter(unit))

    @cached_property
    def divisor_labels(self) -> list[str]:
        """Degree-two ambient classes that have curve degrees declared."""
        return [b.label for b in self.strata[()].basis if b.degree == 2 and b.label in self.divisor_degrees]

    # -- curve classes -----------------------------------------------------
    def contains(self, beta: Beta) -> bool:
        """Membership of beta in the monoid P generated by effective_generators."""
        return _monoid_contains(tuple(self.effective_generators), tuple(self.grading), tuple(beta))

    def classes_below(self, beta: Beta) -> list[Beta]:
        """All beta1 in P with beta - beta1 in P, sorted by weight."""
        out = [b for b in self.classes_up_to_weight(self.weight(beta))
               if self.contains(tuple(x - y for x, y in zip(beta, b)))]
        return out

    def classes_up_to_weight(self, w: int) -> list[Beta]:
        return _monoid_elements(tuple(self.effective_generators), tuple(self.grading), w)

    # -- io ----------------------------------------------------------------
    @classmethod
    def from_dict(cls, doc: dict, path: str | None = None) -> "PairDescription":
        try:
            n = int(doc["n"])
            strata = {}
            for st in doc["strata"]:
                idx = tuple(int(i) for i in st["index"])
                if idx in strata:
                    raise DataError(f"duplicate stratum {list(idx)}", path)
                basis = [BasisClass(str(b["label"]), int(b["degree"]),
                                    int(b["hodge_p"]) if "hodge_p" in b else _default_p(b))
                         for b in st["basis"]]
                pairing = [[parse_rational(x) for x in row] for row in st["pairing"]]
                cups = {k: [[parse_rational(x) for x in row] for row in m]
                        for k, m in st.get("cup_tables", {}).items()}
                log_c1 = st.get("log_c1")
                strata[idx] = StratumData(
                    index=idx, basis=basis, pairing=pairing, cup_tables=cups,
                    components=int(st.get("components", 1)),
                    log_c1=[parse_rational(x) for x in log_c1] if log_c1 is not None else None)
            inter = doc["intersection_numbers"]
            return cls(
                n=n,
                ambient_dim=int(doc["ambient_dim"]),
                strata=strata,
                curve_lattice_rank=int(doc["curve_lattice_rank"]),
                effective_generators=[tuple(int(x) for x in g) for g in doc["effective_generators"]],
                intersection_D=[[int(x) for x in e["D"]] for e in inter],
                intersection_c1=[int(e["c1"]) for e in inter],
                divisor_degrees={k: [int(x) for x in v] for k, v in doc.get("divisor_degrees", {}).items()},
                kd_direct=[int(e["KD"]) for e in inter] if all("KD" in e for e in inter) and inter else None,
                nef_flag=doc.get("nef"),
                curve_grading=[int(x) for x in doc["curve_grading"]] if "curve_grading" in doc else None,
                name=str(doc.get("name", "")),
            )
        except DataError as exc:
            if exc.path is None and path is not None:
                raise type(exc)(str(exc), path) from None
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed pair description: {exc!r}", path) from None

    def to_dict(self) -> dict:
        inter = []
        for b in range(self.curve_lattice_rank):
            e = {"D": list(self.intersection_D[b]), "c1": self.intersection_c1[b]}
            if self.kd_direct is not None:
                e["KD"] = self.kd_direct[b]
            inter.append(e)
        doc = {
            "name": self.name,
            "n": self.n,
            "ambient_dim": self.ambient_dim,
            "curve_lattice_rank": self.curve_lattice_rank,
            "effective_generators": [list(g) for g in self.effective_generators],
            "intersection_numbers": inter,
            "divisor_degrees": {k: list(v) for k, v in sorted(self.divisor_degrees.items())},
            "strata": [],
        }
        if self.nef_flag is not None:
            doc["nef"] = self.nef_flag
        if self.curve_grading is not None:
            doc["curve_grading"] = list(self.curve_grading)
        for idx in sorted(self.strata, key=lambda i: (len(i), i)):
            st = self.strata[idx]
            d = {
                "index": list(idx),
                "components": st.components,
                "basis": [{"label": b.label, "degree": b.degree, "hodge_p": b.hodge_p} for b in st.basis],
                "pairing": [[str(x) for x in row] for row in st.pairing],
            }
            if st.cup_tables:
                d["cup_tables"] = {k: [[str(x) for x in row] for row in m]
                                   for k, m in sorted(st.cup_tables.items())}
            if st.log_c1 is not None:
                d["log_c1"] = [str(x) for x in st.log_c1]
            doc["strata"].append(d)
        return doc


def _default_p(b: dict) -> int:
    deg = int(b["degree"])
    if deg % 2:
        raise ConfigurationError(f"class {b['label']!r} has odd degree {deg}; supply hodge_p")
    return deg // 2


def _validate_stratum(st: StratumData) -> None:
    k = len(st.basis)
    labels = [b.label for b in st.basis]
    if len(set(labels)) != k:
        raise DataError(f"stratum {list(st.index)}: duplicate basis labels")
    for b in st.basis:
        if b.degree % 2:
            raise ConfigurationError(
                f"stratum {list(st.index)}: odd-degree class {b.label!r} is not supported")
    if len(st.pairing) != k or any(len(row) != k for row in st.pairing):
        raise DataError(f"stratum {list(st.index)}: pairing matrix must be {k}x{k}")
    for i in range(k):
        for j in range(k):
            sign = -1 if (st.basis[i].degree * st.basis[j].degree) % 2 else 1
            if st.pairing[i][j] != sign * st.pairing[j][i]:
                raise DataError(f"stratum {list(st.index)}: pairing matrix is not graded-symmetric")
            if st.pairing[i][j] and st.basis[i].degree + st.basis[j].degree != 2 * st.dim:
                raise DataError(f"stratum {list(st.index)}: pairing of {st.basis[i].label!r} and "
                                f"{st.basis[j].label!r} has wrong total degree")
    try:
        st.inverse_pairing
    except ValueError:
        raise DataError(f"stratum {list(st.index)}: pairing matrix is degenerate") from None
    for name, m in st.cup_tables.items():
        if len(m) != k or any(len(row) != k for row in m):
            raise DataError(f"stratum {list(st.index)}: cup table {name!r} must be {k}x{k}")
    if st.log_c1 is not None and len(st.log_c1) != k:
        raise DataError(f"stratum {list(st.index)}: log_c1 has wrong length")
    if st.log_c1 is not None and any(st.log_c1) and "c1log" not in st.cup_tables:
        raise ConfigurationError(
            f"stratum {list(st.index)}: nonzero log_c1 needs a 'c1log' cup table")
    if len(st.unit) != st.components:
        raise DataError(f"stratum {list(st.index)}: expected {st.components} degree-zero classes")


def _monoid_elements(gens: tuple, grading: tuple, wmax: int) -> list[Beta]:
    return list(_monoid_elements_cached(gens, grading, wmax))


_ELEMENT_CACHE: dict = {}


def _monoid_elements_cached(gens, grading, wmax):
    key = (gens, grading, wmax)
    if key not in _ELEMENT_CACHE:
        rank = len(grading)
        zero = (0,) * rank
        seen = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = tuple(a + b for a, b in zip(x, g))
                    if y not in seen and sum(a * b for a, b in zip(grading, y)) <= wmax:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        _ELEMENT_CACHE[key] = tuple(sorted(seen, key=lambda b: (sum(a * c for a, c in zip(grading, b)), b)))
    return _ELEMENT_CACHE[key]


def _monoid_contains(gens, grading, beta) -> bool:
    w = sum(a * b for a, b in zip(grading, beta))
    if w < 0:
        return False
    return beta in set(_monoid_elements_cached(gens, grading, w))


def load_pair(path) -> PairDescription:
    path = str(path)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
    except OSError as exc:
        raise DataError(f"cannot read pair file: {exc.strerror}", path) from None
    return PairDescription.from_dict(doc, path)


def store_pair(pair: PairDescription, path) -> None:
    with open(path, "w") as fh:
        json.dump(pair.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


# -- dual complex and its cone --------------------------------------------------

@dataclass(frozen=True)
class ConePoint:
    """Integer point of the cone B, stored by its contact vector."""

    contact: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.contact):
            raise ValueError(f"cone point needs nonnegative multiplicities, got {self.contact}")

    @property
    def support(self) -> Index:
        return tuple(i for i, c in enumerate(self.contact) if c)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(c for c in self.contact if c)

    @property
    def total(self) -> int:
        return sum(self.contact)

    def is_origin(self) -> bool:
        return not any(self.contact)

    def sort_key(self):
        return (self.total, self.support, self.multiplicities)

    def __str__(self) -> str:
        if self.is_origin():
            return "0"
        return "+".join(f"{m}v{i + 1}" if m != 1 else f"v{i + 1}" for i, m in zip(self.support, self.multiplicities))


@dataclass(frozen=True)
class DualComplex:
    n: int
    simplices: tuple[Index, ...]  # nonempty index sets with D_I nonempty

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    def contains(self, p: ConePoint) -> bool:
        return p.is_origin() or p.support in self._simplex_set

    @cached_property
    def _simplex_set(self) -> frozenset:
        return frozenset(self.simplices)

    def point(self, contact) -> ConePoint | None:
        """The cone point with this contact vector, or None if outside B."""
        contact = tuple(contact)
        if len(contact) != self.n or any(c < 0 for c in contact):
            return None
        p = ConePoint(contact)
        return p if self.contains(p) else None


def build_dual_complex(pair: PairDescription) -> DualComplex:
    simplices = tuple(sorted((idx for idx in pair.strata if idx), key=lambda i: (len(i), i)))
    for idx in simplices:
        for k in range(1, len(idx)):
            for sub in itertools.combinations(idx, k):
                if sub not in pair.strata:
                    raise DataError(f"simplex {list(idx)} has missing face {list(sub)}")
    return DualComplex(pair.n, simplices)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def lattice_points(cx: DualComplex, bound: int) -> list[ConePoint]:
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    pts = [ConePoint((0,) * cx.n)]
    for sigma in cx.simplices:
        for total in range(len(sigma), bound + 1):
            for mult in _compositions(total, len(sigma)):
                c = [0] * cx.n
                for i, m in zip(sigma, mult):
                    c[i] = m
                pts.append(ConePoint(tuple(c)))
    return sorted(pts, key=ConePoint.sort_key)


def contact_vector(p: ConePoint) -> tuple[int, ...]:
    return tuple(p.contact)


def log_canonical_degree(pair: PairDescription, beta: Beta) -> int:
    """Integral of K_X + D over beta."""
    return -pair.c1_degree(beta) + sum(pair.D_degrees(beta))


def nef_classification(pair: PairDescription) -> str:
    signs = {(log_canonical_degree(pair, g) > 0) - (log_canonical_degree(pair, g) < 0)
             for g in pair.effective_generators}
    if not signs or signs == {0}:
        computed = "log_cy"
    elif -1 not in signs:
        computed = "kd_nef"
    elif 1 not in signs:
        computed = "anti_kd_nef"
    else:
        computed = "neither"
    flag = pair.nef_flag
    if flag is not None and flag != computed:
        compatible = computed == "log_cy" and flag in ("kd_nef", "anti_kd_nef")
        if not compatible:
            raise ConfigurationError(f"declared nef flag {flag!r} contradicts computed {computed!r}")
    return computed
