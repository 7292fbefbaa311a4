"""The state space: direct sum over contact vectors s of H*(D_{I_s}).

A basis element is a pair ``(s, label)``: the stratum class ``label`` placed
in the summand of contact vector ``s``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

from relqc.errors import ConfigurationError, DataError, DegreeError
from relqc.pair_geometry import ConePoint, DualComplex, PairDescription, lattice_points

Contact = tuple[int, ...]
BasisKey = tuple[Contact, str]


class StateClass:
    """Finite rational combination of basis elements ``(s, label)``."""

    __slots__ = ("pair", "terms")

    def __init__(self, pair: PairDescription, terms: dict | None = None):
        self.pair = pair
        self.terms: dict[BasisKey, Fraction] = {}
        for (s, label), c in (terms or {}).items():
            s = tuple(s)
            st = pair.stratum_of(s)
            if len(s) != pair.n:
                raise DataError(f"contact vector {list(s)} has wrong length")
            if st is None:
                continue  # absent stratum: the summand is zero
            if label not in st.position:
                raise DataError(f"label {label!r} is not a basis class of stratum {list(st.index)}")
            c = Fraction(c)
            if c:
                key = (s, label)
                v = self.terms.get(key, 0) + c
                if v:
                    self.terms[key] = v
                else:
                    self.terms.pop(key, None)

    @classmethod
    def basis(cls, pair: PairDescription, s, label: str) -> "StateClass":
        return cls(pair, {(tuple(s), label): 1})

    @classmethod
    def unit(cls, pair: PairDescription, s) -> "StateClass":
        """[1]_s, zero if the stratum is absent."""
        st = pair.stratum_of(s)
        if st is None:
            return cls(pair)
        return cls(pair, {(tuple(s), lab): c for lab, c in st.unit.items()})

    @classmethod
    def point(cls, pair: PairDescription, s) -> "StateClass":
        """[pt]_s: the point class of the stratum (summed over components)."""
        st = pair.stratum_of(s)
        if st is None:
            return cls(pair)
        return cls(pair, {(tuple(s), lab): c for lab, c in st.point.items()})

    def _check(self, other: "StateClass") -> None:
        if other.pair is not self.pair:
            raise ConfigurationError("classes belong to different pair descriptions")

    def __add__(self, other: "StateClass") -> "StateClass":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return StateClass(self.pair, out)

    def __sub__(self, other: "StateClass") -> "StateClass":
        return self + other.scale(-1)

    def __neg__(self) -> "StateClass":
        return self.scale(-1)

    def scale(self, c) -> "StateClass":
        return StateClass(self.pair, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, c) -> "StateClass":
        return self.scale(c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateClass):
            return NotImplemented
        return self.pair is other.pair and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self) -> Iterator[tuple[BasisKey, Fraction]]:
        for k in sorted(self.terms):
            yield k, self.terms[k]

    def to_json(self) -> list[dict]:
        return [{"s": list(s), "label": lab, "coeff": str(c)} for (s, lab), c in self.items()]

    @classmethod
    def from_json(cls, pair: PairDescription, data: list[dict]) -> "StateClass":
        from relqc.rational import parse_rational
        return cls(pair, {(tuple(d["s"]), d["label"]): parse_rational(d["coeff"]) for d in data})

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*[{lab}]_{list(s)}" for (s, lab), c in self.items())


def pair_basis(pair: PairDescription, a: BasisKey, b: BasisKey) -> Fraction:
    (s, la), (t, lb) = a, b
    if any(x != -y for x, y in zip(s, t)):
        return Fraction(0)
    st = pair.stratum_of(s)
    if st is None:
        return Fraction(0)
    return st.integrate_product(la, lb)


def pair_classes(a: StateClass, b: StateClass) -> Fraction:
    """Bilinear pairing: integrate over D_{I_s} when the contacts are opposite."""
    a._check(b)
    total = Fraction(0)
    for ka, ca in a.terms.items():
        neg = tuple(-x for x in ka[0])
        for kb, cb in b.terms.items():
            if kb[0] == neg:
                total += ca * cb * pair_basis(a.pair, ka, kb)
    return total


def dual_basis(pair: PairDescription, s) -> list[tuple[StateClass, StateClass]]:
    """Pairs (T_{s,k}, T^k_{-s}) with (T_{s,k}, T^{k'}_{-s}) = delta."""
    s = tuple(s)
    st = pair.stratum_of(s)
    if st is None:
        return []
    try:
        inv = st.inverse_pairing
    except ValueError:
        raise DataError(f"stratum {list(st.index)}: singular pairing matrix") from None
    neg = tuple(-x for x in s)
    out = []
    for k, b in enumerate(st.basis):
        dual = {(neg, st.basis[j].label): inv[j][k] for j in range(len(st.basis)) if inv[j][k]}
        out.append((StateClass.basis(pair, s, b.label), StateClass(pair, dual)))
    return out


def dual_terms(pair: PairDescription, s, label: str) -> dict[BasisKey, Fraction]:
    """Coefficients of the dual T^k_{-s} of basis element (s, label)."""
    st = pair.stratum_of(s)
    k = st.position[label]
    inv = st.inverse_pairing
    neg = tuple(-x for x in s)
    return {(neg, st.basis[j].label): inv[j][k] for j in range(len(st.basis)) if inv[j][k]}


def basis_degree0(pair: PairDescription, key: BasisKey) -> Fraction:
    s, label = key
    st = pair.stratum_of(s)
    d = st.basis[st.position[label]].degree
    return Fraction(d, 2) + sum(1 for x in s if x < 0)


def basis_multi_degree(pair: PairDescription, key: BasisKey) -> tuple[Fraction, tuple[int, ...]]:
    return basis_degree0(pair, key), tuple(key[0])


def multi_degree(c: StateClass) -> tuple[Fraction, tuple[int, ...]]:
    degs = {basis_multi_degree(c.pair, k) for k in c.terms}
    if len(degs) != 1:
        if not degs:
            raise DegreeError("the zero class has no degree")
        raise DegreeError(f"inhomogeneous class with degrees {sorted(degs)}")
    return degs.pop()


def hodge_p(pair: PairDescription, key: BasisKey) -> int:
    s, label = key
    st = pair.stratum_of(s)
    return st.basis[st.position[label]].hodge_p


def basis_over(pair: PairDescription, contacts: Iterable[Contact]) -> list[BasisKey]:
    """All basis elements over the given contact vectors, canonically ordered."""
    out = []
    for s in contacts:
        st = pair.stratum_of(s)
        if st is not None:
            out.extend((tuple(s), lab) for lab in st.labels)
    return sorted(set(out))


def degree_zero_basis(pair: PairDescription, cx: DualComplex, bound: int) -> list[tuple[ConePoint, StateClass]]:
    """theta_p <-> [1]_{contact(p)} for p in B(Z) up to ``bound``."""
    return [(p, StateClass.unit(pair, p.contact)) for p in lattice_points(cx, bound)]
