"""Artinian truncations S_I of the Novikov ring and truncated series over them."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from relqc.errors import ConfigurationError
from relqc.pair_geometry import Beta, PairDescription

# a t-monomial is a sorted tuple of ((s, label), exponent)
TMono = tuple


class NovikovTruncation:
    """S_I = Q[P]/I with P the effective monoid and I a monoid ideal.

    Give either ``bound`` (I = classes of curve weight >= bound) or
    ``ideal_generators`` (I = ideal generated by those classes).
    """

    MAX_ELEMENTS = 100_000

    def __init__(self, pair: PairDescription, bound: int | None = None,
                 ideal_generators: Iterable[Beta] | None = None):
        if (bound is None) == (ideal_generators is None):
            raise ConfigurationError("give exactly one of bound / ideal_generators")
        self.pair = pair
        self.bound = bound
        self.ideal_generators = None if ideal_generators is None else [tuple(g) for g in ideal_generators]
        self.elements: tuple[Beta, ...] = self._enumerate()
        self._set = frozenset(self.elements)

    @classmethod
    def below(cls, pair: PairDescription, beta: Beta) -> "NovikovTruncation":
        """Truncation whose complement is every class <= beta."""
        t = cls.__new__(cls)
        t.pair = pair
        t.bound = None
        t.ideal_generators = None
        t.elements = tuple(pair.classes_below(beta))
        t._set = frozenset(t.elements)
        return t

    def in_ideal(self, beta: Beta) -> bool:
        if self.bound is not None:
            return self.pair.weight(beta) >= self.bound
        return any(self.pair.contains(tuple(b - g for b, g in zip(beta, gen)))
                   for gen in self.ideal_generators)

    def _enumerate(self) -> tuple[Beta, ...]:
        zero = self.pair.zero_beta
        if self.in_ideal(zero):
            return ()
        seen = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.pair.effective_generators:
                    y = tuple(a + b for a, b in zip(x, g))
                    if y not in seen and not self.in_ideal(y):
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > self.MAX_ELEMENTS:
                            raise ConfigurationError("truncation is not Artinian (P minus I looks infinite)")
            frontier = nxt
        return tuple(sorted(seen, key=lambda b: (self.pair.weight(b), b)))

    def __contains__(self, beta) -> bool:
        return tuple(beta) in self._set

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def add(self, b1: Beta, b2: Beta) -> Beta | None:
        b = tuple(x + y for x, y in zip(b1, b2))
        return b if b in self._set else None

    def describe(self) -> str:
        if self.bound is not None:
            return f"q-weight < {self.bound}"
        if self.ideal_generators is not None:
            return f"ideal {self.ideal_generators}"
        return f"classes {list(self.elements)}"


def tmono_mul(a: TMono, b: TMono) -> TMono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


def tmono_degree(m: TMono) -> int:
    return sum(e for _, e in m)


def tmono_factorial(m: TMono) -> int:
    out = 1
    for _, e in m:
        for i in range(2, e + 1):
            out *= i
    return out


def tmono_str(m: TMono) -> str:
    parts = []
    for (s, lab), e in m:
        name = f"t[{lab}]_{list(s)}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) or "1"


def q_str(beta: Beta) -> str:
    if not any(beta):
        return "1"
    if len(beta) == 1:
        return "q" if beta[0] == 1 else f"q^{beta[0]}"
    return "*".join((f"q{i + 1}" if b == 1 else f"q{i + 1}^{b}") for i, b in enumerate(beta) if b)


class TruncatedSeries:
    """Finite map (q^beta, t-monomial, basis key or None) -> Fraction.

    Scalar series use ``None`` in the basis slot.  All q-exponents lie in the
    truncation and all t-degrees are at most ``t_order``.
    """

    def __init__(self, trunc: NovikovTruncation, t_order: int, terms: dict | None = None):
        self.trunc = trunc
        self.t_order = t_order
        self.terms: dict = {}
        for k, c in (terms or {}).items():
            self.add_term(k[0], k[1], k[2], c)

    def add_term(self, beta: Beta, mono: TMono, basis, c) -> None:
        if not c:
            return
        beta = tuple(beta)
        if beta not in self.trunc or tmono_degree(mono) > self.t_order:
            return
        key = (beta, mono, basis)
        v = self.terms.get(key, 0) + c
        if v:
            self.terms[key] = v
        else:
            self.terms.pop(key, None)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out = self.copy()
        for (b, m, k), c in other.terms.items():
            out.add_term(b, m, k, c)
        return out

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "TruncatedSeries":
        out = TruncatedSeries(self.trunc, self.t_order)
        out.terms = {k: v * c for k, v in self.terms.items() if v * c}
        return out

    def copy(self) -> "TruncatedSeries":
        out = TruncatedSeries(self.trunc, self.t_order)
        out.terms = dict(self.terms)
        return out

    def mul_scalar_series(self, other: "TruncatedSeries", t_order: int | None = None) -> "TruncatedSeries":
        """Product where at most one factor is vector-valued.

        The result is truncated at ``t_order`` (default: the larger order).
        """
        if t_order is None:
            t_order = max(self.t_order, other.t_order)
        out = TruncatedSeries(self.trunc, t_order)
        for (b1, m1, k1), c1 in self.terms.items():
            for (b2, m2, k2), c2 in other.terms.items():
                if k1 is not None and k2 is not None:
                    raise ValueError("cannot multiply two vector-valued series")
                b = self.trunc.add(b1, b2)
                if b is None:
                    continue
                m = tmono_mul(m1, m2)
                if tmono_degree(m) > out.t_order:
                    continue
                out.add_term(b, m, k1 if k1 is not None else k2, c1 * c2)
        return out

    def coefficient(self, beta: Beta, mono: TMono = (), basis=None) -> Fraction:
        return self.terms.get((tuple(beta), mono, basis), Fraction(0))

    def max_abs(self) -> Fraction:
        return max((abs(c) for c in self.terms.values()), default=Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.terms == other.terms

    def sorted_items(self):
        def key(item):
            (b, m, k), _ = item
            return (b, tmono_degree(m), m, (0,) if k is None else (1, k))
        return sorted(self.terms.items(), key=key)

    def to_json(self) -> list[dict]:
        out = []
        for (b, m, k), c in self.sorted_items():
            d = {"beta": list(b), "t": [{"s": list(s), "label": lab, "exp": e} for (s, lab), e in m],
                 "coeff": str(c)}
            if k is not None:
                d["class"] = {"s": list(k[0]), "label": k[1]}
            out.append(d)
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (b, m, k), c in self.sorted_items():
            mon = [x for x in (q_str(b), tmono_str(m)) if x != "1"]
            if k is not None:
                mon.append(f"[{k[1]}]_{list(k[0])}")
            body = "*".join(mon) or "1"
            parts.append(f"{c}*{body}" if c != 1 else body)
        return " + ".join(parts)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficients_by_q(self) -> dict:
        out: dict = {}
        for (b, m, k), c in self.terms.items():
            out.setdefault(b, {})[(m, k)] = c
        return out
