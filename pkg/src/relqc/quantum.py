"""Quantum products, the genus-zero potential and the multi-grading."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable

from relqc.invariants import Insertion, InvariantEngine, InvariantKey, is_stable
from relqc.novikov import (NovikovTruncation, TMono, TruncatedSeries, tmono_degree, tmono_factorial,
                           tmono_mul)
from relqc.pair_geometry import Beta, PairDescription
from relqc.state_space import BasisKey, StateClass, basis_degree0, basis_over, dual_terms


def monomial_multidegree(pair: PairDescription, beta: Beta, mono: TMono = ()) -> tuple[Fraction, tuple]:
    """(deg0, (deg1..degn)) of q^beta * t-monomial."""
    deg0 = Fraction(pair.log_c1_degree(beta))
    degi = list(pair.D_degrees(beta))
    for key, e in mono:
        deg0 += e * (1 - basis_degree0(pair, key))
        for i, x in enumerate(key[0]):
            degi[i] -= e * x
    return deg0, tuple(degi)


def term_multidegree(pair: PairDescription, beta: Beta, mono: TMono, basis: BasisKey | None):
    d0, di = monomial_multidegree(pair, beta, mono)
    if basis is None:
        return d0, di
    return d0 + basis_degree0(pair, basis), tuple(a + b for a, b in zip(di, basis[0]))


def homogeneity_defects(series: TruncatedSeries, expected) -> list:
    """Terms whose multi-degree differs from ``expected``."""
    pair = series.trunc.pair
    return [(k, term_multidegree(pair, *k)) for k in series.terms
            if term_multidegree(pair, *k) != expected]


def t_monomials(basis: list[BasisKey], max_degree: int, min_degree: int = 0):
    for m in range(min_degree, max_degree + 1):
        for combo in itertools.combinations_with_replacement(basis, m):
            mono: dict = {}
            for k in combo:
                mono[k] = mono.get(k, 0) + 1
            yield tuple(sorted(mono.items())), list(combo)


class QuantumCohomology:
    """Products and potential over a truncation, with t-variables indexed by
    the basis over ``window`` (default: the table manifest's window)."""

    def __init__(self, engine: InvariantEngine, trunc: NovikovTruncation,
                 window: Iterable | None = None):
        self.engine = engine
        self.pair = engine.pair
        self.trunc = trunc
        if window is None:
            window = engine.table.manifest.window or [self.pair.zero_contact]
        self.window = [tuple(s) for s in window]
        self.t_basis: list[BasisKey] = basis_over(self.pair, self.window)
        self._cache: dict = {}

    # products -----------------------------------------------------------------
    def _basis_product(self, ka: BasisKey, kb: BasisKey, t_order: int) -> TruncatedSeries:
        ck = (ka, kb, t_order)
        if ck in self._cache:
            return self._cache[ck]
        pair = self.pair
        out = TruncatedSeries(self.trunc, t_order)
        for beta in self.trunc:
            dvec = pair.D_degrees(beta)
            for mono, combo in t_monomials(self.t_basis, t_order):
                s3 = tuple(dvec[i] - ka[0][i] - kb[0][i] - sum(k[0][i] for k in combo) for i in range(pair.n))
                st = pair.stratum_of(s3)
                if st is None:
                    continue
                fact = tmono_factorial(mono)
                for lab in st.labels:
                    key = InvariantKey.make(0, [Insertion(ka[0], ka[1]), Insertion(kb[0], kb[1]),
                                                Insertion(s3, lab)] + [Insertion(k[0], k[1]) for k in combo], beta)
                    if self.engine.killed(key):
                        continue
                    v = self.engine.value(key)
                    if not v:
                        continue
                    for dk, c in dual_terms(pair, s3, lab).items():
                        out.add_term(beta, mono, dk, v * c / fact)
        self._cache[ck] = out
        return out

    def big_product(self, a: StateClass, b: StateClass, t_order: int = 1) -> TruncatedSeries:
        out = TruncatedSeries(self.trunc, t_order)
        for ka, ca in a.items():
            for kb, cb in b.items():
                out = out + self._basis_product(ka, kb, t_order).scale(ca * cb)
        return out

    def small_product(self, a: StateClass, b: StateClass) -> TruncatedSeries:
        return self.big_product(a, b, 0)

    def star_series(self, x: TruncatedSeries, y: TruncatedSeries, t_order: int) -> TruncatedSeries:
        """Product of two vector-valued series, truncated at ``t_order``."""
        out = TruncatedSeries(self.trunc, t_order)
        for (b1, m1, k1), c1 in x.terms.items():
            for (b2, m2, k2), c2 in y.terms.items():
                beta = self.trunc.add(b1, b2)
                if beta is None:
                    continue
                rem = t_order - tmono_degree(m1) - tmono_degree(m2)
                if rem < 0:
                    continue
                coeff = TruncatedSeries(self.trunc, t_order, {(beta, tmono_mul(m1, m2), None): c1 * c2})
                out = out + coeff.mul_scalar_series(self._basis_product(k1, k2, rem), t_order)
        return out

    def as_series(self, a: StateClass, t_order: int) -> TruncatedSeries:
        return TruncatedSeries(self.trunc, t_order,
                               {(self.pair.zero_beta, (), k): c for k, c in a.items()})

    def associativity_residual(self, a: StateClass, b: StateClass, c: StateClass,
                               t_order: int = 1) -> TruncatedSeries:
        A, B, C = (self.as_series(x, t_order) for x in (a, b, c))
        left = self.star_series(self.star_series(A, B, t_order), C, t_order)
        right = self.star_series(A, self.star_series(B, C, t_order), t_order)
        return left - right

    # potential ------------------------------------------------------------------
    def potential_phi0(self, t_order: int = 4, min_points: int = 3) -> TruncatedSeries:
        """sum over m >= min_points of q^beta / m! <t, ..., t>_{0,m,beta}."""
        out = TruncatedSeries(self.trunc, t_order)
        for beta in self.trunc:
            for mono, combo in t_monomials(self.t_basis, t_order, max(min_points, 0)):
                if not is_stable(0, len(combo), beta):
                    continue
                key = InvariantKey.make(0, [Insertion(k[0], k[1]) for k in combo], beta)
                if self.engine.killed(key):
                    continue
                v = self.engine.value(key)
                if v:
                    out.add_term(beta, mono, None, v / tmono_factorial(mono))
        return out

    def gradient(self, potential: TruncatedSeries) -> TruncatedSeries:
        """sum_alpha (d potential / d t_alpha) T^alpha as a vector series."""
        out = TruncatedSeries(self.trunc, max(potential.t_order - 1, 0))
        for (beta, mono, _), c in potential.terms.items():
            for i, (k, e) in enumerate(mono):
                rest = list(mono)
                if e == 1:
                    rest.pop(i)
                else:
                    rest[i] = (k, e - 1)
                for dk, dc in dual_terms(self.pair, k[0], k[1]).items():
                    out.add_term(beta, tuple(rest), dk, c * e * dc)
        return out

