"""Loop-space formalism: the symplectic form, the J-function, and the
Virasoro operators with their symplecticity, commutation and genus-zero
constraint checks.

A vector of the loop space is a finite combination of ``T z^a`` with ``T``
a basis element ``(s, label)`` and ``a`` an integer.  Windows are closed
ranges ``(lo, hi)`` of z-powers; anything that would leave a window raises
:class:`TruncationOverflow`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from relqc.errors import ConfigurationError, TruncationOverflow
from relqc.invariants import Insertion, InvariantKey, is_stable
from relqc.novikov import TruncatedSeries, tmono_degree, tmono_factorial
from relqc.pair_geometry import PairDescription
from relqc.quantum import QuantumCohomology, t_monomials
from relqc.state_space import (BasisKey, StateClass, basis_over, dual_terms, hodge_p, pair_basis,
                               pair_classes)

Window = tuple[int, int]
LoopKey = tuple[BasisKey, int]  # (basis element, z-power)


# -- z-series -----------------------------------------------------------------------

class ZSeries:
    """Finite map z-power -> StateClass with a declared window."""

    def __init__(self, pair: PairDescription, window: Window, terms: dict | None = None):
        self.pair = pair
        self.window = (int(window[0]), int(window[1]))
        self.terms: dict[int, StateClass] = {}
        for a, c in (terms or {}).items():
            self._put(a, c)

    def _put(self, a: int, c: StateClass) -> None:
        if not c:
            return
        if not self.window[0] <= a <= self.window[1]:
            raise TruncationOverflow(f"z^{a} is outside the window {list(self.window)}")
        prev = self.terms.get(a)
        new = c if prev is None else prev + c
        if new:
            self.terms[a] = new
        else:
            self.terms.pop(a, None)

    @classmethod
    def monomial(cls, pair: PairDescription, window: Window, key: BasisKey, a: int, coeff=1) -> "ZSeries":
        return cls(pair, window, {a: StateClass(pair, {key: coeff})})

    @classmethod
    def from_loop(cls, pair: PairDescription, window: Window, vec: dict) -> "ZSeries":
        out = cls(pair, window)
        for (key, a), c in vec.items():
            out._put(a, StateClass(pair, {key: c}))
        return out

    def loop_terms(self) -> dict:
        return {(k, a): c for a, cls_ in self.terms.items() for k, c in cls_.terms.items()}

    def __add__(self, other: "ZSeries") -> "ZSeries":
        out = ZSeries(self.pair, self.window, dict(self.terms))
        for a, c in other.terms.items():
            out._put(a, c)
        return out

    def scale(self, c) -> "ZSeries":
        return ZSeries(self.pair, self.window, {a: x.scale(c) for a, x in self.terms.items()})

    def __sub__(self, other: "ZSeries") -> "ZSeries":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZSeries):
            return NotImplemented
        return self.terms == other.terms

    def plus_part(self) -> "ZSeries":
        return ZSeries(self.pair, self.window, {a: c for a, c in self.terms.items() if a >= 0})

    def minus_part(self) -> "ZSeries":
        return ZSeries(self.pair, self.window, {a: c for a, c in self.terms.items() if a < 0})

    def at_minus_z(self) -> "ZSeries":
        """f(-z), within the same window."""
        return ZSeries(self.pair, self.window, {a: c.scale((-1) ** (a % 2)) for a, c in self.terms.items()})

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({self.terms[a]!r})*z^{a}" for a in sorted(self.terms))


def symplectic_form(f: ZSeries, g: ZSeries) -> Fraction:
    """Residue at z = 0 of (f(-z), g(z)) dz."""
    total = Fraction(0)
    for a, fa in f.terms.items():
        gb = g.terms.get(-1 - a)
        if gb is not None:
            total += (-1) ** (a % 2) * pair_classes(fa, gb)
    return total


def _omega_loop(pair: PairDescription, f: dict, g: dict) -> Fraction:
    """Symplectic form on raw loop vectors {(key, a): c} (no window)."""
    total = Fraction(0)
    for (k1, a), c1 in f.items():
        neg = tuple(-x for x in k1[0])
        for (k2, b), c2 in g.items():
            if a + b == -1 and k2[0] == neg:
                total += (-1) ** (a % 2) * c1 * c2 * pair_basis(pair, k1, k2)
    return total


# -- linear operators ---------------------------------------------------------------

class LinearOperator:
    """Linear map on the loop space given by its action on ``T z^a``.

    ``shift`` is the range of z-power changes of the output and
    ``excursion`` the range reached by any intermediate step; together they
    give the part of a window where the operator can be applied exactly.
    """

    def __init__(self, action: Callable[[BasisKey, int], dict], shift: Window,
                 excursion: Window | None = None, name: str = "A"):
        self._action = action
        self.shift = shift
        self.excursion = excursion or (min(0, shift[0]), max(0, shift[1]))
        self.name = name
        self._memo: dict = {}

    def apply_basis(self, key: BasisKey, a: int) -> dict:
        ck = (key, a)
        if ck not in self._memo:
            self._memo[ck] = {k: c for k, c in self._action(key, a).items() if c}
        return self._memo[ck]

    def apply_loop(self, vec: dict) -> dict:
        out: dict = {}
        for (key, a), c in vec.items():
            for k2, c2 in self.apply_basis(key, a).items():
                v = out.get(k2, 0) + c * c2
                if v:
                    out[k2] = v
                else:
                    out.pop(k2, None)
        return out

    def domain(self, window: Window) -> range:
        """Input powers a for which every intermediate power stays in the window."""
        return range(window[0] - self.excursion[0], window[1] - self.excursion[1] + 1)

    def __call__(self, f: ZSeries) -> ZSeries:
        dom = self.domain(f.window)
        bad = [a for a in f.terms if a not in dom]
        if bad:
            raise TruncationOverflow(f"{self.name} applied to z^{min(bad)} leaves the window {list(f.window)}")
        return ZSeries.from_loop(f.pair, f.window, self.apply_loop(f.loop_terms()))

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        """Composition self o other."""
        a, b = self, other

        def act(key, p):
            return a.apply_loop(b.apply_basis(key, p))
        shift = (a.shift[0] + b.shift[0], a.shift[1] + b.shift[1])
        exc = (min(b.excursion[0], b.shift[0] + a.excursion[0]), max(b.excursion[1], b.shift[1] + a.excursion[1]))
        return LinearOperator(act, shift, exc, f"{a.name}*{b.name}")

    def combine(self, other: "LinearOperator", c_self=1, c_other=1) -> "LinearOperator":
        a, b = self, other

        def act(key, p):
            out = {k: c_self * c for k, c in a.apply_basis(key, p).items()}
            for k, c in b.apply_basis(key, p).items():
                out[k] = out.get(k, 0) + c_other * c
            return out
        shift = (min(a.shift[0], b.shift[0]), max(a.shift[1], b.shift[1]))
        exc = (min(a.excursion[0], b.excursion[0]), max(a.excursion[1], b.excursion[1]))
        return LinearOperator(act, shift, exc, f"({a.name}+{b.name})")

    def __add__(self, other):
        return self.combine(other)

    def __sub__(self, other):
        return self.combine(other, 1, -1)

    def scale(self, c) -> "LinearOperator":
        return LinearOperator(lambda key, p: {k: c * x for k, x in self.apply_basis(key, p).items()},
                              self.shift, self.excursion, f"{c}*{self.name}")


def z_power(k: int) -> LinearOperator:
    return LinearOperator(lambda key, a: {(key, a + k): Fraction(1)}, (k, k), name=f"z^{k}")


def euler(half: bool = True) -> LinearOperator:
    """z d/dz, plus 1/2 when ``half``."""
    extra = Fraction(1, 2) if half else Fraction(0)
    return LinearOperator(lambda key, a: {(key, a): a + extra}, (0, 0), name="zd/dz" + ("+1/2" if half else ""))


def mu_value(pair: PairDescription, key: BasisKey, sign: int = 1) -> Fraction:
    """dim/2 - p - #{i: s_i < 0}, times ``sign``."""
    s = key[0]
    v = Fraction(pair.ambient_dim, 2) - hodge_p(pair, key) - sum(1 for x in s if x < 0)
    return sign * v


def mu_operator(pair: PairDescription, sign: int = 1) -> LinearOperator:
    return LinearOperator(lambda key, a: {(key, a): mu_value(pair, key, sign)}, (0, 0), name="mu")


def _has_rho(pair: PairDescription) -> bool:
    for st in pair.strata.values():
        if st.log_c1 is None:
            raise ConfigurationError(f"stratum {list(st.index)} has no log_c1 data; rho is undefined")
        if any(st.log_c1):
            return True
    return False


def rho_over_z(pair: PairDescription) -> LinearOperator:
    """rho / z with rho the cup product by c1(T_X(-log D)) on each stratum."""
    if not _has_rho(pair):
        return LinearOperator(lambda key, a: {}, (0, 0), name="rho/z")

    def act(key, a):
        s, lab = key
        st = pair.stratum_of(s)
        if not st.log_c1 or not any(st.log_c1):
            return {}
        return {((s, l2), a - 1): c for l2, c in st.cup("c1log", lab).items()}
    return LinearOperator(act, (-1, -1), name="rho/z")


def virasoro_operator(pair: PairDescription, m: int, mu_sign: int = 1) -> LinearOperator:
    """l_{-1} = 1/z; l_0 = z d/dz + 1/2 + mu + rho/z; l_m = l_0 (z l_0)^m."""
    if m < -1:
        raise ValueError("m must be >= -1")
    if m == -1:
        op = z_power(-1)
        op.name = "l_-1"
        return op
    l0 = euler() + mu_operator(pair, mu_sign) + rho_over_z(pair)
    l0.name = "l_0"
    op = l0
    zl0 = z_power(1) @ l0
    for _ in range(m):
        op = op @ zl0
    op.name = f"l_{m}"
    return op


def loop_basis(pair: PairDescription, contacts: Iterable, powers: Iterable[int]) -> list[LoopKey]:
    keys = basis_over(pair, contacts)
    return [(k, a) for a in powers for k in keys]


def symmetric_contacts(contacts: Iterable) -> list:
    cs = {tuple(c) for c in contacts}
    cs |= {tuple(-x for x in c) for c in cs}
    return sorted(cs)


def symplecticity_residual(pair: PairDescription, op: LinearOperator, window: Window,
                           contacts: Iterable) -> tuple[Fraction, int]:
    """max |Omega(A f, g) + Omega(f, A g)| over basis pairs in the operator's
    domain; also returns the number of pairs checked."""
    contacts = symmetric_contacts(contacts)
    dom = op.domain(window)
    basis = loop_basis(pair, contacts, dom)
    by_contact: dict = {}
    for k, a in basis:
        by_contact.setdefault(k[0], []).append((k, a))
    worst = Fraction(0)
    checked = 0
    for f in basis:
        af = op.apply_basis(*f)
        neg = tuple(-x for x in f[0][0])
        for g in by_contact.get(neg, []):
            checked += 1
            r = _omega_loop(pair, af, {g: 1}) + _omega_loop(pair, {f: 1}, op.apply_basis(*g))
            worst = max(worst, abs(r))
    return worst, checked


def commutator(a: LinearOperator, b: LinearOperator) -> LinearOperator:
    return (a @ b) - (b @ a)


def commutation_residual(pair: PairDescription, m: int, n: int, window: Window, contacts: Iterable,
                         c: int = 1, mu_sign: int = 1) -> tuple[Fraction, int]:
    """max coefficient of ([l_m, l_n] - c (n - m) l_{m+n}) on the window basis."""
    lm, ln = virasoro_operator(pair, m, mu_sign), virasoro_operator(pair, n, mu_sign)
    res = commutator(lm, ln)
    if m + n >= -1:
        res = res - virasoro_operator(pair, m + n, mu_sign).scale(c * (n - m))
    elif n != m:
        raise ValueError("l_{m+n} is undefined for m + n < -1")
    worst = Fraction(0)
    count = 0
    for key, a in loop_basis(pair, symmetric_contacts(contacts), res.domain(window)):
        count += 1
        for v in res.apply_basis(key, a).values():
            worst = max(worst, abs(v))
    return worst, count


def calibrate_bracket_sign(pair: PairDescription, window: Window, contacts: Iterable,
                           mu_sign: int = 1) -> int | None:
    """The sign c with [l_0, l_1] = c l_1 on the window, or None if neither works."""
    for c in (1, -1):
        if commutation_residual(pair, 0, 1, window, contacts, c, mu_sign)[0] == 0:
            return c
    return None


def isotropy_residuals(pair: PairDescription, window: Window, contacts: Iterable) -> tuple[Fraction, Fraction]:
    """max |Omega| on pairs inside H_+ and inside H_- of the window."""
    basis = loop_basis(pair, symmetric_contacts(contacts), range(window[0], window[1] + 1))
    plus = [b for b in basis if b[1] >= 0]
    minus = [b for b in basis if b[1] < 0]

    def worst(group):
        w = Fraction(0)
        for f, g in itertools.product(group, repeat=2):
            w = max(w, abs(_omega_loop(pair, {f: 1}, {g: 1})))
        return w
    return worst(plus), worst(minus)


# -- descendant data -----------------------------------------------------------------

def descendant_vector(qc: QuantumCohomology, k: int, t_order: int, min_points: int = 3) -> TruncatedSeries:
    """sum over beta, n of q^beta / n! <T_alpha psi^k, t^n>_{0,n+1,beta} T^alpha.

    ``alpha`` runs over every basis element allowed by contact balance; only
    (n + 1)-point invariants with n + 1 >= min_points are included.
    """
    pair = qc.pair
    out = TruncatedSeries(qc.trunc, t_order)
    for beta in qc.trunc:
        dvec = pair.D_degrees(beta)
        for mono, combo in t_monomials(qc.t_basis, t_order, max(min_points - 1, 0)):
            if not is_stable(0, len(combo) + 1, beta):
                continue
            s = tuple(dvec[i] - sum(c[0][i] for c in combo) for i in range(pair.n))
            st = pair.stratum_of(s)
            if st is None:
                continue
            fact = tmono_factorial(mono)
            for lab in st.labels:
                key = InvariantKey.make(0, [Insertion(s, lab, k)] + [Insertion(c[0], c[1]) for c in combo], beta)
                if qc.engine.killed(key):
                    continue
                v = qc.engine.value(key)
                if v:
                    for dk, dc in dual_terms(pair, s, lab).items():
                        out.add_term(beta, mono, dk, v * dc / fact)
    return out


@dataclass
class JFunction:
    """J as a map z-power -> vector-valued series over S_I[t]."""

    qc: QuantumCohomology
    t_order: int
    z_window: Window
    terms: dict  # power -> TruncatedSeries

    def coefficient(self, a: int) -> TruncatedSeries:
        return self.terms.get(a, TruncatedSeries(self.qc.trunc, self.t_order))

    def minus_level(self, k: int) -> TruncatedSeries:
        """Coefficient of (-z)^(-1-k)."""
        return self.coefficient(-1 - k).scale((-1) ** ((1 + k) % 2))

    def specialize(self, t: StateClass) -> dict:
        """Evaluate the formal t variables at the class ``t``: power -> {beta: StateClass}."""
        coords = dict(t.terms)
        extra = [k for k in coords if k not in set(self.qc.t_basis)]
        if extra:
            raise ConfigurationError(f"t has components outside the t-variable window: {extra}")
        out: dict = {}
        for a, ser in self.terms.items():
            for (beta, mono, key), c in ser.terms.items():
                val = c
                for var, e in mono:
                    val *= coords.get(var, 0) ** e
                if val:
                    slot = out.setdefault(a, {}).setdefault(beta, {})
                    slot[key] = slot.get(key, 0) + val
        return {a: {b: StateClass(self.qc.pair, v) for b, v in d.items()} for a, d in out.items()}


def j_function(qc: QuantumCohomology, t_order: int, z_window: Window) -> JFunction:
    """z + t + sum q^beta / n! <T_alpha / (-z - psi), t, ..., t> T^alpha.

    1/(-z - psi) = sum_k (-1)^(k+1) psi^k z^(-1-k); descendant levels are
    taken down to the lower end of ``z_window``.  A nonzero level beyond it
    raises TruncationOverflow.
    """
    pair = qc.pair
    lo, hi = z_window
    if hi < 1:
        raise TruncationOverflow("the z-window must contain z^1")
    terms: dict = {}
    z1 = TruncatedSeries(qc.trunc, t_order)
    for lab, c in pair.strata[()].unit.items():
        z1.add_term(pair.zero_beta, (), (pair.zero_contact, lab), c)
    terms[1] = z1
    t0 = TruncatedSeries(qc.trunc, t_order)
    if t_order >= 1:
        for k in qc.t_basis:
            t0.add_term(pair.zero_beta, ((k, 1),), k, 1)
    terms[0] = t0
    max_level = -1 - lo
    for k in range(max_psi_power(qc, t_order) + 1):
        vec = descendant_vector(qc, k, t_order, min_points=1)
        if k > max_level:
            if vec:
                raise TruncationOverflow(f"J has a nonzero z^{-1 - k} term outside the window {list(z_window)}")
            continue
        terms[-1 - k] = vec.scale((-1) ** ((k + 1) % 2))
    return JFunction(qc, t_order, z_window, {a: s for a, s in terms.items() if s})


def max_psi_power(qc: QuantumCohomology, t_order: int) -> int:
    """Largest psi power the virtual dimension allows on one insertion of a
    genus-0 invariant with at most t_order + 1 points (all degrees >= 0)."""
    pair = qc.pair
    return max(pair.ambient_dim - 3 + t_order + 1 + pair.log_c1_degree(b) for b in qc.trunc)


def graph_check(qc: QuantumCohomology, t_order: int, z_window: Window) -> dict:
    """Compare the (-z)^-1 part of J with the gradient of the genus-0 potential.

    Returns the maximal mismatch against the potential with one- and
    two-point terms (``full``), and against the three-point-minimum
    potential (``phi0``) on the t-variable window.
    """
    jf = j_function(qc, t_order, z_window)
    level0 = _restrict_dual(qc, jf.minus_level(0))
    out = {}
    for name, mp in (("full", 1), ("phi0", 3)):
        grad = qc.gradient(qc.potential_phi0(t_order + 1, min_points=mp))
        diff = level0 - _restrict_dual(qc, grad)
        out[name] = {"max_mismatch": diff.max_abs(), "mismatched_terms": len(diff.terms)}
    out["checked_terms"] = len(level0.terms)
    return out


def _restrict_dual(qc: QuantumCohomology, vec: TruncatedSeries) -> TruncatedSeries:
    """Keep only components along T^alpha with alpha in the t-variable window."""
    window = {tuple(-x for x in s) for s in qc.window}
    out = TruncatedSeries(qc.trunc, vec.t_order)
    for (b, m, k), c in vec.terms.items():
        if k is not None and k[0] in window:
            out.add_term(b, m, k, c)
    return out


# -- genus-zero Virasoro residual ------------------------------------------------------

def _q_vector(key: BasisKey, level: int) -> dict:
    return {(key, level): Fraction(1)}


def _p_vector(pair: PairDescription, key: BasisKey, level: int) -> dict:
    """T^key (-z)^(-1-level)."""
    sign = (-1) ** ((1 + level) % 2)
    return {(dk, -1 - level): sign * c for dk, c in dual_terms(pair, key[0], key[1]).items()}


def darboux_hamiltonian(pair: PairDescription, op: LinearOperator, coords: Sequence[tuple]) -> dict:
    """Coefficients of h(f) = Omega(A f, f) / 2 in the Darboux coordinates
    ``('q', level, key)`` and ``('p', level, key)`` of
    f = sum q_{l,a} T_a z^l + sum p_{l,a} T^a (-z)^(-1-l)."""
    vecs = {c: (_q_vector(c[2], c[1]) if c[0] == "q" else _p_vector(pair, c[2], c[1])) for c in coords}
    images = {c: op.apply_loop(v) for c, v in vecs.items()}
    contact = {c: (c[2][0] if c[0] == "q" else tuple(-x for x in c[2][0])) for c in coords}
    by_contact: dict = {}
    for c in coords:
        by_contact.setdefault(contact[c], []).append(c)
    ham: dict = {}
    for c1 in coords:
        neg = tuple(-x for x in contact[c1])
        for c2 in by_contact.get(neg, []):
            w = _omega_loop(pair, images[c1], vecs[c2]) / 2
            if w:
                key = tuple(sorted((c1, c2)))
                ham[key] = ham.get(key, 0) + w
    return {k: v for k, v in ham.items() if v}


def genus0_virasoro_residual(qc: QuantumCohomology, m: int, t_order: int, potential: str = "phi0",
                             mu_sign: int = 1) -> dict:
    """hbar^-1 coefficient of exp(-F/hbar) L_m exp(F/hbar) on the truncation.

    The quadratic Hamiltonian of l_m is quantized by q q -> q q / hbar,
    q p -> q d/dq and p p -> hbar d^2/dq dq, so the hbar^-1 coefficient is
    the Hamiltonian with p replaced by derivatives of F.  The point is
    q_0 = t, q_1 = -[1]_0 (dilaton shift at t_1 = 0), q_l = 0 for l >= 2.

    ``potential`` is ``phi0`` (at least three points), ``full`` (all stable
    genus-0 terms) or ``zero`` (F = 0, leaving the classical part).
    """
    pair = qc.pair
    op = virasoro_operator(pair, m, mu_sign)
    levels = 1 + max(m, 0)
    min_points = {"phi0": 3, "full": 1}.get(potential)
    values: dict = {}
    for k in qc.t_basis:
        values[("q", 0, k)] = TruncatedSeries(qc.trunc, t_order, {(pair.zero_beta, ((k, 1),), None): 1})
    for lab, c in pair.strata[()].unit.items():
        values[("q", 1, (pair.zero_contact, lab))] = TruncatedSeries(qc.trunc, t_order, {(pair.zero_beta, (), None): -c})
    if potential != "zero":
        if min_points is None:
            raise ValueError(f"unknown potential {potential!r}")
        for lvl in range(levels + 1):
            vec = descendant_vector(qc, lvl, t_order, min_points=min_points)
            for key, ser in _coordinates_of(pair, vec).items():
                values[("p", lvl, key)] = ser
    coords = sorted(values)
    ham = darboux_hamiltonian(pair, op, coords)
    res = TruncatedSeries(qc.trunc, t_order)
    for (c1, c2), w in ham.items():
        res = res + values[c1].mul_scalar_series(values[c2], t_order).scale(w)
    classical = TruncatedSeries(qc.trunc, t_order)
    for (c1, c2), w in ham.items():
        if c1[0] == "q" and c2[0] == "q":
            classical = classical + values[c1].mul_scalar_series(values[c2], t_order).scale(w)
    return {"m": m, "t_order": t_order, "potential": potential, "mu_sign": mu_sign,
            "residual": res, "max_abs": res.max_abs(), "classical": classical,
            "hamiltonian_terms": len(ham), "coordinates": len(coords)}


def _coordinates_of(pair: PairDescription, vec: TruncatedSeries) -> dict:
    """Split sum_alpha c_alpha T^alpha into scalar series c_alpha, using
    c_alpha = (vector, T_alpha)."""
    out: dict = {}
    for (b, m, k), c in vec.terms.items():
        s = tuple(-x for x in k[0])
        st = pair.stratum_of(s)
        for lab in st.labels:
            w = pair_basis(pair, k, (s, lab))
            if w:
                ser = out.setdefault((s, lab), TruncatedSeries(vec.trunc, vec.t_order))
                ser.add_term(b, m, None, c * w)
    return {k: v for k, v in out.items() if v}
