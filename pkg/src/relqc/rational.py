"""Exact rational helpers: parsing, formatting and small linear algebra.

Matrix work goes through sympy's DomainMatrix over QQ; everything crossing
the module boundary is a ``fractions.Fraction``.
"""

from __future__ import annotations

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def parse_rational(value) -> Fraction:
    """Accept ints and strings like ``"3"``, ``"-2/5"``; reject floats."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"not a rational: {value!r}")


def fmt(x: Fraction) -> str:
    return str(Fraction(x))


def _to_dm(rows) -> DomainMatrix:
    return DomainMatrix([[QQ(int(Fraction(x).numerator), int(Fraction(x).denominator)) for x in row] for row in rows],
                        (len(rows), len(rows[0]) if rows else 0), QQ)


def _from_qq(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def inverse(rows) -> list[list[Fraction]]:
    """Inverse of a square rational matrix; ValueError if singular."""
    n = len(rows)
    if n == 0:
        return []
    dm = _to_dm(rows)
    if dm.rank() < n:
        raise ValueError("singular matrix")
    inv = dm.inv().to_Matrix().tolist()
    return [[Fraction(str(x)) for x in row] for row in inv]


def rank(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return _to_dm(rows).rank()


def nullspace(rows, ncols: int) -> list[list[Fraction]]:
    """Basis of {v : rows . v = 0}, one vector per free column of the RREF.

    Each basis vector has a 1 in its free column and zeros in the other free
    columns, so pivots fall on the leftmost columns.
    """
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    dm = _to_dm(rows)
    rref, pivots = dm.rref()
    mat = rref.to_list()
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -_from_qq(mat[r][f])
        basis.append(v)
    return basis


class SpanTracker:
    """Incrementally maintained row-reduced basis of a subspace of Q^n.

    Vectors are sparse dicts column -> Fraction.
    """

    def __init__(self):
        self._rows: dict = {}  # pivot column -> normalized row

    def reduce(self, vec: dict) -> dict:
        v = {k: c for k, c in vec.items() if c}
        for col, row in self._rows.items():
            c = v.get(col)
            if c:
                for k, x in row.items():
                    nv = v.get(k, 0) - c * x
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        return v

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def add(self, vec: dict) -> bool:
        """Add ``vec``; return False if it was already in the span."""
        v = self.reduce(vec)
        if not v:
            return False
        col = min(v)
        c = v[col]
        row = {k: x / c for k, x in v.items()}
        for pc, other in self._rows.items():
            oc = other.get(col)
            if oc:
                for k, x in row.items():
                    nv = other.get(k, 0) - oc * x
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
        self._rows[col] = row
        return True

    def __len__(self) -> int:
        return len(self._rows)
