"""Reference fixtures and the independent oracle that produces their tables.

(P^1, {0} + {infinity})
    Invariants are computed in the Laurent model Q[q][z, q/z] of the mirror:
    theta_{a v1} = z^a and theta_{b v2} = q^b z^{-b}.  Three-point values are
    the structure constants of that ring, two-point values follow from the
    divisor equation, and four-point values come from the first-order
    deformation

        theta_{a v1}(y) = z^a + sum_u y_u (a - u)_+ z^{a-u}

    (symmetrically on the second ray; no cross-ray terms), read off as the
    coboundary of the deformation against the product.  None of this code is
    shared with the engine.

(P^2, line)
    Every structure constant of nonzero class is killed by the virtual
    dimension, so the table holds only the degree-zero constants
    <[1]_a, [1]_b, [pt]_{-(a+b)}>_0 = 1.

Run ``python -m relqc.fixtures OUTDIR`` to regenerate the files.
"""

from __future__ import annotations

import itertools
import sys
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

from relqc.invariants import InvariantKey, InvariantTable, TableManifest, store_table
from relqc.pair_geometry import PairDescription, store_pair

# -- pair descriptions -----------------------------------------------------------


def p1_pair_dict() -> dict:
    point = {"basis": [{"label": "1", "degree": 0}], "pairing": [["1"]],
             "cup_tables": {"pt": [["0"]]}, "log_c1": ["0"]}
    return {
        "name": "P1 with D = 0 + infinity",
        "n": 2,
        "ambient_dim": 1,
        "curve_lattice_rank": 1,
        "effective_generators": [[1]],
        "intersection_numbers": [{"D": [1, 1], "c1": 2, "KD": 0}],
        "divisor_degrees": {"pt": [1]},
        "nef": "log_cy",
        "strata": [
            {"index": [], "basis": [{"label": "1", "degree": 0}, {"label": "pt", "degree": 2}],
             "pairing": [["0", "1"], ["1", "0"]],
             "cup_tables": {"pt": [["0", "1"], ["0", "0"]]},
             "log_c1": ["0", "0"]},
            dict(point, index=[0]),
            dict(point, index=[1]),
        ],
    }


def p2_line_pair_dict() -> dict:
    return {
        "name": "P2 with D = line",
        "n": 1,
        "ambient_dim": 2,
        "curve_lattice_rank": 1,
        "effective_generators": [[1]],
        "intersection_numbers": [{"D": [1], "c1": 3, "KD": -2}],
        "divisor_degrees": {"H": [1]},
        "strata": [
            {"index": [],
             "basis": [{"label": "1", "degree": 0}, {"label": "H", "degree": 2}, {"label": "pt", "degree": 4}],
             "pairing": [["0", "0", "1"], ["0", "1", "0"], ["1", "0", "0"]],
             "cup_tables": {"H": [["0", "1", "0"], ["0", "0", "1"], ["0", "0", "0"]],
                            "c1log": [["0", "2", "0"], ["0", "0", "2"], ["0", "0", "0"]]},
             "log_c1": ["0", "2", "0"]},
            {"index": [0],
             "basis": [{"label": "1", "degree": 0}, {"label": "pt", "degree": 2}],
             "pairing": [["0", "1"], ["1", "0"]],
             "cup_tables": {"H": [["0", "1"], ["0", "0"]], "c1log": [["0", "2"], ["0", "0"]]},
             "log_c1": ["0", "2"]},
        ],
    }


def p2_quartic_pair_dict() -> dict:
    """Only the curve data matter here: used for the nef classification."""
    d = p2_line_pair_dict()
    d["name"] = "P2 with D = quartic"
    d["intersection_numbers"] = [{"D": [4], "c1": 3, "KD": 1}]
    return d


def p2_two_lines_pair_dict() -> dict:
    """P^2 with two lines meeting in a point: the cone B is two-dimensional."""
    line = {"basis": [{"label": "1", "degree": 0}, {"label": "pt", "degree": 2}],
            "pairing": [["0", "1"], ["1", "0"]],
            "cup_tables": {"H": [["0", "1"], ["0", "0"]], "c1log": [["0", "1"], ["0", "0"]]},
            "log_c1": ["0", "1"]}
    return {
        "name": "P2 with D = two lines",
        "n": 2,
        "ambient_dim": 2,
        "curve_lattice_rank": 1,
        "effective_generators": [[1]],
        "intersection_numbers": [{"D": [1, 1], "c1": 3, "KD": -1}],
        "divisor_degrees": {"H": [1]},
        "strata": [
            {"index": [],
             "basis": [{"label": "1", "degree": 0}, {"label": "H", "degree": 2}, {"label": "pt", "degree": 4}],
             "pairing": [["0", "0", "1"], ["0", "1", "0"], ["1", "0", "0"]],
             "cup_tables": {"H": [["0", "1", "0"], ["0", "0", "1"], ["0", "0", "0"]],
                            "c1log": [["0", "1", "0"], ["0", "0", "1"], ["0", "0", "0"]]},
             "log_c1": ["0", "1", "0"]},
            dict(line, index=[0]),
            dict(line, index=[1]),
            {"index": [0, 1], "basis": [{"label": "1", "degree": 0}], "pairing": [["1"]],
             "cup_tables": {"H": [["0"]], "c1log": [["0"]]}, "log_c1": ["0"]},
        ],
    }


def p1_pair() -> PairDescription:
    return PairDescription.from_dict(p1_pair_dict())


def p2_line_pair() -> PairDescription:
    return PairDescription.from_dict(p2_line_pair_dict())


def p2_two_lines_pair() -> PairDescription:
    return PairDescription.from_dict(p2_two_lines_pair_dict())


# -- the Laurent oracle for P^1 -------------------------------------------------------
# A Laurent element is {z-exponent: {q-exponent: Fraction}}.  Cone points of
# the two-ray fan are contact vectors (a, 0) or (0, b).


def _theta(p) -> dict:
    a, b = p
    if b == 0:
        return {a: {0: Fraction(1)}}
    return {-b: {b: Fraction(1)}}


def _lmul(x: dict, y: dict) -> dict:
    out: dict = defaultdict(lambda: defaultdict(Fraction))
    for k1, c1 in x.items():
        for k2, c2 in y.items():
            for d1, v1 in c1.items():
                for d2, v2 in c2.items():
                    out[k1 + k2][d1 + d2] += v1 * v2
    return _clean(out)


def _ladd(x: dict, y: dict, sign=1) -> dict:
    out: dict = defaultdict(lambda: defaultdict(Fraction))
    for k, c in x.items():
        for d, v in c.items():
            out[k][d] += v
    for k, c in y.items():
        for d, v in c.items():
            out[k][d] += sign * v
    return _clean(out)


def _clean(x) -> dict:
    return {k: {d: v for d, v in c.items() if v} for k, c in x.items() if any(c.values())}


def _qshift(x: dict, d0: int, coeff=1) -> dict:
    return {k: {d + d0: v * coeff for d, v in c.items()} for k, c in x.items()}


def _to_theta(x: dict) -> dict:
    """Laurent element -> {(cone point, q-degree): coeff}."""
    out = {}
    for k, c in x.items():
        for d, v in c.items():
            if k >= 0:
                out[((k, 0), d)] = v
            else:
                if d < -k:
                    raise ValueError("element outside Q[q][z, q/z]")
                out[((0, -k), d + k)] = v
    return out


def p1_structure_constant(p1, p2, r, d: int) -> Fraction:
    """N^{d}_{p1,p2,-r} from the Laurent model."""
    return _to_theta(_lmul(_theta(p1), _theta(p2))).get((tuple(r), d), Fraction(0))


def _phi(p, u) -> dict:
    a, b = p
    ua, ub = u
    if ua > 0 and b == 0 and a > ua:
        return {a - ua: {0: Fraction(a - ua)}}
    if ub > 0 and a == 0 and b > ub:
        return {-(b - ub): {b - ub: Fraction(b - ub)}}
    return {}


def p1_two_point(p, pp, d: int) -> Fraction:
    return p1_structure_constant(p, pp, (0, 0), d) / d if d > 0 else Fraction(0)


def p1_four_point(p, pp, r, u, d: int) -> Fraction:
    """<[1]_p, [1]_pp, f_r, f_u>_d where f_0 = [pt]_0 and f_r = [1]_{-r}."""
    zero = (0, 0)
    if u == zero and r == zero:
        return d * d * p1_two_point(p, pp, d)
    if u == zero:
        return d * p1_structure_constant(p, pp, r, d)
    if r == zero:
        return d * p1_structure_constant(p, pp, u, d)
    first = _ladd(_lmul(_theta(p), _phi(pp, u)), _lmul(_phi(p, u), _theta(pp)))
    corr: dict = {}
    for (rr, dd), v in _to_theta(_lmul(_theta(p), _theta(pp))).items():
        corr = _ladd(corr, _qshift(_phi(rr, u), dd, v))
    return _to_theta(_ladd(first, corr, -1)).get((tuple(r), d), Fraction(0))


def _e(p):
    return (tuple(p), "1", 0)


def _f(r):
    if r == (0, 0):
        return ((0, 0), "pt", 0)
    return ((-r[0], -r[1]), "1", 0)


def p1_cone_points(bound: int) -> list[tuple[int, int]]:
    return [(0, 0)] + [(a, 0) for a in range(1, bound + 1)] + [(0, b) for b in range(1, bound + 1)]


def p1_window(k: int) -> list[tuple[int, int]]:
    out = [(0, 0)]
    for a in range(1, k + 1):
        out += [(a, 0), (-a, 0), (0, a), (0, -a)]
    return sorted(out)


def p1_table(contact_bound: int = 12, curve_bound: int = 4, window: int = 2) -> InvariantTable:
    pair = p1_pair()
    manifest = TableManifest(window=p1_window(window), contact_bound=contact_bound,
                             curve_bound=curve_bound, max_points=4,
                             notes="P1 relative to 0 + infinity; Laurent-model oracle")
    table = InvariantTable(pair, manifest=manifest)
    pts = p1_cone_points(contact_bound)

    def put(ins, d, value, note):
        key = InvariantKey.make(0, ins, (d,))
        s = [0, 0]
        for x in key.insertions:
            s[0] += x[0][0]
            s[1] += x[0][1]
        if s != [d, d] or d < 0 or d > curve_bound:
            return
        table.set(key, value, note)

    def degree_of(es, fs):
        tot = [sum(p[i] for p in es) - sum(r[i] for r in fs) for i in range(2)]
        return tot[0] if tot[0] == tot[1] else None

    for p, pp in itertools.combinations_with_replacement(pts, 2):
        d = degree_of([p, pp], [])
        if d is not None and d > 0:
            put([_e(p), _e(pp)], d, p1_two_point(p, pp, d), "two-point")
        for r in pts:
            d = degree_of([p, pp], [r])
            if d is None or d < 0:
                continue
            put([_e(p), _e(pp), _f(r)], d, p1_structure_constant(p, pp, r, d), "three-point")
            put([((0, 0), "1", 1), _e(p), _e(pp), _f(r)], d,
                p1_structure_constant(p, pp, r, d), "dilaton")
        for r, u in itertools.combinations_with_replacement(pts, 2):
            d = degree_of([p, pp], [r, u])
            if d is None or d < 0:
                continue
            put([_e(p), _e(pp), _f(r), _f(u)], d, p1_four_point(p, pp, r, u, d), "four-point")
    return table


def p2_line_table(contact_bound: int = 12) -> InvariantTable:
    pair = p2_line_pair()
    manifest = TableManifest(window=[(-2,), (-1,), (0,), (1,), (2,)], contact_bound=contact_bound,
                             curve_bound=4, max_points=3,
                             notes="P2 relative to a line; degree-zero constants only")
    table = InvariantTable(pair, manifest=manifest)
    for a in range(1, contact_bound):
        for b in range(a, contact_bound - a + 1):
            table.set(InvariantKey.make(0, [((a,), "1", 0), ((b,), "1", 0), ((-(a + b),), "pt", 0)], (0,)),
                      1, "degree-zero three-point")
    return table


def p1_constants(contact_bound: int = 12, curve_bound: int = 4):
    """N^d_{p1,p2,-r} straight from the Laurent model, with a completeness manifest."""
    from relqc.mirror import ConstantsManifest, StructureConstants
    pts = p1_cone_points(contact_bound)
    values = {}
    for p, pp in itertools.combinations_with_replacement(pts, 2):
        for r in pts:
            for d in range(curve_bound + 1):
                v = p1_structure_constant(p, pp, r, d)
                if v:
                    values[(p, pp, r, (d,))] = v
    manifest = ConstantsManifest(contact_bound, curve_bound, "P1 relative to 0 + infinity; Laurent model")
    return StructureConstants(p1_pair(), values=values, manifest=manifest)


def p2_line_constants(contact_bound: int = 12, curve_bound: int = 4):
    """theta_a * theta_b = theta_{a+b}; every constant of nonzero class vanishes."""
    from relqc.mirror import ConstantsManifest, StructureConstants
    values = {((a,), (b,), (a + b,), (0,)): 1
              for a in range(contact_bound + 1) for b in range(a, contact_bound + 1 - a)}
    manifest = ConstantsManifest(contact_bound, curve_bound, "P2 relative to a line; monoid algebra")
    return StructureConstants(p2_line_pair(), values=values, manifest=manifest)


def write_fixtures(outdir) -> None:
    from relqc.mirror import store_constants
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    store_pair(p1_pair(), out / "p1_pair.json")
    store_table(p1_table(), out / "p1_invariants.jsonl")
    store_pair(p2_line_pair(), out / "p2_line_pair.json")
    store_table(p2_line_table(), out / "p2_line_invariants.jsonl")
    store_constants(p1_constants(), out / "p1_constants.jsonl")
    store_constants(p2_line_constants(), out / "p2_line_constants.jsonl")


if __name__ == "__main__":
    write_fixtures(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
