"""Command-line front end.

Exit codes: 0 all selected checks pass, 1 a check failed, 2 bad input data
or configuration, 3 a computation needed invariants (or z-powers) that the
inputs do not provide.
"""

from __future__ import annotations

import functools
import itertools
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import click

from relqc.errors import (DataError, DegreeError, IncompleteTableError, NotNefError, RelqcError,
                          SpanningError, TruncationOverflow)
from relqc.givental import (calibrate_bracket_sign, commutation_residual, genus0_virasoro_residual,
                            graph_check, isotropy_residuals, j_function, symplecticity_residual,
                            virasoro_operator)
from relqc.invariants import (InvariantEngine, InvariantTable, load_table, round_trip_residuals,
                              wdvv_scan)
from relqc.mirror import (MirrorAlgebra, StructureConstants, algebra_laws, element_str, element_to_json,
                          frobenius_constant, frobenius_descendant, frobenius_order_independence,
                          load_constants, mirror_presentation, presentation_residuals,
                          product_homogeneity_defects)
from relqc.novikov import NovikovTruncation
from relqc.pair_geometry import (ConePoint, PairDescription, build_dual_complex, lattice_points, load_pair,
                                 nef_classification)
from relqc.quantum import QuantumCohomology
from relqc.state_space import StateClass, basis_over

EXIT_PASS, EXIT_FAIL, EXIT_DATA, EXIT_INCOMPLETE = 0, 1, 2, 3


# -- configuration -------------------------------------------------------------------

def _contact(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}") from None


def _window(text: str) -> tuple[int, int]:
    w = _contact(text)
    if len(w) != 2 or w[0] > w[1]:
        raise click.BadParameter(f"expected LO,HI with LO <= HI, got {text!r}")
    return w


@dataclass
class RunConfig:
    pair_path: str
    invariants_path: str | None
    constants_path: str | None
    q_bound: int
    t_order: int | None
    theta_bound: int
    z_window: tuple[int, int]
    out: str | None
    fmt: str

    def load(self) -> "Session":
        pair = load_pair(self.pair_path)
        table = load_table(self.invariants_path, pair) if self.invariants_path else None
        engine = InvariantEngine(table) if table is not None else None
        if self.constants_path:
            constants = load_constants(self.constants_path, pair, engine)
        elif engine is not None:
            constants = StructureConstants(pair, engine=engine)
        else:
            constants = None
        if self.q_bound < 1:
            raise DataError("--q-bound must be at least 1")
        if self.theta_bound < 0:
            raise DataError("--theta-bound must be nonnegative")
        if table is not None and table.manifest.contact_bound is not None \
                and self.theta_bound > table.manifest.contact_bound:
            raise DataError(f"--theta-bound {self.theta_bound} exceeds the table's contact bound "
                            f"{table.manifest.contact_bound}", self.invariants_path)
        return Session(self, pair, table, engine, constants)


@dataclass
class Session:
    config: RunConfig
    pair: PairDescription
    table: InvariantTable | None
    engine: InvariantEngine | None
    constants: StructureConstants | None

    def trunc(self) -> NovikovTruncation:
        return NovikovTruncation(self.pair, bound=self.config.q_bound)

    def need_engine(self) -> InvariantEngine:
        if self.engine is None:
            raise DataError("this command needs --invariants")
        return self.engine

    def need_constants(self) -> StructureConstants:
        if self.constants is None:
            raise DataError("this command needs --invariants or --constants")
        return self.constants

    def algebra(self) -> MirrorAlgebra:
        return MirrorAlgebra(self.need_constants(), self.trunc(), self.config.theta_bound)

    def quantum(self) -> QuantumCohomology:
        return QuantumCohomology(self.need_engine(), self.trunc())

    def t_order(self, default: int) -> int:
        return default if self.config.t_order is None else self.config.t_order


# -- report rendering -----------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def render_json(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def _text_lines(prefix: str, value, out: list) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _text_lines(f"{prefix}.{k}" if prefix else str(k), value[k], out)
    elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
        for i, v in enumerate(value):
            _text_lines(f"{prefix}[{i}]", v, out)
    else:
        out.append(f"{prefix}: {_jsonable(value)}")


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {report['status']}"]
    for line in report.get("display", []):
        lines.append(line)
    body = {k: v for k, v in report.items() if k not in ("command", "status", "display")}
    _text_lines("", body, lines)
    return "\n".join(lines) + "\n"


def emit(config: RunConfig, report: dict) -> None:
    text = render_json(report) if config.fmt == "json" else render_text(report)
    click.echo(text, nl=False)
    if config.out:
        Path(config.out).write_text(text)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# -- the commands as plain functions ---------------------------------------------------

def cmd_validate(s: Session) -> dict:
    pair = s.pair
    cx = build_dual_complex(pair)
    rep = {"command": "validate", "pair": pair.name or s.config.pair_path,
           "nef_classification": nef_classification(pair),
           "strata": len(pair.strata),
           "theta_points": len(lattice_points(cx, s.config.theta_bound))}
    ok = True
    if s.table is not None:
        rep["invariants"] = len(s.table)
        bad = [(str(k), rule, r) for k, rule, r in round_trip_residuals(s.engine) if r]
        rep["round_trip_failures"] = bad[:20]
        ok &= not bad
    if s.constants is not None:
        mism = s.constants.cross_check()
        rep["constant_mismatches"] = [{"key": [list(x) for x in k], "given": a, "table": b} for k, a, b in mism]
        viol = s.constants.vanishing_violations()
        rep["vanishing_violations"] = [{"key": str(k), "value": v} for k, v in viol]
        ok &= not mism and not viol
    rep["status"] = _status(ok)
    return rep


def cmd_product(s: Session, p1, p2) -> dict:
    alg = s.algebra()
    prod = alg.theta_product(p1, p2)
    defects = product_homogeneity_defects(alg, p1, p2)
    rep = {"command": "product", "p1": list(p1), "p2": list(p2),
           "display": [f"theta_{ConePoint(p1)} * theta_{ConePoint(p2)} = {element_str(prod)}"],
           "product": element_to_json(prod),
           "homogeneity_defects": [str(d) for d in defects],
           "truncation": alg.trunc.describe()}
    if s.engine is not None:
        qc = s.quantum()
        small = qc.small_product(StateClass.unit(s.pair, p1), StateClass.unit(s.pair, p2))
        rep["small_quantum_product"] = str(small)
    rep["status"] = _status(not defects)
    return rep


def cmd_assoc(s: Session) -> dict:
    alg = s.algebra()
    laws = algebra_laws(alg)
    rep = {"command": "assoc", "theta_bound": alg.theta_bound, "truncation": alg.trunc.describe(),
           "laws": {k: v.to_json() for k, v in laws.items()}}
    ok = all(v.status in ("pass", "report-only") for v in laws.values())
    display = []
    for name, v in laws.items():
        if v.witness is not None:
            display.append(f"{name} witness: {[list(p) for p in v.witness]} residual {element_str(v.residual)}")
    if s.engine is not None:
        qc = s.quantum()
        order = s.t_order(1)
        failures = []
        checked = 0
        for a, b, c in itertools.product(qc.t_basis, repeat=3):
            checked += 1
            res = qc.associativity_residual(*(StateClass.basis(s.pair, *k) for k in (a, b, c)), t_order=order)
            if res:
                failures.append({"triple": [f"[{k[1]}]_{list(k[0])}" for k in (a, b, c)], "residual": str(res)})
        rep["quantum_product"] = {"t_order": order, "checked": checked, "failures": len(failures),
                                  "first_witness": failures[0] if failures else None}
        ok &= not failures
        if failures:
            display.append(f"quantum associativity witness: {failures[0]['triple']}")
    rep["display"] = display
    rep["status"] = _status(ok)
    return rep


def cmd_wdvv(s: Session) -> dict:
    eng = s.need_engine()
    window = eng.table.manifest.window or [s.pair.zero_contact]
    classes = [(k[0], k[1], 0) for k in basis_over(s.pair, window)]
    checked, bad = wdvv_scan(eng, classes, list(s.trunc()))
    rep = {"command": "wdvv", "checked": checked, "failures": len(bad),
           "witnesses": [{"anchors": [str(x) for x in a], "beta": list(b), "residual": r}
                         for a, _sp, b, r in bad[:10]]}
    if bad:
        a, _sp, b, r = bad[0]
        rep["display"] = [f"WDVV witness: anchors {[str(x) for x in a]} beta {list(b)} residual {r}"]
    rep["status"] = _status(not bad)
    return rep


def _frobenius_cases(s: Session, max_points: int):
    cx = build_dual_complex(s.pair)
    pts = [p.contact for p in lattice_points(cx, min(s.config.theta_bound, 2))]
    betas = list(s.trunc())
    for m in range(2, max_points + 1):
        for combo in itertools.combinations_with_replacement(pts, m):
            tot = tuple(sum(p[i] for p in combo) for i in range(s.pair.n))
            for b in betas:
                if s.pair.D_degrees(b) == tot:
                    yield combo, b


def cmd_frobenius(s: Session, points, beta, max_points: int) -> dict:
    const = s.need_constants()
    rows = []
    ok = True
    cases = [(tuple(points), beta)] if points else list(_frobenius_cases(s, max_points))
    for combo, b in cases:
        value = frobenius_constant(const, combo, b)
        resid = frobenius_order_independence(const, combo, b)
        row = {"points": [list(p) for p in combo], "beta": list(b), "value": value, "order_residual": resid}
        if s.engine is not None and len(combo) >= 3:
            try:
                desc = frobenius_descendant(s.engine, combo, b)
                row["descendant"] = desc
                if desc != value:
                    ok = False
            except IncompleteTableError:
                row["descendant"] = None
        if resid:
            ok = False
        rows.append(row)
    bad = [r for r in rows if r["order_residual"] or ("descendant" in r and r["descendant"] is not None
                                                      and r["descendant"] != r["value"])]
    rep = {"command": "frobenius", "cases": len(rows), "failures": len(bad),
           "results": rows if points else bad[:10]}
    if points:
        rep["display"] = [f"N^{list(beta)}_{[list(p) for p in points]},0 = {rows[0]['value']}"]
    elif bad:
        rep["display"] = [f"order-dependence witness: {bad[0]['points']} beta {bad[0]['beta']}"]
    rep["status"] = _status(ok)
    return rep


def cmd_mirror_presentation(s: Session, degree_bound: int, grading, generators) -> dict:
    alg = s.algebra()
    pres = mirror_presentation(alg, generators=generators, degree_bound=degree_bound, grading=grading)
    residuals = presentation_residuals(alg, pres)
    sound = not any(residuals)
    rep = {"command": "mirror-presentation", "display": pres.text().splitlines(),
           "presentation": pres.to_json(s.pair.zero_beta), "sound": sound,
           "truncation": alg.trunc.describe()}
    rep["status"] = _status(sound)
    return rep


def cmd_virasoro(s: Session, ms, mu_sign: int, potential: str) -> dict:
    pair = s.pair
    window = s.config.z_window
    contacts = (s.table.manifest.window if s.table is not None and s.table.manifest.window
                else [pair.zero_contact])
    c = calibrate_bracket_sign(pair, window, contacts, mu_sign)
    rep = {"command": "virasoro", "z_window": list(window), "bracket_sign": c, "mu_sign": mu_sign}
    ok = c is not None
    symp = {}
    for m in range(-1, 4):
        r, n = symplecticity_residual(pair, virasoro_operator(pair, m, mu_sign), window, contacts)
        symp[str(m)] = {"residual": r, "pairs": n}
        ok &= r == 0
    rep["symplecticity"] = symp
    comm = {}
    for m in range(-1, 4):
        for n in range(m + 1, 4):
            r, k = commutation_residual(pair, m, n, window, contacts, c or 1, mu_sign)
            comm[f"{m},{n}"] = {"residual": r, "basis": k}
            ok &= r == 0
    rep["commutation"] = comm
    plus, minus = isotropy_residuals(pair, window, contacts)
    rep["isotropy"] = {"H+": plus, "H-": minus}
    ok &= plus == 0 and minus == 0
    if s.engine is not None:
        qc = s.quantum()
        order = s.t_order(3)
        g0 = {}
        for m in ms:
            r = genus0_virasoro_residual(qc, m, order, potential, mu_sign)
            g0[str(m)] = {"max_abs": r["max_abs"], "terms": len(r["residual"].terms),
                          "residual": str(r["residual"])}
            ok &= r["max_abs"] == 0
        rep["genus0"] = {"t_order": order, "potential": potential, "truncation": qc.trunc.describe(),
                         "residuals": g0}
    rep["status"] = _status(ok)
    return rep


def cmd_j_function(s: Session) -> dict:
    qc = s.quantum()
    order = s.t_order(3)
    window = s.config.z_window
    jf = j_function(qc, order, window)
    graph = graph_check(qc, order, window)
    plus_ok = set(a for a in jf.terms if a >= 0) <= {0, 1}
    rep = {"command": "j-function", "t_order": order, "z_window": list(window),
           "truncation": qc.trunc.describe(),
           "terms": {str(a): str(jf.terms[a]) for a in sorted(jf.terms)},
           "graph": graph, "plus_part_is_z_plus_t": plus_ok}
    rep["status"] = _status(graph["full"]["max_mismatch"] == 0 and plus_ok)
    return rep


# -- click wiring ----------------------------------------------------------------------

def common_options(f):
    opts = [
        click.option("--pair", "pair_path", required=True, type=click.Path(exists=True, dir_okay=False),
                     help="Pair description (JSON)."),
        click.option("--invariants", "invariants_path", type=click.Path(exists=True, dir_okay=False),
                     help="Invariant table (JSONL)."),
        click.option("--constants", "constants_path", type=click.Path(exists=True, dir_okay=False),
                     help="Structure-constant table (JSONL)."),
        click.option("--q-bound", default=3, show_default=True,
                     help="Truncate q^beta at curve weight >= this bound."),
        click.option("--t-order", type=int, default=None, help="Maximal t-degree (command default if unset)."),
        click.option("--theta-bound", default=2, show_default=True, help="Largest theta index total."),
        click.option("--z-window", default="-8,8", show_default=True, help="z-power window LO,HI."),
        click.option("--out", type=click.Path(dir_okay=False), help="Also write the report here."),
        click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True),
    ]
    for o in reversed(opts):
        f = o(f)

    @functools.wraps(f)
    def wrapper(pair_path, invariants_path, constants_path, q_bound, t_order, theta_bound, z_window,
                out, fmt, **kw):
        config = RunConfig(pair_path, invariants_path, constants_path, q_bound, t_order, theta_bound,
                           _window(z_window), out, fmt)
        code = run(config, lambda s: f(s, **kw))
        sys.exit(code)
    return wrapper


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (IncompleteTableError, TruncationOverflow)):
        return EXIT_INCOMPLETE
    if isinstance(exc, SpanningError):
        return EXIT_FAIL
    if isinstance(exc, (DataError, NotNefError, DegreeError)):
        return EXIT_DATA
    return EXIT_DATA


def run(config: RunConfig, body) -> int:
    """Load inputs, run ``body(session)`` and emit its report(s); return the exit code."""
    try:
        session = config.load()
        reports = body(session)
    except RelqcError as exc:
        click.echo(f"error: {exc}", err=True)
        return exit_code_for(exc)
    if isinstance(reports, dict):
        reports = [reports]
    if len(reports) == 1:
        emit(config, reports[0])
    else:
        emit(config, {"command": "check-all", "status": _overall(reports),
                      "checks": {r["command"]: r for r in reports}})
    statuses = {r["status"] for r in reports}
    if "fail" in statuses:
        return EXIT_FAIL
    if "incomplete" in statuses:
        return EXIT_INCOMPLETE
    return EXIT_PASS


def _overall(reports) -> str:
    statuses = {r["status"] for r in reports}
    for s in ("fail", "incomplete"):
        if s in statuses:
            return s
    return "pass"


def _guarded(name: str, fn, *args) -> dict:
    """Run one check of check-all; missing data marks it incomplete instead of aborting."""
    try:
        return fn(*args)
    except (IncompleteTableError, TruncationOverflow) as exc:
        return {"command": name, "status": "incomplete", "reason": str(exc)}


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Relative quantum cohomology, mirror algebra and Virasoro checks."""


@main.command()
@common_options
def validate(s):
    """Validate the pair, the tables and their consistency."""
    return cmd_validate(s)


@main.command()
@click.argument("p1")
@click.argument("p2")
@common_options
def product(s, p1, p2):
    """Theta product of two cone points given as contact vectors, e.g. 1,0 0,1."""
    return cmd_product(s, _contact(p1), _contact(p2))


@main.command()
@common_options
def assoc(s):
    """Unit, commutativity and associativity of R_I (and of the quantum product)."""
    return cmd_assoc(s)


@main.command()
@common_options
def wdvv(s):
    """WDVV residuals over the t-variable window."""
    return cmd_wdvv(s)


@main.command()
@click.argument("points", nargs=-1)
@click.option("--beta", default=None, help="Curve class for a single evaluation, e.g. 2.")
@click.option("--max-points", default=4, show_default=True, help="Largest m in the default scan.")
@common_options
def frobenius(s, points, beta, max_points):
    """Frobenius chain values and their order independence."""
    if points and beta is None:
        raise DataError("give --beta together with points")
    pts = [_contact(p) for p in points]
    b = _contact(beta) if beta is not None else None
    return cmd_frobenius(s, pts, b, max_points)


@main.command("mirror-presentation")
@click.option("--degree-bound", default=2, show_default=True, help="Largest monomial degree in relations.")
@click.option("--grading", default=None, help="Integer weight per divisor, e.g. 1,1.")
@click.option("--generators", default=None, help="Semicolon-separated cone points, e.g. '1,0;0,1'.")
@common_options
def mirror_presentation_cmd(s, degree_bound, grading, generators):
    """Generators and relations of the mirror family over S_I."""
    gens = [_contact(g) for g in generators.split(";")] if generators else None
    grad = list(_contact(grading)) if grading else None
    return cmd_mirror_presentation(s, degree_bound, grad, gens)


@main.command()
@click.option("--m", "ms", multiple=True, type=int, default=(-1, 0), show_default=True,
              help="Genus-0 constraints to check.")
@click.option("--mu-sign", type=click.Choice(["1", "-1"]), default="1", show_default=True,
              help="Sign of the grading operator mu.")
@click.option("--potential", type=click.Choice(["phi0", "full", "zero"]), default="phi0", show_default=True)
@common_options
def virasoro(s, ms, mu_sign, potential):
    """Symplecticity, commutation relations and genus-0 Virasoro residuals."""
    return cmd_virasoro(s, list(ms), int(mu_sign), potential)


@main.command("j-function")
@common_options
def j_function_cmd(s):
    """The J-function and its graph property."""
    return cmd_j_function(s)


@main.command("check-all")
@common_options
def check_all(s):
    """Every check that the given inputs allow."""
    reps = [cmd_validate(s)]
    if s.constants is not None:
        reps.append(_guarded("assoc", cmd_assoc, s))
        reps.append(_guarded("frobenius", cmd_frobenius, s, [], None, 4))
        reps.append(_guarded("mirror-presentation", cmd_mirror_presentation, s, 2, None, None))
    if s.engine is not None:
        reps.append(_guarded("wdvv", cmd_wdvv, s))
        reps.append(_guarded("j-function", cmd_j_function, s))
    reps.append(_guarded("virasoro", cmd_virasoro, s, [-1, 0], 1, "phi0"))
    return reps


if __name__ == "__main__":  # pragma: no cover
    main()
