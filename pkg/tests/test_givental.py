from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from relqc.errors import ConfigurationError, TruncationOverflow
from relqc.fixtures import p1_pair_dict, p2_line_pair
from relqc.givental import (ZSeries, calibrate_bracket_sign, commutation_residual, euler,
                            genus0_virasoro_residual, graph_check, isotropy_residuals, j_function,
                            mu_value, symplectic_form, symplecticity_residual, virasoro_operator, z_power)
from relqc.invariants import InvariantEngine, InvariantTable
from relqc.novikov import NovikovTruncation
from relqc.pair_geometry import PairDescription
from relqc.quantum import QuantumCohomology
from relqc.state_space import StateClass, basis_over

WINDOW = (-8, 8)
CONTACTS = [(0, 0), (1, 0), (2, 0), (0, 1), (0, 2)]
ONE, PT = ((0, 0), "1"), ((0, 0), "pt")


def mono(pair, key, a, c=1):
    return ZSeries.monomial(pair, WINDOW, key, a, c)


def test_omega_example(p1):
    f = mono(p1, ((1, 0), "1"), 0)
    g = mono(p1, ((-1, 0), "1"), -1)
    assert symplectic_form(f, g) == 1
    assert symplectic_form(mono(p1, ONE, 0), mono(p1, PT, -1)) == 1
    assert symplectic_form(mono(p1, ONE, 1), mono(p1, PT, -2)) == -1


def loop_elements(p1):
    keys = basis_over(p1, [(0, 0), (1, 0), (-1, 0), (0, 2), (0, -2)])
    term = st.tuples(st.sampled_from(keys), st.integers(-4, 4), st.integers(-3, 3))

    def build(terms):
        out = ZSeries(p1, WINDOW)
        for k, a, c in terms:
            out = out + mono(p1, k, a, c)
        return out
    return st.lists(term, max_size=6).map(build)


@settings(max_examples=60)
@given(st.data())
def test_omega_antisymmetric(p1, data):
    f = data.draw(loop_elements(p1))
    g = data.draw(loop_elements(p1))
    assert symplectic_form(f, g) == -symplectic_form(g, f)


@settings(max_examples=60)
@given(st.data())
def test_polarization_is_isotropic(p1, data):
    f = data.draw(loop_elements(p1))
    g = data.draw(loop_elements(p1))
    assert symplectic_form(f.plus_part(), g.plus_part()) == 0
    assert symplectic_form(f.minus_part(), g.minus_part()) == 0


def test_isotropy_on_window(p1):
    assert isotropy_residuals(p1, WINDOW, CONTACTS) == (0, 0)


def test_zseries_window_is_enforced(p1):
    with pytest.raises(TruncationOverflow):
        mono(p1, ONE, 9)
    with pytest.raises(TruncationOverflow):
        z_power(1)(mono(p1, ONE, 8))


def test_mu_values(p1):
    assert mu_value(p1, ONE) == Fraction(1, 2)
    assert mu_value(p1, PT) == Fraction(-1, 2)
    assert mu_value(p1, ((-3, 0), "1")) == Fraction(-1, 2)
    assert mu_value(p1, ((2, 0), "1")) == Fraction(1, 2)
    assert mu_value(p1, PT, sign=-1) == Fraction(1, 2)


def test_mu_values_p2_line():
    pair = p2_line_pair()
    assert [mu_value(pair, ((0,), lab)) for lab in ("1", "H", "pt")] == [1, 0, -1]
    assert mu_value(pair, ((-1,), "pt")) == -1


def test_l_minus_one_lowers_power(p1):
    f = mono(p1, ((1, 0), "1"), 0, 3)
    assert virasoro_operator(p1, -1)(f) == mono(p1, ((1, 0), "1"), -1, 3)


def test_l_zero_on_basis(p1):
    l0 = virasoro_operator(p1, 0)
    # z d/dz + 1/2 + mu, and rho vanishes on this fixture
    assert l0(mono(p1, ONE, 2)) == mono(p1, ONE, 2, 3)
    assert l0(mono(p1, PT, -1)) == mono(p1, PT, -1, -1)


def test_rho_needs_data():
    d = p1_pair_dict()
    del d["strata"][0]["log_c1"]
    pair = PairDescription.from_dict(d)
    with pytest.raises(ConfigurationError):
        virasoro_operator(pair, 0)


@pytest.mark.parametrize("m", [-1, 0, 1, 2, 3])
def test_virasoro_operators_are_symplectic(p1, m):
    worst, checked = symplecticity_residual(p1, virasoro_operator(p1, m), WINDOW, CONTACTS)
    assert checked > 1000
    assert worst == 0


def test_negative_controls_for_symplecticity(p1):
    # z d/dz without the 1/2 shift is not infinitesimal symplectic
    assert symplecticity_residual(p1, euler(half=False), WINDOW, CONTACTS)[0] == 1
    # multiplication by z is, for this pairing
    assert symplecticity_residual(p1, z_power(1), WINDOW, CONTACTS)[0] == 0


def test_bracket_sign_calibration(p1):
    assert calibrate_bracket_sign(p1, WINDOW, CONTACTS) == 1
    assert commutation_residual(p1, 0, 1, WINDOW, CONTACTS, c=-1)[0] != 0


@pytest.mark.parametrize("m,n", [(m, n) for m in range(-1, 4) for n in range(m + 1, 4)])
def test_commutation_relations(p1, m, n):
    worst, count = commutation_residual(p1, m, n, WINDOW, CONTACTS)
    assert count > 0
    assert worst == 0


def test_self_bracket_vanishes(p1):
    assert commutation_residual(p1, 2, 2, WINDOW, CONTACTS)[0] == 0


@pytest.mark.parametrize("m", [-1, 0])
def test_genus0_constraint_stated_convention(p1_qc, m):
    assert genus0_virasoro_residual(p1_qc, m, 3)["max_abs"] == 0


def test_genus0_constraint_sensitivities(p1_qc):
    # the stated grading sign fails for m = 1 and with the two-point terms
    assert genus0_virasoro_residual(p1_qc, 1, 3)["max_abs"] == 4
    assert genus0_virasoro_residual(p1_qc, 0, 3, potential="full")["max_abs"] == 2
    # the opposite grading sign annihilates all of them
    for m in (-1, 0, 1):
        for pot in ("phi0", "full"):
            assert genus0_virasoro_residual(p1_qc, m, 3, potential=pot, mu_sign=-1)["max_abs"] == 0


def test_zero_potential_leaves_classical_part(p1_qc):
    r = genus0_virasoro_residual(p1_qc, -1, 3, potential="zero")
    assert r["residual"] == r["classical"]
    assert r["max_abs"] == 1
    assert genus0_virasoro_residual(p1_qc, 0, 3, potential="zero")["max_abs"] == 0


def test_j_function_of_empty_table_is_z(p1):
    qc = QuantumCohomology(InvariantEngine(InvariantTable(p1)), NovikovTruncation(p1, bound=1), window=[(0, 0)])
    jf = j_function(qc, 0, WINDOW)
    assert sorted(jf.terms) == [1]
    assert jf.specialize(StateClass(p1)) == {1: {(0,): StateClass.unit(p1, (0, 0))}}


def test_j_function_plus_part(p1_qc):
    jf = j_function(p1_qc, 2, WINDOW)
    assert set(jf.terms[0].terms) == {((0,), ((k, 1),), k) for k in p1_qc.t_basis}
    assert min(jf.terms) < 0


def test_j_function_at_a_point(p1, p1_qc):
    jf = j_function(p1_qc, 2, WINDOW)
    t = StateClass.unit(p1, (1, 0))
    val = jf.specialize(t)
    assert val[1] == {(0,): StateClass.unit(p1, (0, 0))}
    assert val[0] == {(0,): t}
    # <[1]_{(0,1)}, [1]_{(1,0)}>_1 = 1 enters through 1/(-z), so z^-1 carries -T^{(0,1)}
    assert val[-1][(1,)] == -StateClass.unit(p1, (0, -1))


def test_j_function_window_too_shallow(p1_qc):
    with pytest.raises(TruncationOverflow):
        j_function(p1_qc, 3, (-1, 1))


def test_graph_property_with_all_stable_terms(p1_qc):
    report = graph_check(p1_qc, 3, WINDOW)
    assert report["checked_terms"] > 0
    assert report["full"]["max_mismatch"] == 0
    # the three-point-minimum potential misses exactly the two-point terms
    assert report["phi0"] == {"max_mismatch": 1, "mismatched_terms": 4}
