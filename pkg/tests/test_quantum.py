import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from relqc.novikov import NovikovTruncation, TruncatedSeries
from relqc.quantum import homogeneity_defects, monomial_multidegree, term_multidegree
from relqc.state_space import StateClass, multi_degree

PT = ((0, 0), "pt")


def unit(p1, s):
    return StateClass.unit(p1, s)


def one_term(series):
    assert len(series.terms) == 1
    return next(iter(series.terms.items()))


def test_small_products(p1, p1_qc):
    q = p1_qc.small_product
    assert str(q(unit(p1, (1, 0)), unit(p1, (0, 1)))) == "q*[1]_[0, 0]"
    assert str(q(unit(p1, (1, 0)), unit(p1, (2, 0)))) == "[1]_[3, 0]"
    assert str(q(unit(p1, (1, 0)), unit(p1, (-1, 0)))) == "[pt]_[0, 0]"
    pt = StateClass.point(p1, (0, 0))
    assert q(pt, pt).is_zero()
    assert str(q(pt, unit(p1, (1, 0)))) == "q*[1]_[0, -1]"


@pytest.mark.parametrize("s", [(0, 0), (1, 0), (-2, 0), (0, 2)])
def test_unit(p1, p1_qc, s):
    x = unit(p1, s)
    assert p1_qc.small_product(unit(p1, (0, 0)), x) == p1_qc.as_series(x, 0)


def test_potential_coefficient(p1_qc):
    phi = p1_qc.potential_phi0(3)
    mono = tuple(sorted([(PT, 1), (((1, 0), "1"), 1), (((0, 1), "1"), 1)]))
    assert phi.coefficient((1,), mono) == 1
    # degree-zero part carries the classical cubic term t_0^2 t_pt / 2
    assert phi.coefficient((0,), ((((0, 0), "1"), 2), (PT, 1))) == Fraction(1, 2)


def test_potential_is_homogeneous(p1, p1_qc):
    # every term of Phi has degree 3 - dim X and contact degree 0
    for (beta, mono, _), c in p1_qc.potential_phi0(3).terms.items():
        d0, di = monomial_multidegree(p1, beta, mono)
        assert d0 == 3 - p1.ambient_dim
        assert di == (0, 0)


def small_basis(p1):
    return [unit(p1, s) for s in [(0, 0), (1, 0), (2, 0), (-1, 0), (0, 1), (0, -2)]] + [StateClass.point(p1, (0, 0))]


def test_small_products_homogeneous_and_commutative(p1, p1_qc):
    basis = small_basis(p1)
    for a, b in itertools.combinations_with_replacement(basis, 2):
        ab = p1_qc.small_product(a, b)
        assert ab == p1_qc.small_product(b, a)
        da, db = multi_degree(a), multi_degree(b)
        expected = (da[0] + db[0], tuple(x + y for x, y in zip(da[1], db[1])))
        assert homogeneity_defects(ab, expected) == []


def test_big_product_homogeneous(p1, p1_qc):
    a, b = unit(p1, (1, 0)), unit(p1, (0, 1))
    series = p1_qc.big_product(a, b, 2)
    assert len(series.terms) > 1
    assert homogeneity_defects(series, (0, (1, 1))) == []


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from([(0, 0), (1, 0), (-1, 0), (2, 0), (0, 1), (0, -1), (0, 2)]),
                min_size=3, max_size=3))
def test_associativity_with_deformation(p1_qc, contacts):
    p1 = p1_qc.pair
    a, b, c = (unit(p1, s) for s in contacts)
    assert p1_qc.associativity_residual(a, b, c, 1).is_zero()


def test_associativity_with_point_class(p1, p1_qc):
    pt = StateClass.point(p1, (0, 0))
    assert p1_qc.associativity_residual(pt, unit(p1, (1, 0)), unit(p1, (0, 1)), 1).is_zero()


def test_truncation_is_artinian(p1):
    trunc = NovikovTruncation(p1, bound=3)
    assert list(trunc) == [(0,), (1,), (2,)]
    assert trunc.add((1,), (1,)) == (2,)
    assert trunc.add((2,), (1,)) is None
    assert (3,) not in trunc


def test_truncated_series_drops_overflow(p1):
    trunc = NovikovTruncation(p1, bound=2)
    s = TruncatedSeries(trunc, 1, {((1,), (), None): 1})
    assert s.mul_scalar_series(s).is_zero()


def test_term_multidegree_with_q(p1):
    # q has deg0 = c1_log(beta) = 0 and contact degree D.beta
    assert term_multidegree(p1, (1,), (), ((0, 0), "1")) == (0, (1, 1))
    assert term_multidegree(p1, (0,), ((((1, 0), "1"), 2),), None) == (2, (-2, 0))
