from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from relqc.errors import DegreeError
from relqc.fixtures import p1_pair, p2_line_pair, p2_two_lines_pair
from relqc.pair_geometry import build_dual_complex
from relqc.state_space import (StateClass, basis_degree0, basis_over, degree_zero_basis, dual_basis,
                               multi_degree, pair_classes)

P1 = p1_pair()
P2 = p2_line_pair()
TWO = p2_two_lines_pair()


def p1_contacts():
    ray = st.integers(min_value=-5, max_value=5)
    return st.one_of(ray.map(lambda a: (a, 0)), ray.map(lambda b: (0, b)))


def test_pairing_on_x():
    one = StateClass.unit(P1, (0, 0))
    pt = StateClass.point(P1, (0, 0))
    assert pair_classes(one, pt) == 1
    assert pair_classes(one, one) == 0
    assert pair_classes(pt, pt) == 0


def test_pairing_on_twisted_sectors():
    a = StateClass.unit(P1, (2, 0))
    assert pair_classes(a, StateClass.unit(P1, (-2, 0))) == 1
    assert pair_classes(a, StateClass.unit(P1, (2, 0))) == 0
    assert pair_classes(a, StateClass.unit(P1, (-1, 0))) == 0


def test_pairing_p2_line_sector():
    one = StateClass.unit(P2, (3,))
    pt = StateClass.point(P2, (-3,))
    assert pair_classes(one, pt) == 1
    assert pair_classes(one, StateClass.unit(P2, (-3,))) == 0


@given(p1_contacts(), p1_contacts())
def test_pairing_vanishes_unless_opposite(s, t):
    a = StateClass.unit(P1, s)
    b = StateClass.unit(P1, t)
    if t != tuple(-x for x in s):
        assert pair_classes(a, b) == 0
    else:
        assert pair_classes(a, b) == (0 if s == (0, 0) else 1)


@pytest.mark.parametrize("pair,s", [(P1, (0, 0)), (P1, (4, 0)), (P2, (0,)), (P2, (-2,)),
                                    (TWO, (1, 1)), (TWO, (0, 0)), (TWO, (0, -3))])
def test_dual_basis_is_dual(pair, s):
    pairs = dual_basis(pair, s)
    for i, (ti, _) in enumerate(pairs):
        for j, (_, dj) in enumerate(pairs):
            assert pair_classes(ti, dj) == (1 if i == j else 0)


def test_dual_basis_outside_cone_is_empty():
    assert dual_basis(P1, (1, 1)) == []


def test_state_class_arithmetic():
    a = StateClass.unit(P1, (0, 0))
    b = StateClass.point(P1, (0, 0))
    c = a + b.scale(3) - a
    assert c == b.scale(3)
    assert not (a - a)
    assert -a == a.scale(-1)
    assert StateClass.from_json(P1, c.to_json()) == c


def test_multi_degree_examples():
    assert multi_degree(StateClass.unit(P1, (2, 0))) == (0, (2, 0))
    assert multi_degree(StateClass.point(P1, (0, 0))) == (1, (0, 0))
    assert multi_degree(StateClass.unit(P1, (-3, 0))) == (1, (-3, 0))
    assert multi_degree(StateClass.point(TWO, (-1, 0))) == (2, (-1, 0))
    assert multi_degree(StateClass.unit(TWO, (1, 1))) == (0, (1, 1))


def test_multi_degree_of_inhomogeneous_class():
    with pytest.raises(DegreeError):
        multi_degree(StateClass.unit(P1, (0, 0)) + StateClass.point(P1, (0, 0)))
    with pytest.raises(DegreeError):
        multi_degree(StateClass.unit(P1, (1, 0)) + StateClass.unit(P1, (2, 0)))
    with pytest.raises(DegreeError):
        multi_degree(StateClass(P1))


@given(p1_contacts())
def test_opposite_sectors_pair_in_top_degree(s):
    # half the stratum dimension from the classes, plus one per nonzero contact
    neg = tuple(-x for x in s)
    for key in basis_over(P1, [s]):
        for dkey in basis_over(P1, [neg]):
            a = StateClass.basis(P1, *key)
            b = StateClass.basis(P1, *dkey)
            if pair_classes(a, b):
                assert basis_degree0(P1, key) + basis_degree0(P1, dkey) == P1.ambient_dim


def test_degree_zero_basis_exhausts_lattice_points():
    cx = build_dual_complex(TWO)
    entries = degree_zero_basis(TWO, cx, 3)
    assert len(entries) == 10
    for p, cls in entries:
        assert multi_degree(cls) == (Fraction(0), p.contact)


def test_basis_over_skips_missing_strata():
    assert basis_over(P1, [(0, 0), (1, 1), (1, 0)]) == [((0, 0), "1"), ((0, 0), "pt"), ((1, 0), "1")]
