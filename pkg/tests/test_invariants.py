import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from relqc.errors import DataError, IncompleteTableError
from relqc.invariants import (InvariantEngine, InvariantKey, InvariantTable, TableManifest, insertion,
                              load_table, round_trip_residuals, store_table, virtual_dimension_ok,
                              wdvv_scan)

V1, V2, ZERO = (1, 0), (0, 1), (0, 0)
LINE_CONSTANT = InvariantKey.make(0, [(V1, "1"), (V2, "1"), (ZERO, "pt")], (1,))


def key(*ins, beta=(0,)):
    return InvariantKey.make(0, ins, beta)


def test_virtual_dimension_examples(p1):
    assert virtual_dimension_ok(p1, LINE_CONSTANT)
    assert not virtual_dimension_ok(p1, key((V1, "1"), (V2, "1"), (ZERO, "1"), beta=(1,)))
    # a negative contact costs one unit of degree
    assert virtual_dimension_ok(p1, key(((2, 0), "1"), ((-2, 0), "1"), (ZERO, "1")))
    assert virtual_dimension_ok(p1, key(((-1, 0), "1", 1), (V2, "1"), (V1, "1"), ((1, 0), "1"), beta=(1,)))


def test_fixture_values(p1_engine):
    assert p1_engine.value(LINE_CONSTANT) == 1
    assert p1_engine.value(key(((1, 0), "1"), ((2, 0), "1"), ((-3, 0), "1"))) == 1
    assert p1_engine.value(key(((2, 0), "1"), ((0, 2), "1"), (ZERO, "pt"), beta=(2,))) == 1


def test_killed_keys_are_zero(p1_engine):
    unbalanced = key((V1, "1"), (V1, "1"), (ZERO, "pt"), beta=(1,))
    wrong_dim = key((V1, "1"), (V2, "1"), (ZERO, "1"), beta=(1,))
    off_cone = key(((1, 1), "1"), ((-1, -1), "1"), (ZERO, "pt"))
    for k in (unbalanced, wrong_dim, off_cone):
        assert p1_engine.killed(k)
        assert p1_engine.value(k) == 0


def test_unstable_is_zero(p1_engine):
    assert p1_engine.value(key((V1, "1"), ((-1, 0), "1"))) == 0


@settings(max_examples=40)
@given(st.permutations([(V1, "1"), (V2, "1"), (ZERO, "pt")]),
       st.permutations([((-2, 0), "1", 1), ((0, 1), "1"), ((1, 0), "1"), ((2, 0), "1")]))
def test_symmetric_in_markings(p1_engine, perm3, perm4):
    assert p1_engine.value(InvariantKey.make(0, perm3, (1,))) == 1
    assert p1_engine.value(InvariantKey.make(0, perm4, (1,))) == 1


def test_string_equation(p1_engine):
    k = key((ZERO, "1"), ((-1, 0), "1", 1), (V2, "1"), (V1, "1"), (V1, "1"), beta=(1,))
    red = p1_engine.reduce_elementary(k)
    assert red.rule == "string"
    assert len(red.terms) == 1
    assert p1_engine.value(k) == p1_engine.value(key(((-1, 0), "1"), (V2, "1"), (V1, "1"), (V1, "1"), beta=(1,)))


def test_string_equation_degree_zero_pairing(p1_engine):
    k = key((ZERO, "1"), ((2, 0), "1"), ((-2, 0), "1"))
    red = p1_engine.reduce_elementary(k)
    assert (red.rule, red.terms, red.constant) == ("string", [], 1)


def test_dilaton_equation(p1_engine):
    k = key((ZERO, "1", 1), (V1, "1"), (V2, "1"), (ZERO, "pt"), beta=(1,))
    red = p1_engine.reduce_elementary(k)
    assert red.rule == "dilaton"
    assert red.terms == [(Fraction(1), LINE_CONSTANT)]
    assert p1_engine.value(k) == 1


def test_divisor_equation(p1_engine):
    k = key((ZERO, "pt"), ((2, 0), "1"), ((0, 2), "1"), (ZERO, "pt"), beta=(2,))
    red = p1_engine.reduce_elementary(k)
    assert red.rule == "divisor"
    assert p1_engine.value(k) == 2


def test_two_point_by_backward_divisor(p1_engine):
    assert p1_engine.value(key((V1, "1"), (V2, "1"), beta=(1,))) == 1
    assert p1_engine.value(key(((2, 0), "1"), ((0, 2), "1"), beta=(2,))) == Fraction(1, 2)


def test_trr_value_and_anchor_independence(p1_engine):
    k = key(((-2, 0), "1", 1), (V2, "1"), (V1, "1"), ((2, 0), "1"), beta=(1,))
    pos = next(i for i, x in enumerate(k.insertions) if x.psi)
    others = [i for i in range(4) if i != pos]
    vals = {p1_engine.trr(k, pos, a) for a in itertools.combinations(others, 2)}
    assert vals == {1}
    assert p1_engine.value(k) == 1


def test_trr_needs_psi(p1_engine):
    with pytest.raises(ValueError):
        p1_engine.trr(LINE_CONSTANT)


def test_round_trip_is_exact(p1_engine):
    rows = round_trip_residuals(p1_engine)
    assert len(rows) > 100
    assert all(r == 0 for _, _, r in rows)


def test_wdvv_vanishes_on_fixture(p1_engine):
    classes = [((a, 0), "1") for a in (-2, -1, 1, 2)] + [((0, b), "1") for b in (-1, 1)] + [(ZERO, "pt")]
    checked, bad = wdvv_scan(p1_engine, classes, [(0,), (1,), (2,)])
    assert checked > 100
    assert bad == []


def test_wdvv_detects_single_perturbation(p1_tab):
    engine = InvariantEngine(p1_tab.perturbed(LINE_CONSTANT))
    anchors = [((2, 0), "1"), ((-2, 0), "1"), (V2, "1"), (V1, "1")]
    assert engine.wdvv_residual(anchors, beta=(1,)) != 0


def test_wdvv_antisymmetry(p1_tab):
    engine = InvariantEngine(p1_tab.perturbed(LINE_CONSTANT))
    a, b, c, d = ((2, 0), "1"), ((-2, 0), "1"), (V2, "1"), (V1, "1")
    assert engine.wdvv_residual([a, b, c, d], beta=(1,)) == -engine.wdvv_residual([a, c, b, d], beta=(1,))


def test_missing_keys_are_reported(p1):
    engine = InvariantEngine(InvariantTable(p1))
    with pytest.raises(IncompleteTableError) as info:
        engine.value(LINE_CONSTANT)
    # the divisor equation strips [pt]_0 first, so the two-point key is what is missing
    assert info.value.keys == [key((V1, "1"), (V2, "1"), beta=(1,))]
    assert "<[1]_[0, 1], [1]_[1, 0]>" in str(info.value)


def test_set_rejects_unbalanced(p1):
    with pytest.raises(DataError, match="unbalanced"):
        InvariantTable(p1).set(key((V1, "1"), (V1, "1"), (ZERO, "pt"), beta=(1,)), 1)


def test_store_load_round_trip(tmp_path, p1):
    t = InvariantTable(p1, manifest=TableManifest(window=[ZERO, V1], contact_bound=3))
    t.set(LINE_CONSTANT, Fraction(3, 7), "example")
    path = tmp_path / "t.jsonl"
    store_table(t, path)
    again = load_table(path, p1)
    assert again == t
    assert again.provenance[LINE_CONSTANT] == "example"


def _record(value):
    return json.dumps({"g": 0, "beta": [1], "value": value,
                       "insertions": [{"s": [1, 0], "label": "1"}, {"s": [0, 1], "label": "1"},
                                      {"s": [0, 0], "label": "pt"}]})


def test_duplicate_records_agree(tmp_path, p1):
    path = tmp_path / "dup.jsonl"
    path.write_text(_record("1") + "\n" + _record("1") + "\n")
    assert len(load_table(path, p1)) == 1


def test_conflicting_records_name_both_lines(tmp_path, p1):
    path = tmp_path / "conflict.jsonl"
    path.write_text(_record("1") + "\n\n" + _record("2") + "\n")
    with pytest.raises(DataError) as info:
        load_table(path, p1)
    assert info.value.line == 3
    assert "line 1" in str(info.value)


def test_malformed_record_has_line(tmp_path, p1):
    path = tmp_path / "bad.jsonl"
    path.write_text(_record("1") + '\n{"g": 0}\n')
    with pytest.raises(DataError) as info:
        load_table(path, p1)
    assert info.value.line == 2


def test_insertion_helper():
    assert insertion([1, 0], "1") == ((1, 0), "1", 0)
    assert str(insertion((0, 0), "pt", 2)) == "[pt]_[0, 0]psi^2"
