import json

import pytest
from hypothesis import given, strategies as st

from relqc.errors import ConfigurationError, DataError
from relqc.fixtures import (p1_pair, p1_pair_dict, p2_line_pair, p2_line_pair_dict, p2_quartic_pair_dict,
                            p2_two_lines_pair, p2_two_lines_pair_dict)
from relqc.pair_geometry import (ConePoint, PairDescription, build_dual_complex, contact_vector,
                                 lattice_points, load_pair, log_canonical_degree, nef_classification,
                                 store_pair)


def test_dual_complex_of_p1_has_two_isolated_vertices():
    cx = build_dual_complex(p1_pair())
    assert cx.simplices == ((0,), (1,))
    assert cx.vertices == (0, 1)


def test_dual_complex_of_two_lines_is_an_edge():
    cx = build_dual_complex(p2_two_lines_pair())
    assert cx.simplices == ((0,), (1,), (0, 1))


def test_lattice_points_p1_order():
    pts = lattice_points(build_dual_complex(p1_pair()), 3)
    assert [str(p) for p in pts] == ["0", "v1", "v2", "2v1", "2v2", "3v1", "3v2"]


def test_lattice_points_two_dimensional_cone():
    cx = build_dual_complex(p2_two_lines_pair())
    assert [str(p) for p in lattice_points(cx, 2)] == ["0", "v1", "v2", "2v1", "v1+v2", "2v2"]
    # points of total k in a 2-cone: k + 1 of them
    assert len(lattice_points(cx, 5)) == sum(k + 1 for k in range(6))


def test_lattice_points_single_divisor():
    cx = build_dual_complex(p2_line_pair())
    assert [contact_vector(p) for p in lattice_points(cx, 3)] == [(0,), (1,), (2,), (3,)]


def test_lattice_points_rejects_negative_bound():
    with pytest.raises(ValueError):
        lattice_points(build_dual_complex(p1_pair()), -1)


@given(st.integers(min_value=0, max_value=6), st.integers(min_value=0, max_value=6))
def test_lattice_points_monotone_in_bound(a, b):
    cx = build_dual_complex(p2_two_lines_pair())
    lo, hi = sorted((a, b))
    small, big = lattice_points(cx, lo), lattice_points(cx, hi)
    assert set(small) <= set(big)
    assert all(p.total <= lo for p in small)


@given(st.integers(min_value=0, max_value=6))
def test_contact_vector_is_injective(bound):
    cx = build_dual_complex(p1_pair())
    pts = lattice_points(cx, bound)
    vecs = [contact_vector(p) for p in pts]
    assert len(set(vecs)) == len(vecs)
    assert all(cx.point(v) == p for v, p in zip(vecs, pts))


def test_point_outside_cone_is_none():
    cx = build_dual_complex(p1_pair())
    # v1 + v2 is not in B since the two points of D are disjoint
    assert cx.point((1, 1)) is None
    assert cx.point((-1, 0)) is None
    assert cx.point((2, 0)) == ConePoint((2, 0))


def test_cone_point_rejects_negative_entries():
    with pytest.raises(ValueError):
        ConePoint((1, -1))


def test_log_canonical_degree_examples():
    assert log_canonical_degree(p1_pair(), (1,)) == 0
    assert log_canonical_degree(p2_line_pair(), (1,)) == -2
    assert log_canonical_degree(p2_two_lines_pair(), (1,)) == -1
    quartic = PairDescription.from_dict(p2_quartic_pair_dict())
    assert log_canonical_degree(quartic, (3,)) == 3


@given(st.integers(min_value=0, max_value=20), st.integers(min_value=0, max_value=20))
def test_log_canonical_degree_is_additive(a, b):
    pair = p2_line_pair()
    assert log_canonical_degree(pair, (a + b,)) == (
        log_canonical_degree(pair, (a,)) + log_canonical_degree(pair, (b,)))


def test_nef_classification():
    assert nef_classification(p1_pair()) == "log_cy"
    assert nef_classification(p2_line_pair()) == "anti_kd_nef"
    assert nef_classification(p2_two_lines_pair()) == "anti_kd_nef"
    assert nef_classification(PairDescription.from_dict(p2_quartic_pair_dict())) == "kd_nef"


def test_contradictory_nef_flag():
    d = p2_line_pair_dict()
    d["nef"] = "kd_nef"
    with pytest.raises(ConfigurationError):
        nef_classification(PairDescription.from_dict(d))


def test_kd_disagreeing_with_c1_and_D():
    d = p1_pair_dict()
    d["intersection_numbers"][0]["KD"] = 1
    with pytest.raises(ConfigurationError, match="disagrees"):
        PairDescription.from_dict(d)


def test_missing_face_is_rejected():
    d = p2_two_lines_pair_dict()
    d["strata"] = [s for s in d["strata"] if s["index"] != [1]]
    with pytest.raises(DataError):
        PairDescription.from_dict(d)


def test_missing_key_is_data_error():
    d = p1_pair_dict()
    del d["strata"]
    with pytest.raises(DataError, match="malformed"):
        PairDescription.from_dict(d)


def test_nonpositive_grading_rejected():
    d = p1_pair_dict()
    d["curve_grading"] = [0]
    with pytest.raises(ConfigurationError):
        PairDescription.from_dict(d)


def test_store_and_load_round_trip(tmp_path):
    pair = p2_two_lines_pair()
    path = tmp_path / "pair.json"
    store_pair(pair, path)
    again = load_pair(path)
    assert again.to_dict() == pair.to_dict()


def test_load_bad_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "n": 2,\n  oops\n}\n')
    with pytest.raises(DataError) as info:
        load_pair(path)
    assert info.value.line == 3
    assert str(path) in str(info.value)


def test_fixture_file_matches_builder(fixture_dir):
    on_disk = json.loads((fixture_dir / "p1_pair.json").read_text())
    assert on_disk == p1_pair().to_dict()
