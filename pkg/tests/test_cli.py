import json

import pytest
from click.testing import CliRunner

from relqc.cli import main
from relqc.fixtures import p1_table
from relqc.invariants import InvariantKey, store_table


@pytest.fixture()
def run(fixture_dir):
    runner = CliRunner()

    def go(*args, pair="p1_pair.json", invariants=None, constants=None):
        argv = list(args) + ["--pair", str(fixture_dir / pair)]
        if invariants:
            argv += ["--invariants", str(invariants if "/" in str(invariants) else fixture_dir / invariants)]
        if constants:
            argv += ["--constants", str(fixture_dir / constants)]
        return runner.invoke(main, argv)
    return go


@pytest.fixture(scope="module")
def perturbed_table(tmp_path_factory):
    key = InvariantKey.make(0, [((1, 0), "1"), ((0, 1), "1"), ((0, 0), "pt")], (1,))
    path = tmp_path_factory.mktemp("tables") / "perturbed.jsonl"
    store_table(p1_table().perturbed(key), path)
    return path


def test_product_text(run):
    res = run("product", "1,0", "0,1", constants="p1_constants.jsonl")
    assert res.exit_code == 0
    assert "theta_v1 * theta_v2 = q*theta_0" in res.output


def test_presentation_text(run):
    res = run("mirror-presentation", "--theta-bound", "4", "--q-bound", "5", constants="p1_constants.jsonl")
    assert res.exit_code == 0
    assert "relations: [x*y - q]" in res.output


def test_presentation_json(run):
    res = run("mirror-presentation", "--format", "json", "--grading", "1,1", constants="p1_constants.jsonl")
    doc = json.loads(res.output)
    assert doc["presentation"]["relations"] == ["x*y - q"]
    assert doc["presentation"]["relation_degrees"] == [2]


def test_check_all_passes_on_p1(run):
    res = run("check-all", invariants="p1_invariants.jsonl")
    assert res.exit_code == 0, res.output
    assert res.output.startswith("check-all: pass")


def test_perturbed_table_fails(run, perturbed_table):
    for cmd in ("assoc", "wdvv"):
        res = run(cmd, "--format", "json", invariants=perturbed_table)
        assert res.exit_code == 1, cmd
        assert json.loads(res.output)["status"] == "fail"


def test_perturbed_frobenius_fails(run, perturbed_table):
    res = run("frobenius", "--format", "json", invariants=perturbed_table)
    assert res.exit_code == 1
    assert json.loads(res.output)["failures"] > 0


def test_spanning_failure_exit_code(run):
    res = run("mirror-presentation", "--generators", "1,0", constants="p1_constants.jsonl")
    assert res.exit_code == 1
    assert "do not span" in res.output


def test_bad_pair_file(tmp_path):
    bad = tmp_path / "pair.json"
    bad.write_text("{ not json")
    res = CliRunner().invoke(main, ["validate", "--pair", str(bad)])
    assert res.exit_code == 2
    assert str(bad) in res.output


def test_points_without_beta(run):
    res = run("frobenius", "1,0", "0,1", constants="p1_constants.jsonl")
    assert res.exit_code == 2


def test_theta_bound_beyond_table(run):
    res = run("assoc", "--theta-bound", "13", invariants="p1_invariants.jsonl")
    assert res.exit_code == 2


def test_missing_table_for_command(run):
    res = run("wdvv", constants="p1_constants.jsonl")
    assert res.exit_code == 2


def test_incomplete_table_exit_code(run):
    res = run("check-all", pair="p2_line_pair.json", invariants="p2_line_invariants.jsonl")
    assert res.exit_code == 3
    assert "incomplete" in res.output


def test_z_window_overflow(run):
    res = run("j-function", "--z-window", "-1,1", "--t-order", "3", invariants="p1_invariants.jsonl")
    assert res.exit_code == 3


def test_json_is_byte_identical(tmp_path, fixture_dir):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        res = CliRunner().invoke(main, ["virasoro", "--pair", str(fixture_dir / "p1_pair.json"),
                                        "--invariants", str(fixture_dir / "p1_invariants.jsonl"),
                                        "--format", "json", "--out", str(path)])
        assert res.exit_code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["status"] == "pass"
