from pathlib import Path

import pytest

from relqc.fixtures import p1_constants, p1_table, p2_line_constants, p2_line_table
from relqc.invariants import InvariantEngine
from relqc.mirror import MirrorAlgebra, StructureConstants
from relqc.novikov import NovikovTruncation
from relqc.quantum import QuantumCohomology

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def p1_tab():
    return p1_table()


@pytest.fixture(scope="session")
def p1(p1_tab):
    return p1_tab.pair


@pytest.fixture(scope="session")
def p1_engine(p1_tab):
    return InvariantEngine(p1_tab)


@pytest.fixture(scope="session")
def p1_qc(p1_engine, p1):
    return QuantumCohomology(p1_engine, NovikovTruncation(p1, bound=3))


@pytest.fixture(scope="session")
def p1_oracle_constants():
    return p1_constants()


@pytest.fixture(scope="session")
def p1_algebra(p1_oracle_constants):
    c = p1_oracle_constants
    return MirrorAlgebra(c, NovikovTruncation(c.pair, bound=5), 4)


@pytest.fixture(scope="session")
def p2_tab():
    return p2_line_table()


@pytest.fixture(scope="session")
def p2(p2_tab):
    return p2_tab.pair


@pytest.fixture(scope="session")
def p2_algebra(p2_tab):
    c = StructureConstants(p2_tab.pair, engine=InvariantEngine(p2_tab))
    return MirrorAlgebra(c, NovikovTruncation(p2_tab.pair, bound=5), 4)


@pytest.fixture(scope="session")
def p2_oracle_constants():
    return p2_line_constants()
