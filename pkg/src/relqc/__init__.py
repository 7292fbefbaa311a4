"""Relative quantum cohomology, mirror algebras and Virasoro operators of
simple normal-crossing pairs, computed exactly on finite truncations."""

from relqc.errors import (
    ConfigurationError,
    DataError,
    DegreeError,
    IncompleteTableError,
    NotNefError,
    RelqcError,
    SpanningError,
    TruncationOverflow,
)
from relqc.pair_geometry import (
    ConePoint,
    DualComplex,
    PairDescription,
    StratumData,
    build_dual_complex,
    contact_vector,
    lattice_points,
    load_pair,
    log_canonical_degree,
    nef_classification,
)
from relqc.state_space import StateClass, dual_basis, multi_degree, pair_classes

__all__ = [
    "ConePoint",
    "ConfigurationError",
    "DataError",
    "DegreeError",
    "DualComplex",
    "IncompleteTableError",
    "NotNefError",
    "PairDescription",
    "RelqcError",
    "SpanningError",
    "StateClass",
    "StratumData",
    "TruncationOverflow",
    "build_dual_complex",
    "contact_vector",
    "dual_basis",
    "lattice_points",
    "load_pair",
    "log_canonical_degree",
    "multi_degree",
    "nef_classification",
    "pair_classes",
]
