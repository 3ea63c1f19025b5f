"""Compact projective planes from explicit coordinate algebras, with
checkable verification suites for their axioms, polarities and motions."""

from ._version import __version__
from .coordinate_structures import catalog_ids, structure_from_id
from .errors import (
    DegenerateInputError,
    DivisionByZeroError,
    NotFoundError,
    ParameterError,
    PlanelabError,
    SolverError,
    StructuralError,
    UnsupportedError,
)
from .plane_engine import Affine, AtInfinity, Infinity, NonVertical, Slope, Vertical, catalog_plane_ids, plane_from_id
from .polarities import catalog_polarities, get_polarity, polarity_names

__all__ = [
    "__version__",
    "Affine",
    "AtInfinity",
    "Infinity",
    "NonVertical",
    "Slope",
    "Vertical",
    "catalog_ids",
    "catalog_plane_ids",
    "catalog_polarities",
    "get_polarity",
    "plane_from_id",
    "polarity_names",
    "structure_from_id",
    "DegenerateInputError",
    "DivisionByZeroError",
    "NotFoundError",
    "ParameterError",
    "PlanelabError",
    "SolverError",
    "StructuralError",
    "UnsupportedError",
]
