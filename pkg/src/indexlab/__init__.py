"""Exact, desk-scale reproductions of index computations on surfaces, lattices
and curve singularities."""

from .errors import (
    ConsistencyError,
    DomainError,
    IndexLabError,
    LookupFailure,
    MeshError,
    NumericError,
    ParseError,
    ResourceError,
)

__all__ = [
    "ConsistencyError",
    "DomainError",
    "IndexLabError",
    "LookupFailure",
    "MeshError",
    "NumericError",
    "ParseError",
    "ResourceError",
]
