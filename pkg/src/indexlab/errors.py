"""Exception hierarchy shared by every engine.

The CLI maps these onto exit codes, so each class carries a ``kind`` tag that
ends up in the JSON error record.
"""


class IndexLabError(Exception):
    kind = "error"


class DomainError(IndexLabError, ValueError):
    """Input is well formed but outside the domain of the operation."""

    kind = "domain"


class MeshError(DomainError):
    """Structural violation of the triangle-mesh invariants."""

    kind = "mesh"


class ParseError(DomainError):
    kind = "parse"

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class LookupFailure(DomainError, LookupError):
    kind = "lookup"


class NumericError(IndexLabError, ArithmeticError):
    kind = "numeric"


class ConsistencyError(IndexLabError):
    """An internal cross-check failed; the result would be wrong."""

    kind = "consistency"


class ResourceError(IndexLabError):
    """A resource guard (enumeration size, mesh size) was exceeded."""

    kind = "resource"
