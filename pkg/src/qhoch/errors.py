"""Exception hierarchy shared by all qhoch modules."""


class QhochError(Exception):
    """Base class for all qhoch errors."""


class ValidationError(QhochError):
    """Input data violates a structural axiom (field, algebra, map, schema)."""


class DimensionGuardError(QhochError):
    """A requested computation exceeds the configured size guard."""


class TruncationError(QhochError):
    """A computation needs chain levels beyond the stored truncation."""


class SubquotientError(QhochError):
    """An operator does not descend to the requested subquotient."""


class ChainConsistencyError(QhochError):
    """A verified-by-construction chain identity failed (broken input data)."""
