class RankOneError(Exception):
    pass


class DomainError(RankOneError):
    """An element or set does not belong to the group it is used with."""


class ValidationError(RankOneError):
    """A parameter sequence fails a structural clause required by an operation."""


class InvariantViolation(RankOneError):
    """An internal consistency check failed; the inputs contradict their own claims."""


class PreconditionError(RankOneError):
    pass


class FormatError(RankOneError):
    """Malformed or non-canonical input document."""
