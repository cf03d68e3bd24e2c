"""Exception types shared across the package."""


class RcaError(Exception):
    """Base class for all rcatool errors."""


class MalformedDocument(RcaError):
    """A serialized document could not be parsed (bad JSON, unknown tags)."""


class InvalidGraph(RcaError):
    """A knowledge graph failed schema validation on load."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"schema validation failed: {lines}")


class UnknownLine(RcaError):
    pass


class UnknownVariable(RcaError):
    pass


class SelfBlacklist(RcaError):
    pass


class InvalidSequence(RcaError):
    """A station or process-step sequence contains a cycle or branch."""


class InfeasibleConfig(RcaError):
    pass


class EmptyResult(RcaError):
    """Preprocessing removed every column."""


class DimensionMismatch(RcaError):
    pass


class InconsistentOrder(RcaError):
    pass


class SearchSpaceTooLarge(RcaError):
    pass
