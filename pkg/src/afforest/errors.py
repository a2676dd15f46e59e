"""Exception hierarchy.

Everything raised on purpose derives from :class:`AFForestError`, so the CLI
can map domain failures to exit code 1 without swallowing genuine bugs.
"""


class AFForestError(Exception):
    """Base class for all domain errors."""


class ValidationError(AFForestError):
    pass


class DuplicateLabel(ValidationError):
    pass


class SelfLoop(ValidationError):
    pass


class DuplicateArc(ValidationError):
    pass


class CircuitDetected(ValidationError):
    def __init__(self, witness):
        self.witness = tuple(witness)
        super().__init__("directed circuit: " + " -> ".join(self.witness))


class UnknownNode(ValidationError):
    pass


class ArcNotPresent(ValidationError):
    pass


class ArcAlreadyPresent(ValidationError):
    pass


class WouldCreateCircuit(ValidationError):
    def __init__(self, witness):
        self.witness = tuple(witness)
        super().__init__("adding the arc closes the circuit " + " -> ".join(self.witness))


class GameError(AFForestError):
    pass


class CoalitionOutOfRange(GameError):
    pass


class MissingTableEntry(GameError):
    pass


class WrongNodeSet(GameError):
    pass


class NodeSetMismatch(GameError):
    pass


class TooLarge(AFForestError):
    pass


class EnumerationCapExceeded(AFForestError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(
            f"{count} maximal spanning forests exceed the enumeration cap of {cap}; "
            "raise the cap or use Monte Carlo estimation (--mc)"
        )


class ForestMismatch(AFForestError):
    pass


class InvalidPlan(AFForestError):
    pass


class ParseError(AFForestError):
    def __init__(self, msg, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)


class SchemaError(AFForestError):
    pass
