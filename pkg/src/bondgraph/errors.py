"""Exception hierarchy shared by every module of the package."""


class BondGraphError(Exception):
    """Base class for all errors raised by this package."""


class ExprError(BondGraphError):
    pass


class ParseError(ExprError):
    """Syntax or resolution error while parsing an expression string."""

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class EvaluationError(ExprError):
    pass


class ModelError(BondGraphError):
    pass


class DocumentError(ModelError):
    """A model document violates the schema; `pointer` is a JSON pointer."""

    def __init__(self, message, pointer=""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


class ReductionError(BondGraphError):
    pass


class SimulationError(BondGraphError):
    pass
