"""Exception hierarchy shared by all modules."""


class EntAssistError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(EntAssistError, ValueError):
    pass


class NormalizationError(EntAssistError, ValueError):
    pass


class PurityError(EntAssistError, ValueError):
    pass


class DomainError(EntAssistError, ValueError):
    pass


class NumericalError(EntAssistError, ArithmeticError):
    pass


class ResourceError(EntAssistError, RuntimeError):
    pass


class ParseError(EntAssistError, ValueError):
    pass


class UsageError(EntAssistError, ValueError):
    pass


class InfeasibleError(EntAssistError):
    """A transportation problem has no plan meeting every demand.

    ``witness`` is a set of output indices ``S`` for which the supply that can
    only be routed into ``S`` exceeds the demand of ``S`` (Hall's condition
    fails), ``deficit`` is the unmet mass.
    """

    def __init__(self, message, witness=None, deficit=None):
        super().__init__(message)
        self.witness = None if witness is None else tuple(sorted(witness))
        self.deficit = deficit
