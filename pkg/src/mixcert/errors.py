"""Exception types shared across the package."""


class MixcertError(Exception):
    """Base class for all errors raised by mixcert."""


class GraphError(MixcertError, ValueError):
    """Invalid graph structure or argument (self-loop, empty set, ...)."""


class ParseError(GraphError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class InfeasibleError(MixcertError, ValueError):
    """Parameters outside the supported range (e.g. exact mode on a large graph)."""


class GenerationError(MixcertError, RuntimeError):
    def __init__(self, message, attempts=None):
        self.attempts = attempts
        super().__init__(message)


class NotRegularError(GraphError):
    pass


class HypothesisError(MixcertError):
    """The well-mixing hypothesis of a procedure does not hold on the input."""

    def __init__(self, message, count=None, required=None):
        self.count = count
        self.required = required
        super().__init__(message)


class ExtractionError(MixcertError):
    pass


class CycleNotFoundError(MixcertError):
    """No cycle meeting the requested length was found.

    ``best`` holds the longest cycle seen (possibly ``None``) and ``witness``
    a vertex set whose neighbourhood is too small, when one was identified.
    """

    def __init__(self, message, best=None, witness=None):
        self.best = best
        self.witness = witness
        self.recheck_precondition = True
        super().__init__(message)
