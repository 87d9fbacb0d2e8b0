class TldError(Exception):
    """Base class of every error raised by the solver."""


class KbSyntaxError(TldError, ValueError):
    """A knowledge base text that does not parse or does not validate."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f'{message} (line {line}, column {column})'
        super().__init__(message)


class ParameterDomainError(KbSyntaxError):
    pass


class DiamondCountError(TldError, ValueError):
    pass


class TranslationError(TldError, ValueError):
    pass


class ResourceLimitExceeded(TldError, RuntimeError):
    pass


class UnknownAtomError(TldError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ''


class UnsatisfiableError(TldError):
    pass


class WitnessError(TldError, RuntimeError):
    pass
