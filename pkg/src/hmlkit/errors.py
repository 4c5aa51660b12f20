"""Exception hierarchy shared by the toolkit."""


class HmlError(Exception):
    """Base class for every error raised by hmlkit."""


class LtsError(HmlError, ValueError):
    """Malformed transition system, or an invalid state/label reference."""


class ParseError(HmlError, ValueError):
    """Syntax error in formula, CCS or ``.aut`` text.

    ``pos`` is a 0-based character offset (or None when unknown) and
    ``line`` a 1-based line number when the input is line oriented.
    """

    def __init__(self, message, pos=None, line=None):
        self.message = message
        self.pos = pos
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"offset {pos}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class EvaluationError(HmlError, ValueError):
    """A formula cannot be evaluated against a given LTS."""


class UnknownLabelError(EvaluationError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"unknown label {label!r}")


class FormulaTooDeepError(EvaluationError):
    pass


class ResourceLimitError(HmlError):
    """An explicit size or state budget was exceeded."""


class CcsError(HmlError, ValueError):
    """Semantic error in CCS definitions (unresolved or unguarded constant)."""


class NotABisimulationError(HmlError, ValueError):
    def __init__(self, counterexample):
        self.counterexample = counterexample
        super().__init__(f"relation is not a bisimulation: {counterexample}")


class InvariantViolation(HmlError, AssertionError):
    """An internal self-check failed. Always a bug."""
