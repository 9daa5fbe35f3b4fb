"""Exception taxonomy shared by all modules.

The CLI maps these onto stable exit codes (see cli.py): parse 2,
precondition 3, hypothesis 4, config 5.
"""


class JointLabError(Exception):
    """Base class for all package errors."""


class ShapeError(JointLabError):
    """Matrix operand has the wrong shape."""


class DegenerateInputError(JointLabError):
    """Geometrically or algebraically degenerate input (zero direction, zero polynomial, ...)."""


class PreconditionError(JointLabError):
    """A documented operation precondition was violated."""


class HypothesisError(JointLabError):
    """An instance fails the hypotheses of a traced theorem; carries a witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ConfigError(JointLabError):
    """A pipeline configuration violates the constraint system."""


class ParseError(JointLabError):
    """A text input failed to parse; carries the 1-based line number."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
