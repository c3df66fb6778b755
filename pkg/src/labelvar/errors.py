"""Exception types shared across the package.

Every error raised by labelvar is a subclass of :class:`LabelVarError`, so
callers can catch one type at the boundary.  The CLI maps each family to a
distinct process exit code (see :data:`EXIT_CODES`).
"""


class LabelVarError(Exception):
    """Base class for all labelvar errors."""


class InvalidInputError(LabelVarError):
    """Malformed data: bad shapes, out-of-range labels, length mismatches."""


class ParseError(InvalidInputError):
    """A file could not be parsed; carries the position of the defect."""

    def __init__(self, message, path=None, line=None, field=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field}")
        prefix = ", ".join(loc)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line
        self.field = field


class InvalidConfigError(LabelVarError):
    """A configuration value is outside its documented domain."""


class OperatorInapplicableError(InvalidConfigError):
    """A mutation operator cannot be applied to this model shape."""


class DegenerateReferenceError(LabelVarError):
    """The reference data cannot support the requested estimate
    (for example, its top-confidence area is empty)."""


class GateStarvationError(DegenerateReferenceError):
    """Mutant generation exhausted its attempt budget before enough
    candidates passed the quality gate."""

    def __init__(self, message, attempts, accepted):
        super().__init__(message)
        self.attempts = attempts
        self.accepted = accepted
        self.acceptance_rate = accepted / attempts if attempts else 0.0


EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_DEGENERATE = 4


def exit_code_for(err: Exception) -> int:
    """Map an exception to the CLI exit code for its error family."""
    if isinstance(err, DegenerateReferenceError):
        return EXIT_DEGENERATE
    if isinstance(err, InvalidConfigError):
        return EXIT_CONFIG
    if isinstance(err, InvalidInputError):
        return EXIT_INPUT
    return 1
