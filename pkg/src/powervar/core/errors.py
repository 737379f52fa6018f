class PowerVarError(Exception):
    """Base class for every error raised by powervar."""


class InputValidationError(PowerVarError, ValueError):
    """Signal or spectrum data violates its type invariants (e.g. NaN/Inf)."""


class DegenerateInputError(InputValidationError):
    """Input is well-formed but too short to test (N < 2)."""


class SignalParseError(InputValidationError):
    """A signal file row could not be parsed into two finite decimals."""
    def __init__(self, message: str, path=None, line_no: int | None = None):
        self.path = path
        self.line_no = line_no
        where = f"{path}:{line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{message}")


class InvalidArgumentError(PowerVarError, ValueError):
    """A count, level or parameter lies outside its permitted range."""


class RuntimeSetupError(PowerVarError):
    """A generator was registered twice for the same process kind."""
