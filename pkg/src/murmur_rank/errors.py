"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class MurmurRankError(Exception):
    """Base class for all errors raised by murmur_rank."""

    exit_code = 1


# --------------------------------------------------
# --- Input problems (exit code 2) ---
# --------------------------------------------------
class ValidationError(MurmurRankError, ValueError):
    exit_code = 2


class InvalidArgumentError(ValidationError):
    pass


class OutOfRangeError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CurveValidationError(ValidationError):
    def __init__(self, message, label=None, line=None):
        self.label = label
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if label:
            where.append(f"curve '{label}'")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class BadReductionError(ValidationError):
    pass


class EmptyClassError(ValidationError):
    pass


class DegenerateInputError(ValidationError):
    pass


class OutputExistsError(ValidationError):
    pass


# --------------------------------------------------
# --- Numerical problems (exit code 3) ---
# --------------------------------------------------
class NumericalFailure(MurmurRankError, ArithmeticError):
    exit_code = 3

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        if self.diagnostics:
            details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
            message = f"{message} ({details})"
        super().__init__(message)


class ToleranceError(NumericalFailure):
    pass


class HasseBoundError(NumericalFailure):
    pass
