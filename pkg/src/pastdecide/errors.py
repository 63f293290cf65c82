"""Exception hierarchy shared by all modules."""


class PastError(Exception):
    """Base class for every error raised by the engine."""


class InputError(PastError):
    """Problems with user-supplied loops or vectors (CLI exit code 2)."""


class ParseError(InputError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class NotCommuting(InputError):
    pass


class NotDiagonalizable(InputError):
    pass


class ProbabilityOutOfRange(InputError):
    pass


class SemiringViolation(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NegativeEntryForNonnegSemiring(InputError):
    pass


class DivisionByZero(PastError, ZeroDivisionError):
    pass


class NegativeRadicand(PastError, ValueError):
    pass


class NonPositiveArgument(PastError, ValueError):
    pass


class SingularMatrix(PastError):
    pass


class SolverError(PastError):
    pass


class SolverNotFound(SolverError):
    pass


class SolverTimeout(SolverError):
    pass


class ModelParseError(SolverError):
    pass


class NoCertificate(PastError):
    pass


class GuardViolatedAtLift(PastError):
    pass


class NonSquare(InputError):
    pass
