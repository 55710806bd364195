class GenboundError(Exception):
    """Base error; `detail` is what the CLI prints."""

    kind = "error"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InvalidParameterError(GenboundError, ValueError):
    kind = "invalid-parameter"


class NumericFailureError(GenboundError, ArithmeticError):
    kind = "numeric-failure"


class InfeasibleSpecError(GenboundError, ValueError):
    kind = "infeasible-spec"


class PreconditionError(GenboundError, ValueError):
    kind = "precondition-error"


class DomainError(GenboundError, ValueError):
    kind = "domain-error"


class SizeLimitError(GenboundError):
    kind = "size-limit-error"


class ConfigError(GenboundError, ValueError):
    kind = "config-error"


class OutputError(GenboundError, OSError):
    kind = "io-error"
