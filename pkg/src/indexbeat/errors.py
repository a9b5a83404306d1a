"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ValidationError -> 2,
NonViableMarketError -> 3, verification failure -> 4, I/O -> 5.
"""


class IndexbeatError(Exception):
    pass


class ValidationError(IndexbeatError):
    """Bad configuration or malformed inputs."""

    def __init__(self, message: str, code: str = "bad-value"):
        super().__init__(message)
        self.code = code


class IncompleteMarketError(ValidationError):
    """Volatility matrix is rank deficient: the market is incomplete.

    Structurally distinct from a non-viable market (where the excess
    appreciation simply leaves the column span).
    """

    def __init__(self, message: str):
        super().__init__(message, code="rank-deficient")


class ScheduleAlignmentError(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, code="misaligned-schedule")


class NonViableMarketError(IndexbeatError):
    """No market price of risk exists at the configured tolerance."""

    def __init__(self, residual: float, tol: float):
        super().__init__(
            f"market is not viable: least-squares residual {residual:.3e} "
            f"exceeds tolerance {tol:.3e}"
        )
        self.residual = residual
        self.tol = tol
