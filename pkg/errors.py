from typing import Optional

from pydantic import BaseModel


class SequenceTestError(Exception):
    """Base class for every error raised by the library"""

    code = "SEQUENCE_TEST_ERROR"
    exit_status = 1

    def __init__(self, message: str, details: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_record(self) -> "ErrorRecord":
        return ErrorRecord(
            error={"code": self.code, "message": self.message, "details": self.details}
        )


class ConfigNotFoundError(SequenceTestError):
    code = "CONFIG_NOT_FOUND"
    exit_status = 2


class InvalidConfigError(SequenceTestError):
    """Invalid argument or configuration; the message names the offending fields"""

    code = "INVALID_CONFIG"
    exit_status = 3


class DomainError(SequenceTestError):
    """A precondition of an operation does not hold"""

    code = "DOMAIN_ERROR"
    exit_status = 3


class MissingObservationError(DomainError):
    code = "MISSING_OBSERVATION"


class SolverError(SequenceTestError):
    """Root finding could not isolate a unique bracket"""

    code = "SOLVER_FAILURE"
    exit_status = 4


class SupportCapError(SequenceTestError):
    code = "SUPPORT_CAP_EXCEEDED"
    exit_status = 5

    def __init__(self, cap: int, required: Optional[int] = None):
        message = f"support exceeds support_cap={cap}"
        if required is not None:
            message += f" (needs at least {required} indices)"
        super().__init__(message)
        self.cap = cap
        self.required = required


class ErrorRecord(BaseModel):
    error: dict

    def one_line(self) -> str:
        line = f"{self.error['code']}: {self.error['message']}"
        if self.error.get("details"):
            line += f" ({self.error['details']})"
        return line.replace("\n", " ")
