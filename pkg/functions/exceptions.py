"""
Exception hierarchy for the fixed-space toolkit.

Every error carries a machine-readable ``code`` and a human ``detail``;
the command line maps them onto exit codes and report statuses.
"""

from typing import Any

from config.fixedspace_config import get_error_message


class FixedSpaceError(Exception):
    """Base error with a code and a detail message."""

    code = "error"

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context = context
        self.key = None

    @classmethod
    def from_template(cls, key: str, **kwargs: Any) -> "FixedSpaceError":
        error = cls(get_error_message(key, **kwargs), **kwargs)
        error.key = key
        return error

    def to_dict(self) -> dict:
        return {"code": self.code, "detail": self.detail}


class InputError(FixedSpaceError):
    """Malformed or inconsistent user input."""

    code = "input_error"


class ContractViolation(FixedSpaceError):
    """A documented precondition does not hold."""

    code = "contract_violation"


class NumericalFailure(FixedSpaceError):
    """A factorization or iterative procedure failed."""

    code = "numerical_failure"


class InternalInconsistency(FixedSpaceError):
    """Results contradict a guarantee that holds for valid inputs."""

    code = "internal_inconsistency"


class PositivityViolation(FixedSpaceError):
    """An operator that must be positive semi-definite is not."""

    code = "positivity_violation"
