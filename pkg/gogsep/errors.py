"""
Exception hierarchy and structured validation reports
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


class GogSepError(Exception):
    """Base class for every error raised by gogsep"""

    exit_code = 4


class InputError(GogSepError):
    exit_code = 2


class ProblemFileError(InputError):
    pass


class MalformedWordError(InputError):
    pass


class TrivialWordError(InputError):
    pass


class DisconnectedGraphError(InputError):
    pass


class NotInKernelError(InputError):
    pass


class ConditionError(InputError):
    """Conditions I/II are unverified or violated where they are required"""


class NotNormalError(InputError):
    def __init__(self, message: str, witness: Optional[Dict[str, int]] = None):
        super().__init__(message)
        self.witness = witness or {}


class ValidationError(InputError):
    def __init__(self, message: str, report: "ValidationReport"):
        super().__init__(message)
        self.report = report


class BudgetExceeded(GogSepError):
    exit_code = 3


class InvariantBreach(GogSepError):
    exit_code = 4


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    witness: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, "witness": self.witness}


@dataclass
class ValidationReport:
    """Outcome of a structural validator: violations plus extracted facts"""

    subject: str
    violations: List[Violation] = field(default_factory=list)
    facts: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, **witness: Any) -> None:
        self.violations.append(Violation(code, message, witness))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def raise_if_invalid(self) -> None:
        if not self.ok:
            first = self.violations[0]
            raise ValidationError(f"{self.subject}: {first.message}", self)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subject": self.subject,
            "valid": self.ok,
            "violations": [v.to_dict() for v in self.violations],
            "facts": self.facts,
        }
