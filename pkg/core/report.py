# core/report.py
import json
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field

from core import __version__
from core.symalg import ModElem, mod_serialize
from utils.config_loader import get_toolkit_settings
from utils.logger import logger


class Violation(BaseModel):
    """One basis tuple on which an identity fails."""

    basis_tuple: List[str]
    lhs: str
    rhs: str
    residual: str


class CheckResult(BaseModel):
    """Outcome of one named identity over all basis tuples."""

    name: str
    passed: bool
    basis_tuple: Optional[List[str]] = None
    lhs: Optional[str] = None
    rhs: Optional[str] = None
    residual: Optional[str] = None
    violation_count: int = 0
    violations: List[Violation] = Field(default_factory=list)
    detail: Optional[str] = None


class Report(BaseModel):
    """Deterministic, machine-readable result of a command or check."""

    tool_version: str = __version__
    subject: str
    checks: List[CheckResult] = Field(default_factory=list)
    artifacts: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, check: CheckResult) -> "Report":
        self.checks.append(check)
        return self

    def merge(self, other: "Report", prefix: str = "") -> "Report":
        """Append the checks of ``other``, optionally renamed ``prefix:name``."""
        for check in other.checks:
            name = f"{prefix}:{check.name}" if prefix else check.name
            self.checks.append(check.model_copy(update={"name": name}))
        self.artifacts.update(other.artifacts)
        return self

    def failed_checks(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def check(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        data = self.model_dump()
        data["passed"] = self.passed
        return data

    def to_json(self, indent: Optional[int] = None) -> str:
        if indent is None:
            indent = get_toolkit_settings()["json_indent"]
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent, ensure_ascii=False)

    def summary_lines(self) -> List[str]:
        lines = [f"{self.subject}: {'PASS' if self.passed else 'FAIL'}"]
        for check in self.checks:
            mark = "✅" if check.passed else "❌"
            line = f"  {mark} {check.name}"
            if check.detail:
                line += f" ({check.detail})"
            if not check.passed and check.basis_tuple is not None:
                line += f" at ({', '.join(check.basis_tuple)}): residual {check.residual}"
                if check.violation_count > 1:
                    line += f" [+{check.violation_count - 1} more]"
            lines.append(line)
        for name in sorted(self.artifacts):
            lines.append(f"  📦 {name}")
        return lines


class CheckBuilder:
    """Accumulates comparisons for a single named identity."""

    def __init__(
        self,
        name: str,
        basis_names: Optional[Sequence[str]] = None,
        max_residuals: Optional[int] = None,
    ):
        self.name = name
        self.basis_names = basis_names
        self.max_residuals = (
            max_residuals if max_residuals is not None else get_toolkit_settings()["max_residuals"]
        )
        self.violations: List[Violation] = []
        self.violation_count = 0
        self.detail: Optional[str] = None

    def compare(self, basis_tuple: Sequence[str], lhs: ModElem, rhs: ModElem) -> bool:
        residual = lhs - rhs
        if residual.is_zero():
            return True
        self.violation_count += 1
        if len(self.violations) < self.max_residuals:
            names = self.basis_names
            self.violations.append(
                Violation(
                    basis_tuple=list(basis_tuple),
                    lhs=mod_serialize(lhs, names),
                    rhs=mod_serialize(rhs, names),
                    residual=mod_serialize(residual, names),
                )
            )
        return False

    def flag(self, basis_tuple: Sequence[str], lhs: str, rhs: str, residual: str) -> None:
        """Record a violation that is not a module-element comparison."""
        self.violation_count += 1
        if len(self.violations) < self.max_residuals:
            self.violations.append(
                Violation(basis_tuple=list(basis_tuple), lhs=lhs, rhs=rhs, residual=residual)
            )

    def result(self) -> CheckResult:
        passed = self.violation_count == 0
        first = self.violations[0] if self.violations else None
        if not passed:
            logger.warning(f"⚠️ {self.name} failed on {self.violation_count} tuple(s)")
        else:
            logger.debug(f"✅ {self.name} holds")
        return CheckResult(
            name=self.name,
            passed=passed,
            basis_tuple=first.basis_tuple if first else None,
            lhs=first.lhs if first else None,
            rhs=first.rhs if first else None,
            residual=first.residual if first else None,
            violation_count=self.violation_count,
            violations=list(self.violations),
            detail=self.detail,
        )


def single_check(name: str, passed: bool, detail: Optional[str] = None) -> CheckResult:
    """A check without tuples, e.g. a classification or a precondition."""
    return CheckResult(name=name, passed=passed, detail=detail)
