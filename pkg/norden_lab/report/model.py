# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Verification reports and their text and JSON renderings."""

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .._version import __version__
from ..errors import ModelFormatError

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not_applicable"

VERDICTS = (PASS, FAIL, NOT_APPLICABLE)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check on one instance.

    ``residual`` and ``tolerance`` are ``None`` exactly when the check did not
    apply; ``reason`` then says why. ``paper_ref`` names the equation or
    theorem the check verifies, or ``plumbing``.
    """

    check_id: str
    statement: str
    verdict: str
    residual: Optional[float] = None
    tolerance: Optional[float] = None
    reason: str = ""
    paper_ref: str = ""

    @classmethod
    def measured(
        cls, check_id: str, statement: str, residual: float, tolerance: float, paper_ref: str = ""
    ) -> "CheckResult":
        verdict = PASS if residual <= tolerance else FAIL
        return cls(check_id, statement, verdict, float(residual), float(tolerance), paper_ref=paper_ref)

    @classmethod
    def skipped(cls, check_id: str, statement: str, reason: str, paper_ref: str = "") -> "CheckResult":
        return cls(check_id, statement, NOT_APPLICABLE, reason=reason, paper_ref=paper_ref)

    def to_dict(self) -> dict:
        doc = {
            "check_id": self.check_id,
            "statement": self.statement,
            "verdict": self.verdict,
            "paper_ref": self.paper_ref,
        }
        if self.reason:
            doc["reason"] = self.reason
        if self.verdict != NOT_APPLICABLE:
            doc["residual"] = self.residual
            doc["tolerance"] = self.tolerance
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "CheckResult":
        verdict = doc["verdict"]
        if verdict not in VERDICTS:
            raise ModelFormatError(f"unknown verdict '{verdict}'", field="verdict")
        paper_ref = doc.get("paper_ref", "")
        if verdict == NOT_APPLICABLE:
            return cls.skipped(doc["check_id"], doc["statement"], doc.get("reason", ""), paper_ref)
        return cls(
            doc["check_id"],
            doc["statement"],
            verdict,
            float(doc["residual"]),
            float(doc["tolerance"]),
            doc.get("reason", ""),
            paper_ref,
        )


def summarize(results) -> Dict[str, int]:
    counts = Counter(result.verdict for result in results)
    return {verdict: counts.get(verdict, 0) for verdict in VERDICTS}


@dataclass(frozen=True)
class VerificationReport:
    """Every check result for one instance, with its provenance."""

    instance_name: str
    kind: str
    dim: int
    checks: Tuple[CheckResult, ...] = ()
    provenance: Dict[str, object] = field(default_factory=dict)
    toolkit_version: str = __version__

    @property
    def summary(self) -> Dict[str, int]:
        return summarize(self.checks)

    @property
    def passed(self) -> bool:
        """True unless some check failed; not-applicable checks do not count."""
        return self.summary[FAIL] == 0

    def result(self, check_id: str) -> CheckResult:
        for check in self.checks:
            if check.check_id == check_id:
                return check
        raise KeyError(check_id)

    def to_dict(self) -> dict:
        return {
            "instance_name": self.instance_name,
            "kind": self.kind,
            "dim": self.dim,
            "checks": [check.to_dict() for check in self.checks],
            "summary": self.summary,
            "provenance": dict(self.provenance),
            "toolkit_version": self.toolkit_version,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VerificationReport":
        return cls(
            instance_name=doc["instance_name"],
            kind=doc["kind"],
            dim=int(doc["dim"]),
            checks=tuple(CheckResult.from_dict(check) for check in doc["checks"]),
            provenance=dict(doc.get("provenance", {})),
            toolkit_version=doc["toolkit_version"],
        )


@dataclass(frozen=True)
class CorpusReport:
    """Reports of a corpus run, ordered by instance name."""

    reports: Tuple[VerificationReport, ...] = ()
    toolkit_version: str = __version__

    @classmethod
    def merge(cls, reports) -> "CorpusReport":
        return cls(tuple(sorted(reports, key=lambda report: report.instance_name)))

    @property
    def summary(self) -> Dict[str, int]:
        return summarize(check for report in self.reports for check in report.checks)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    def to_dict(self) -> dict:
        return {
            "reports": [report.to_dict() for report in self.reports],
            "summary": self.summary,
            "toolkit_version": self.toolkit_version,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CorpusReport":
        return cls(
            tuple(VerificationReport.from_dict(report) for report in doc["reports"]),
            doc["toolkit_version"],
        )


def dumps_report(report) -> str:
    """JSON text of a single or corpus report; floats keep full precision."""
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def loads_report(text: str):
    """Parses :func:`dumps_report` output back into a report.

    Raises
    ------
    ModelFormatError
        If the text is not a report document
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelFormatError(f"invalid report JSON: {err.msg}", line=err.lineno) from err
    if not isinstance(doc, dict):
        raise ModelFormatError("report must be a JSON object")
    try:
        if "reports" in doc:
            return CorpusReport.from_dict(doc)
        return VerificationReport.from_dict(doc)
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise ModelFormatError(f"malformed report: {err}") from err


def _format(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.2e}"


def _render_one(report: VerificationReport) -> List[str]:
    lines = [f"{report.instance_name} ({report.kind}, dim {report.dim})"]
    width = max((len(check.check_id) for check in report.checks), default=0)
    for check in report.checks:
        line = f"  {check.verdict:<14} {check.check_id:<{width}}  residual {_format(check.residual)}"
        line += f"  tolerance {_format(check.tolerance)}"
        if check.paper_ref:
            line += f"  [{check.paper_ref}]"
        if check.reason:
            line += f"  ({check.reason})"
        lines.append(line.rstrip())
    lines.append("  " + _render_summary(report.summary))
    return lines


def _render_summary(summary: Dict[str, int]) -> str:
    return ", ".join(f"{summary[verdict]} {verdict}" for verdict in VERDICTS)


def render_text(report) -> str:
    """Human-readable report; residuals in scientific notation with three
    significant digits.

    >>> result = CheckResult.measured("jacobi_identity", "", 0.0, 1e-9, "plumbing")
    >>> print(render_text(VerificationReport("F4", "lie_algebra", 4, (result,))).splitlines()[1])
      pass           jacobi_identity  residual 0.00e+00  tolerance 1.00e-09  [plumbing]
    """
    if isinstance(report, VerificationReport):
        return "\n".join(_render_one(report)) + "\n"
    lines = []
    for one in report.reports:
        lines.extend(_render_one(one))
    lines.append(f"corpus: {len(report.reports)} instances, {_render_summary(report.summary)}")
    return "\n".join(lines) + "\n"
