# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Verification of Norden instances against the registered identity checks."""

import os
from typing import Optional, Sequence

from traitlets import Float, List, Unicode, default
from traitlets.config.configurable import LoggingConfigurable

from ..connections import NOT_QUASI_KAHLER_NOTE
from ..norden_model import ModelDocument, ValidationOutcome
from .checks import REGISTRY, Check, Measurement, NotApplicable, select
from .references import PLUMBING
from .context import InstanceContext
from .model import (
    FAIL,
    NOT_APPLICABLE,
    PASS,
    CheckResult,
    CorpusReport,
    VerificationReport,
    dumps_report,
    loads_report,
    render_text,
)

SEARCH_OUTCOME = "search_outcome"
MODEL_VALID = "model_valid"


class Verifier(LoggingConfigurable):
    """Runs the check registry over model documents."""

    tolerance_scale_env = "NORDEN_TOLERANCE_SCALE"
    tolerance_scale = Float(
        config=True,
        help="Multiplies every check tolerance, for chart-mode experiments (NORDEN_TOLERANCE_SCALE env var)",
    )

    @default("tolerance_scale")
    def tolerance_scale_default(self):
        return float(os.getenv(self.tolerance_scale_env, 1.0))

    checks = List(
        Unicode(),
        config=True,
        help="Check ids to run, in registry order; all registered checks when empty",
    )

    def selected(self) -> Sequence[Check]:
        return select(self.checks)

    def verify(self, document: ModelDocument, provenance: Optional[dict] = None) -> VerificationReport:
        """Runs the selected checks on one instance.

        The document should already have passed :func:`validate`; checks read
        derived geometry that is undefined for non-Norden input.
        """
        context = InstanceContext(document.structure, document.frame)
        results = []
        for check in self.selected():
            result = check.run(context, self.tolerance_scale)
            if result.verdict == NOT_APPLICABLE:
                self.log.debug("%s %s: not applicable, %s", document.name, check.check_id, result.reason)
            else:
                self.log.debug(
                    "%s %s: %s (residual %.2e, tolerance %.2e)",
                    document.name,
                    check.check_id,
                    result.verdict,
                    result.residual,
                    result.tolerance,
                )
            results.append(result)
        self._warn_notes(document, context)
        provenance = dict(provenance or {})
        if document.notes:
            provenance.setdefault("notes", document.notes)
        report = VerificationReport(
            document.name,
            document.kind,
            document.dim,
            tuple(results),
            provenance,
        )
        summary = report.summary
        self.log.info(
            "%s: %d pass, %d fail, %d not applicable",
            document.name,
            summary[PASS],
            summary[FAIL],
            summary[NOT_APPLICABLE],
        )
        return report

    def _warn_notes(self, document: ModelDocument, context: InstanceContext):
        # B- and KT-connections are only built when some check read them
        for name in ("b", "kt"):
            dc = context.__dict__.get(name)
            if dc is not None and NOT_QUASI_KAHLER_NOTE in dc.notes:
                self.log.warning("%s %s: %s", document.name, dc.label, NOT_QUASI_KAHLER_NOTE)

    def invalid(self, document: ModelDocument, outcome: ValidationOutcome, provenance=None) -> VerificationReport:
        """Report of a model that is not a Norden structure."""
        first = outcome.violations[0]
        self.log.error("%s: %s", document.name, first.message)
        result = CheckResult(
            MODEL_VALID,
            "the model satisfies the Norden axioms",
            FAIL,
            first.residual,
            0.0,
            first.message,
            PLUMBING,
        )
        return VerificationReport(document.name, document.kind, document.dim, (result,), dict(provenance or {}))

    def search_miss(self, name: str, kind: str, dim: int, message: str, provenance=None) -> VerificationReport:
        """Report of a corpus search that found no instance."""
        self.log.warning("%s: %s", name, message)
        result = CheckResult.skipped(SEARCH_OUTCOME, "the instance search found an instance", message, PLUMBING)
        return VerificationReport(name, kind, dim, (result,), dict(provenance or {}))


def create_verifier(*args, **kwargs):
    return Verifier(*args, **kwargs)


__all__ = [
    "REGISTRY",
    "Check",
    "CheckResult",
    "CorpusReport",
    "Measurement",
    "NotApplicable",
    "VerificationReport",
    "Verifier",
    "create_verifier",
    "dumps_report",
    "loads_report",
    "render_text",
]
