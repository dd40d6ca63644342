# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Norden Lab Jupyter application."""

import os
import sys
from concurrent.futures import ThreadPoolExecutor

from jupyter_core.application import JupyterApp, base_aliases
from tornado.log import LogFormatter
from traitlets import Enum, Float, Integer, Unicode, default

from ._version import __version__
from .errors import GenerationError, MetricError, ModelFormatError, UnknownCheckError
from .instance_forge import GENERATED_FRAME_KIND, KINDS, InstanceForge, InstanceRecipe, create_forge
from .instance_forge.manifest import StoredInstance, load_manifest, materialize
from .norden_model import DEFAULT_FD_STEP, dumps_model, load_model, validate
from .report import CorpusReport, Verifier, create_verifier, dumps_report, loads_report, render_text

VALIDATE = "validate"
VERIFY = "verify"
GENERATE = "generate"
CORPUS_RUN = "corpus-run"
REPORT = "report"
MATERIALIZE = "materialize"

COMMANDS = (VALIDATE, VERIFY, GENERATE, CORPUS_RUN, REPORT, MATERIALIZE)

# Add additional command line aliases
aliases = dict(base_aliases)
aliases.update(
    {
        "checks": "NordenLabApp.checks",
        "json": "NordenLabApp.json_path",
        "kind": "NordenLabApp.kind",
        "dim": "NordenLabApp.dim",
        "seed": "NordenLabApp.seed",
        "out": "NordenLabApp.out",
        "budget": "InstanceForge.search_budget",
        "format": "NordenLabApp.report_format",
        "jobs": "NordenLabApp.jobs",
        "fd-step": "NordenLabApp.fd_step",
        "tolerance-scale": "Verifier.tolerance_scale",
    }
)


class UsageError(ValueError):
    """Raised for invalid command lines."""


class NordenLabApp(JupyterApp):
    """Command-line front end of the verification library.

    - reads command line and environment variable settings
    - loads, validates or generates model files
    - runs the check registry and emits text or JSON reports
    - exits 0 when every check passes, 1 on a failed check, 2 on bad input
    """

    name = "norden-lab"
    version = __version__
    description = """
        Norden Lab

        Verifies the identities of natural connections on almost complex
        manifolds with Norden metric, on stored and generated instances.

        Commands: validate <file>, verify <file>, generate, corpus-run <dir>,
        report <file>, materialize <dir>.
    """

    # Also include when generating help options
    classes = [InstanceForge, Verifier]
    # Enable some command line shortcuts
    aliases = aliases

    checks = Unicode(
        "",
        config=True,
        help="Comma-separated check ids for verify and corpus-run; all checks when empty",
    )

    json_path = Unicode(None, allow_none=True, config=True, help="Also write the JSON report to this file")

    report_format = Enum(["text", "json"], "text", config=True, help="Format of reports printed to stdout")

    kind = Enum(list(KINDS), "quasi_kahler_search", config=True, help="Instance kind for generate")

    dim = Integer(4, config=True, help="Dimension 2n of the generated instance")

    seed = Integer(0, config=True, help="Seed of the generated instance")

    out = Unicode(None, allow_none=True, config=True, help="Model file written by generate; stdout when unset")

    fd_step_env = "NORDEN_FD_STEP"
    fd_step = Float(
        config=True,
        help="Finite-difference step of charts that do not set one (NORDEN_FD_STEP env var)",
    )

    @default("fd_step")
    def fd_step_default(self):
        return float(os.getenv(self.fd_step_env, DEFAULT_FD_STEP))

    jobs_env = "NORDEN_CORPUS_JOBS"
    jobs = Integer(config=True, help="Worker threads used by corpus-run (NORDEN_CORPUS_JOBS env var)")

    @default("jobs")
    def jobs_default(self):
        return int(os.getenv(self.jobs_env, 1))

    _log_formatter_cls = LogFormatter  # traitlet default is LevelFormatter

    @default("log_format")
    def _default_log_format(self) -> str:
        """override default log format to include milliseconds"""
        return "%(color)s[%(levelname)1.1s %(asctime)s.%(msecs).03d %(name)s]%(end_color)s %(message)s"

    def initialize(self, argv=None):
        """Parses the command line and creates the forge and verifier."""
        super().initialize(argv)
        self.init_configurables()

    def init_configurables(self):
        check_ids = [c.strip() for c in self.checks.split(",") if c.strip()]
        self.forge = create_forge(parent=self, log=self.log)
        self.verifier = create_verifier(parent=self, log=self.log, checks=check_ids)

    def _emit(self, text: str):
        sys.stdout.write(text)
        sys.stdout.flush()

    def _argument(self, command: str) -> str:
        if len(self.extra_args) != 2:
            raise UsageError(f"usage: {self.name} {command} <path>")
        return self.extra_args[1]

    def _write_json(self, report):
        if self.json_path:
            with open(self.json_path, "w", encoding="utf-8") as f:
                f.write(dumps_report(report))
            self.log.info("Wrote JSON report to %s", self.json_path)

    def _print_report(self, report):
        self._emit(dumps_report(report) if self.report_format == "json" else render_text(report))

    def load(self, path):
        return load_model(path, fd_step=self.fd_step)

    def run_validate(self) -> int:
        document = self.load(self._argument(VALIDATE))
        outcome = validate(document.structure, document.frame)
        for violation in outcome.violations:
            self.log.error(
                "%s: %s (%s, residual %.2e)",
                document.name,
                violation.message,
                violation.invariant,
                violation.residual,
            )
        if not outcome.passed:
            return 1
        self._emit(f"{document.name}: valid {document.kind} model, dim {document.dim}, signature {outcome.signature}\n")
        return 0

    def run_verify(self) -> int:
        document = self.load(self._argument(VERIFY))
        validate(document.structure, document.frame).raise_for_violations()
        report = self.verifier.verify(document, {"source": self.extra_args[1]})
        self._write_json(report)
        self._print_report(report)
        return 0 if report.passed else 1

    def run_generate(self) -> int:
        if len(self.extra_args) != 1:
            raise UsageError(f"usage: {self.name} generate --kind K --dim 2n --seed s [--out file]")
        try:
            recipe = InstanceRecipe(f"{self.kind}-{self.dim}-{self.seed}", self.kind, self.dim, self.seed)
        except ValueError as err:
            raise UsageError(str(err)) from err
        outcome = self.forge.run(recipe)
        if not outcome.found:
            self._emit(outcome.describe() + "\n")
            return 1
        document = self.forge.document(recipe, outcome)
        text = dumps_model(document.structure, document.frame, document.name, document.notes)
        if self.out:
            with open(self.out, "w", encoding="utf-8") as f:
                f.write(text)
            self.log.info("Wrote %s instance to %s", recipe.kind, self.out)
        else:
            self._emit(text)
        return 0

    def verify_entry(self, entry):
        """Report of one corpus entry; invalid models become a failing check."""
        if isinstance(entry, StoredInstance):
            document = self.load(entry.path)
            provenance = {"source": os.path.basename(entry.path)}
            if entry.recipe is not None:
                provenance.update(entry.recipe.to_dict())
        else:
            provenance = entry.to_dict()
            outcome = self.forge.run(entry)
            if not outcome.found:
                return self.verifier.search_miss(
                    entry.name, GENERATED_FRAME_KIND, entry.dim, outcome.describe(), provenance
                )
            document = self.forge.document(entry, outcome)
        checked = validate(document.structure, document.frame)
        if not checked.passed:
            return self.verifier.invalid(document, checked, provenance)
        return self.verifier.verify(document, provenance)

    def run_corpus(self) -> int:
        entries = load_manifest(self._argument(CORPUS_RUN))
        self.log.info("Running %d corpus entries with %d worker(s)", len(entries), self.jobs)
        with ThreadPoolExecutor(max_workers=max(1, self.jobs)) as pool:
            reports = list(pool.map(self.verify_entry, entries))
        corpus = CorpusReport.merge(reports)
        self._write_json(corpus)
        self._print_report(corpus)
        return 0 if corpus.passed else 1

    def run_report(self) -> int:
        with open(self._argument(REPORT), encoding="utf-8") as f:
            report = loads_report(f.read())
        self._print_report(report)
        return 0 if report.passed else 1

    def run_materialize(self) -> int:
        items = materialize(self.forge, self._argument(MATERIALIZE))
        for item in items:
            where = item.get("file", "not found")
            residuals = ", ".join(f"{k} {v:.2e}" for k, v in sorted(item.get("residuals", {}).items()))
            self._emit(f"{item['name']}: {where}" + (f" ({residuals})" if residuals else "") + "\n")
        return 0

    def run_command(self) -> int:
        """Runs the command named by the first positional argument and
        returns the exit code.
        """
        if not self.extra_args or self.extra_args[0] not in COMMANDS:
            raise UsageError(f"expected one of: {', '.join(COMMANDS)}")
        handlers = {
            VALIDATE: self.run_validate,
            VERIFY: self.run_verify,
            GENERATE: self.run_generate,
            CORPUS_RUN: self.run_corpus,
            REPORT: self.run_report,
            MATERIALIZE: self.run_materialize,
        }
        return handlers[self.extra_args[0]]()

    def start(self):
        """Runs the command and exits with its code."""
        super().start()
        try:
            code = self.run_command()
        except (ModelFormatError, MetricError, OSError, GenerationError) as err:
            self.log.critical("%s", err)
            code = 2
        except (UsageError, UnknownCheckError) as err:
            self.log.critical("%s", err)
            code = 2
        self.exit(code)


launch_instance = NordenLabApp.launch_instance
