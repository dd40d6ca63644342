# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Tests for the norden-lab command line application."""

import json
import os
import shutil
from pathlib import Path

import pytest

from norden_lab.labapp import NordenLabApp
from norden_lab.norden_model import load_model
from norden_lab.report import loads_report


def run(*argv):
    """Runs the app with ``argv`` and returns its exit code."""
    app = NordenLabApp()
    app.initialize(list(argv))
    try:
        with pytest.raises(SystemExit) as info:
            app.start()
    finally:
        NordenLabApp.clear_instance()
    return info.value.code


@pytest.fixture
def small_corpus(tmp_path, corpus_dir):
    shutil.copy(os.path.join(corpus_dir, "F4.json"), tmp_path / "F4.json")
    manifest = {
        "instances": [
            {"name": "F4", "file": "F4.json"},
            {"name": "FL6", "kind": "flat", "dim": 6},
            {"name": "RN4", "kind": "random_norden", "dim": 4, "seed": 1},
        ]
    }
    (tmp_path / "MANIFEST").write_text(json.dumps(manifest))
    return tmp_path


class TestLabAppConfig:
    """Tests configuration of the app."""

    def test_config_env_vars(self, monkeypatch):
        """Env vars should be honored for traitlets."""
        # Environment vars are always strings
        monkeypatch.setenv("NORDEN_FD_STEP", "0.001")
        monkeypatch.setenv("NORDEN_CORPUS_JOBS", "3")

        app = NordenLabApp()

        assert app.fd_step == 0.001
        assert app.jobs == 3
        assert app.kind == "quasi_kahler_search"
        assert app.dim == 4
        NordenLabApp.clear_instance()

    def test_aliases(self, tmp_path):
        app = NordenLabApp()
        app.initialize(
            ["verify", "F4.json", "--checks=a,b", "--tolerance-scale=5", "--jobs=2", f"--json={tmp_path}/r.json"]
        )
        assert app.extra_args == ["verify", "F4.json"]
        assert app.verifier.checks == ["a", "b"]
        assert app.verifier.tolerance_scale == 5.0
        assert app.jobs == 2
        assert app.json_path == f"{tmp_path}/r.json"
        NordenLabApp.clear_instance()

    def test_fd_step_reaches_charts(self, monkeypatch, corpus_dir, tmp_path):
        doc = json.loads((Path(corpus_dir) / "CH2.json").read_text(encoding="utf-8"))
        del doc["fd_step"]
        path = tmp_path / "CH2.json"
        path.write_text(json.dumps(doc))
        monkeypatch.setenv("NORDEN_FD_STEP", "0.0001")
        app = NordenLabApp()
        assert app.load(str(path)).frame.fd_step == 0.0001
        NordenLabApp.clear_instance()


class TestValidateCommand:
    """validate <file>"""

    def test_valid(self, corpus_dir, capsys):
        assert run("validate", os.path.join(corpus_dir, "F4.json")) == 0
        assert capsys.readouterr().out == "F4: valid lie_algebra model, dim 4, signature (2, 2)\n"

    def test_invalid(self, corpus_dir):
        assert run("validate", os.path.join(corpus_dir, "broken.json")) == 1

    def test_malformed(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "kind": "lie_algebra",\n  "dim": 3\n}\n')
        assert run("validate", str(path)) == 2
        assert "line 3" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert run("validate", str(tmp_path / "nothing.json")) == 2


class TestVerifyCommand:
    """verify <file>"""

    def test_flat_passes(self, corpus_dir, capsys):
        assert run("verify", os.path.join(corpus_dir, "F4.json")) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "F4 (lie_algebra, dim 4)"
        assert ", 0 fail, " in out[-1]

    def test_quasi_kahler_selected_checks(self, corpus_dir, capsys):
        checks = "scalar_curvature_relation,canonical_torsion_component,mean_connection"
        assert run("verify", os.path.join(corpus_dir, "QK6.json"), f"--checks={checks}") == 0
        lines = capsys.readouterr().out.splitlines()[1:4]
        assert [line.split()[0] for line in lines] == ["pass", "pass", "pass"]

    def test_checks_by_reference(self, tmp_path, capsys):
        path = tmp_path / "QK4.json"
        assert run("generate", "--kind=quasi_kahler_search", "--dim=4", "--seed=3", f"--out={path}") == 0
        assert run("verify", str(path), "--checks=thm_4_4,thm_4_2,mean_connection") == 0
        lines = capsys.readouterr().out.splitlines()[1:4]
        assert [line.split()[0] for line in lines] == ["pass", "pass", "pass"]
        assert lines[2].endswith("[Theorem 4.4, Eq. (4.13)]")

    def test_broken_exits_2(self, corpus_dir, capsys):
        assert run("verify", os.path.join(corpus_dir, "broken.json")) == 2
        assert "signature must be (n,n)" in capsys.readouterr().err

    def test_unknown_check(self, corpus_dir, capsys):
        assert run("verify", os.path.join(corpus_dir, "F4.json"), "--checks=no_such_check") == 2
        assert "unknown check ids: no_such_check" in capsys.readouterr().err

    def test_json_output(self, corpus_dir, tmp_path, capsys):
        out = tmp_path / "F4.report.json"
        source = os.path.join(corpus_dir, "F4.json")
        assert run("verify", source, "--checks=structure_axioms", f"--json={out}", "--format=json") == 0
        printed = capsys.readouterr().out
        assert printed == out.read_text()
        report = loads_report(printed)
        assert report.provenance == {"source": source, "notes": "flat dim=4"}
        assert report.result("structure_axioms").verdict == "pass"


class TestGenerateCommand:
    """generate --kind K --dim 2n --seed s"""

    def test_writes_model(self, tmp_path):
        out = tmp_path / "RN4.json"
        assert run("generate", "--kind=random_norden", "--dim=4", "--seed=1", f"--out={out}") == 0
        document = load_model(str(out))
        assert document.dim == 4
        assert document.name == "random_norden-4-1"

    def test_deterministic(self, capsys):
        assert run("generate", "--kind=random_norden", "--dim=4", "--seed=2") == 0
        first = capsys.readouterr().out
        assert run("generate", "--kind=random_norden", "--dim=4", "--seed=2") == 0
        assert capsys.readouterr().out == first

    def test_bad_dim(self):
        assert run("generate", "--kind=flat", "--dim=5") == 2

    def test_extra_arguments(self):
        assert run("generate", "somewhere") == 2


class TestCorpusCommands:
    """corpus-run <dir> and report <file>"""

    def test_corpus_run(self, small_corpus, capsys):
        out = small_corpus / "report.json"
        assert run("corpus-run", str(small_corpus), f"--json={out}", "--jobs=2") == 0
        corpus = loads_report(out.read_text())
        assert [r.instance_name for r in corpus.reports] == ["F4", "FL6", "RN4"]
        provenance = corpus.reports[2].provenance
        assert {k: provenance[k] for k in ("name", "kind", "dim", "seed")} == {
            "name": "RN4",
            "kind": "random_norden",
            "dim": 4,
            "seed": 1,
        }
        assert "budget" not in provenance
        assert capsys.readouterr().out.splitlines()[-1].startswith("corpus: 3 instances")

    def test_corpus_run_is_deterministic(self, small_corpus):
        first, second = small_corpus / "first.json", small_corpus / "second.json"
        assert run("corpus-run", str(small_corpus), f"--json={first}") == 0
        assert run("corpus-run", str(small_corpus), f"--json={second}", "--jobs=3") == 0
        assert first.read_text() == second.read_text()

    def test_invalid_entry_fails(self, small_corpus, corpus_dir):
        shutil.copy(os.path.join(corpus_dir, "broken.json"), small_corpus / "broken.json")
        manifest = json.loads((small_corpus / "MANIFEST").read_text())
        manifest["instances"].append({"name": "broken", "file": "broken.json"})
        (small_corpus / "MANIFEST").write_text(json.dumps(manifest))
        out = small_corpus / "report.json"
        assert run("corpus-run", str(small_corpus), f"--json={out}") == 1
        corpus = loads_report(out.read_text())
        broken = next(r for r in corpus.reports if r.instance_name == "broken")
        assert broken.result("model_valid").verdict == "fail"

    def test_report_renders_saved_json(self, small_corpus, capsys):
        out = small_corpus / "report.json"
        assert run("corpus-run", str(small_corpus), f"--json={out}") == 0
        capsys.readouterr()
        assert run("report", str(out), "--format=json") == 0
        assert capsys.readouterr().out == out.read_text()
        assert run("report", str(out)) == 0
        assert capsys.readouterr().out.startswith("F4 (lie_algebra, dim 4)\n")

    def test_report_of_malformed_file(self, tmp_path):
        path = tmp_path / "r.json"
        path.write_text("[]")
        assert run("report", str(path)) == 2

    def test_search_miss_reports_frame_kind(self, small_corpus):
        manifest = json.loads((small_corpus / "MANIFEST").read_text())
        miss = {"name": "PT4", "kind": "parallel_torsion_search", "dim": 4, "seed": 11, "budget": 0}
        manifest["instances"].append(miss)
        (small_corpus / "MANIFEST").write_text(json.dumps(manifest))
        out = small_corpus / "report.json"
        assert run("corpus-run", str(small_corpus), f"--json={out}") == 0
        corpus = loads_report(out.read_text())
        pt4 = next(r for r in corpus.reports if r.instance_name == "PT4")
        assert pt4.kind == "lie_algebra"
        assert pt4.provenance["kind"] == "parallel_torsion_search"
        assert pt4.result("search_outcome").verdict == "not_applicable"
        assert {r.kind for r in corpus.reports} == {"lie_algebra"}


class TestMaterializeCommand:
    """materialize <dir>"""

    def test_writes_members_and_residuals(self, small_corpus, capsys):
        assert run("materialize", str(small_corpus)) == 0
        printed = capsys.readouterr().out.splitlines()
        assert printed[0] == "F4: F4.json"
        items = json.loads((small_corpus / "MANIFEST").read_text())["instances"]
        rn4 = next(item for item in items if item["name"] == "RN4")
        assert rn4["file"] == "RN4.json"
        assert rn4["seed"] == 1
        assert set(rn4["residuals"]) == {"search", "jacobi"}
        assert load_model(str(small_corpus / "RN4.json")).name == "RN4"

    def test_regeneration_is_byte_identical(self, small_corpus, tmp_path_factory):
        other = tmp_path_factory.mktemp("again")
        for name in ("MANIFEST", "F4.json"):
            shutil.copy(small_corpus / name, other / name)
        assert run("materialize", str(small_corpus)) == 0
        assert run("materialize", str(other)) == 0
        for name in ("MANIFEST", "FL6.json", "RN4.json"):
            assert (small_corpus / name).read_bytes() == (other / name).read_bytes(), name

    def test_materialized_corpus_runs(self, small_corpus):
        assert run("materialize", str(small_corpus)) == 0
        out = small_corpus / "report.json"
        assert run("corpus-run", str(small_corpus), f"--json={out}") == 0
        rn4 = next(r for r in loads_report(out.read_text()).reports if r.instance_name == "RN4")
        assert rn4.provenance["source"] == "RN4.json"
        assert rn4.provenance["kind"] == "random_norden"


class TestUsage:
    """Bad command lines."""

    def test_no_command(self):
        assert run() == 2

    def test_unknown_command(self):
        assert run("explore") == 2

    def test_missing_path(self):
        assert run("verify") == 2
