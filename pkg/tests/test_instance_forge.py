# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Tests for instance generators, searches and corpus manifests."""

import json
from pathlib import Path

import numpy as np
import pytest

from norden_lab.connections import b_connection, canonical_connection, kt_connection
from norden_lab.errors import GenerationError, ModelFormatError
from norden_lab.frame_calculus import class_membership, local_geometry, nijenhuis, nijenhuis_assoc
from norden_lab.instance_forge import (
    InstanceForge,
    InstanceRecipe,
    SearchOutcome,
    change_frame,
    flat_model,
    isotropic_search,
    parallel_torsion_search,
    quasi_kahler_search,
    random_frame_change,
    random_norden,
    standard_structure,
)
from norden_lab.instance_forge.manifest import StoredInstance, dumps_manifest, load_manifest, materialize, regenerate
from norden_lab.norden_model import dumps_model, validate
from norden_lab.tensor_core import cyclic_sum, max_norm


class TestFlatModel:
    """Abelian Kähler models."""

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_flat_is_kahler(self, n):
        structure, frame = flat_model(n)
        assert structure.dim == frame.dim == 2 * n
        assert validate(structure, frame).passed
        geometry = local_geometry(structure, frame)
        assert class_membership(geometry.F, structure).is_kahler

    def test_standard_J(self):
        J = standard_structure(2).J.array
        e = np.eye(4)
        assert (J @ e[0]).tolist() == e[2].tolist()
        assert (J @ e[2]).tolist() == (-e[0]).tolist()

    def test_dim_two_connections_coincide(self):
        structure, frame = flat_model(1)
        geometry = local_geometry(structure, frame)
        conn = geometry.connection
        for dc in (
            canonical_connection(structure, frame, conn, geometry.nabla_J),
            b_connection(geometry.F, structure, conn),
            kt_connection(geometry.F, structure, conn),
        ):
            assert max_norm(dc.gamma_prime - conn.gamma) == 0.0

    def test_n_must_be_positive(self):
        with pytest.raises(ValueError):
            standard_structure(0)


class TestRandomNorden:
    """Random 2-step nilpotent Norden instances."""

    def test_deterministic(self):
        assert dumps_model(*random_norden(2, 9)) == dumps_model(*random_norden(2, 9))

    def test_seeds_give_distinct_F(self):
        first = local_geometry(*random_norden(2, 1)).F.F
        second = local_geometry(*random_norden(2, 2)).F.F
        assert max_norm(first - second) > 1e-6

    def test_outside_quasi_kahler(self, random4):
        structure, frame = random4
        geometry = local_geometry(structure, frame)
        assert not class_membership(geometry.F, structure).is_quasi_kahler

    def test_budget_exhausted(self):
        with pytest.raises(GenerationError, match="generation failed; increase budget"):
            random_norden(2, 0, budget=0)

    def test_frame_change_preserves_axioms(self, qk6):
        rng = np.random.default_rng(4)
        P = random_frame_change(rng, 6)
        moved = change_frame(*qk6, P)
        assert validate(*moved).passed
        geometry = local_geometry(*moved)
        assert class_membership(geometry.F, moved[0]).is_quasi_kahler


class TestQuasiKahlerSearch:
    """Search for quasi-Kähler, non-Kähler Lie algebras."""

    def test_instance_properties(self, qk4):
        structure, frame = qk4
        assert validate(structure, frame).passed
        geometry = local_geometry(structure, frame)
        assert max_norm(cyclic_sum(geometry.F.F)) <= 1e-9
        assert max_norm(nijenhuis_assoc(structure, geometry.nabla_J)) <= 1e-9
        assert max_norm(nijenhuis(structure, geometry.nabla_J)) > 1e-6

    def test_deterministic(self, qk4):
        again = quasi_kahler_search(2, seed=3)
        assert dumps_model(*again) == dumps_model(*qk4)

    def test_dim_six(self):
        structure, frame = quasi_kahler_search(3, seed=5)
        flags = class_membership(local_geometry(structure, frame).F, structure)
        assert flags.is_quasi_kahler and not flags.is_kahler

    def test_budget_exhausted(self):
        with pytest.raises(GenerationError, match="no W₃ instance found"):
            quasi_kahler_search(2, seed=0, budget=0)


class TestTargetedSearch:
    """Best-effort isotropic and parallel-torsion searches."""

    def test_small_budget_outcome(self):
        outcome = isotropic_search(2, seed=7, budget=1)
        assert outcome.restarts <= 1
        if outcome.found:
            assert validate(outcome.structure, outcome.frame).passed
            assert outcome.best_residual <= 1e-8
        else:
            assert outcome.structure is None
            assert outcome.describe().startswith("not found, best residual")
        assert np.isfinite(outcome.best_residual)

    def test_miss_reports_a_finite_best_residual(self):
        outcome = parallel_torsion_search(2, seed=11, budget=1)
        assert outcome.restarts == 1
        assert np.isfinite(outcome.best_residual)
        assert "inf" not in outcome.describe()

    def test_empty_budget_has_no_residual(self):
        outcome = parallel_torsion_search(2, seed=11, budget=0)
        assert not outcome.found
        assert outcome.best_residual == np.inf

    def test_describe(self):
        assert SearchOutcome(False, 0.25, 3).describe() == "not found, best residual 2.500e-01"
        assert SearchOutcome(True, 0.0, 2).describe() == "found after 2 restarts, residual 0.000e+00"


class TestInstanceForge:
    """Configurable recipe runner."""

    def test_config_env_vars(self, monkeypatch):
        """Env vars should be honored for traitlets."""
        monkeypatch.setenv("NORDEN_SEARCH_BUDGET", "17")
        forge = InstanceForge()
        assert forge.search_budget == 17
        assert forge.frame_change is True

    def test_recipe_validation(self):
        with pytest.raises(ValueError, match="unknown instance kind"):
            InstanceRecipe("x", "torus", 4)
        with pytest.raises(ValueError, match="dim must be even"):
            InstanceRecipe("x", "flat", 5)

    def test_flat_document(self):
        forge = InstanceForge()
        recipe = InstanceRecipe("F6", "flat", 6)
        document = forge.document(recipe)
        assert document.name == "F6"
        assert document.notes == "flat dim=6 seed=0"
        assert document.dim == 6

    def test_recipe_budget_overrides_forge(self):
        forge = InstanceForge(search_budget=200)
        with pytest.raises(GenerationError):
            forge.run(InstanceRecipe("RN", "random_norden", 4, seed=1, search_budget=0))

    def test_missing_instance_raises(self):
        forge = InstanceForge()
        recipe = InstanceRecipe("ISO", "isotropic_search", 4)
        with pytest.raises(GenerationError, match="not found"):
            forge.document(recipe, SearchOutcome(False, 0.5, 4))

    def test_random_frame_can_be_disabled(self):
        forge = InstanceForge(frame_change=False)
        document = forge.document(InstanceRecipe("RN4", "random_norden", 4, seed=1))
        assert max_norm(document.structure.g.array - standard_structure(2).g.array) == 0.0


class TestManifest:
    """Corpus directories."""

    def test_corpus_manifest(self, corpus_dir):
        entries = load_manifest(corpus_dir)
        names = [entry.name for entry in entries]
        assert names == sorted(names)
        assert "broken" not in names
        assert {"F4", "QK6", "CH4", "QK4", "ISO4", "PT4"} <= set(names)
        qk4 = next(entry for entry in entries if entry.name == "QK4")
        assert isinstance(qk4, InstanceRecipe)
        assert qk4.to_dict() == {"name": "QK4", "kind": "quasi_kahler_search", "dim": 4, "seed": 3, "budget": 200}

    def test_directory_without_manifest(self, tmp_path, flat4):
        (tmp_path / "b.json").write_text(dumps_model(*flat4))
        (tmp_path / "a.json").write_text(dumps_model(*flat4))
        (tmp_path / "notes.txt").write_text("ignored")
        entries = load_manifest(str(tmp_path))
        assert entries == [
            StoredInstance("a", str(tmp_path / "a.json")),
            StoredInstance("b", str(tmp_path / "b.json")),
        ]

    def test_duplicate_names(self, tmp_path):
        doc = {"instances": [{"name": "X", "file": "x.json"}, {"name": "X", "kind": "flat", "dim": 2}]}
        (tmp_path / "MANIFEST").write_text(json.dumps(doc))
        with pytest.raises(ModelFormatError, match="duplicate corpus names: X"):
            load_manifest(str(tmp_path))

    def test_bad_recipe(self, tmp_path):
        doc = {"instances": [{"name": "X", "kind": "flat"}]}
        (tmp_path / "MANIFEST").write_text(json.dumps(doc))
        with pytest.raises(ModelFormatError) as info:
            load_manifest(str(tmp_path))
        assert info.value.field == "instances[0]"

    def test_stored_member_with_recipe(self, tmp_path):
        item = {"name": "RN4", "file": "RN4.json", "kind": "random_norden", "dim": 4, "seed": 1}
        item["residuals"] = {"search": 0.0, "jacobi": 1e-16}
        (tmp_path / "MANIFEST").write_text(dumps_manifest([item]))
        (entry,) = load_manifest(str(tmp_path))
        assert entry == StoredInstance(
            "RN4",
            str(tmp_path / "RN4.json"),
            InstanceRecipe("RN4", "random_norden", 4, 1),
            {"search": 0.0, "jacobi": 1e-16},
        )

    def test_bad_residuals(self, tmp_path):
        doc = {"instances": [{"name": "X", "file": "x.json", "residuals": [1.0]}]}
        (tmp_path / "MANIFEST").write_text(json.dumps(doc))
        with pytest.raises(ModelFormatError, match="bad recipe"):
            load_manifest(str(tmp_path))

    def test_materialize_then_regenerate(self, tmp_path):
        recipes = [
            {"name": "FL4", "kind": "flat", "dim": 4},
            {"name": "RN4", "kind": "random_norden", "dim": 4, "seed": 1},
        ]
        doc = {"instances": recipes}
        (tmp_path / "MANIFEST").write_text(json.dumps(doc))
        forge = InstanceForge()
        items = materialize(forge, str(tmp_path))
        assert [item["file"] for item in items] == ["FL4.json", "RN4.json"]
        for entry in load_manifest(str(tmp_path)):
            _, text = regenerate(forge, entry.recipe)
            assert Path(entry.path).read_bytes() == text.encode("utf-8")

    def test_materialize_keeps_a_search_miss(self, tmp_path):
        doc = {"instances": [{"name": "PT4", "kind": "parallel_torsion_search", "dim": 4, "seed": 11, "budget": 0}]}
        (tmp_path / "MANIFEST").write_text(json.dumps(doc))
        (item,) = materialize(InstanceForge(), str(tmp_path))
        assert "file" not in item
        assert not (tmp_path / "PT4.json").exists()
        assert isinstance(load_manifest(str(tmp_path))[0], InstanceRecipe)

    def test_shipped_members_match_their_recipes(self, corpus_dir):
        forge = InstanceForge()
        for entry in load_manifest(corpus_dir):
            if isinstance(entry, StoredInstance) and entry.recipe is not None:
                _, text = regenerate(forge, entry.recipe)
                assert Path(entry.path).read_text(encoding="utf-8") == text, entry.name
