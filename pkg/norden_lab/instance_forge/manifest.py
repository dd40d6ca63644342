# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Corpus directories: ``<name>.json`` model files plus a ``MANIFEST``.

The manifest is a JSON document listing stored files and generation recipes::

    {"instances": [
        {"name": "F4", "file": "F4.json"},
        {"name": "QK4", "kind": "quasi_kahler_search", "dim": 4, "seed": 3, "budget": 200}
    ]}

Recipes are run in memory when the corpus runs. :func:`materialize` writes
each recipe's instance to ``<name>.json`` and records the file next to the
recipe, with the residuals the generator reached, so that the stored file can
be checked against a fresh regeneration.
"""

import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

from ..errors import ModelFormatError
from ..norden_model import dumps_model, jacobi_tensor
from ..tensor_core import max_norm
from . import InstanceForge, InstanceRecipe

MANIFEST = "MANIFEST"


@dataclass(frozen=True)
class StoredInstance:
    """A model file shipped in the corpus directory, with the recipe that
    produced it when it was generated.
    """

    name: str
    path: str
    recipe: Optional[InstanceRecipe] = None
    residuals: Dict[str, float] = field(default_factory=dict)


CorpusEntry = Union[StoredInstance, InstanceRecipe]


def _recipe(item) -> InstanceRecipe:
    return InstanceRecipe(
        name=str(item["name"]),
        kind=item["kind"],
        dim=int(item["dim"]),
        seed=int(item.get("seed", 0)),
        search_budget=item.get("budget"),
    )


def _entry(item, position: int, directory: str) -> CorpusEntry:
    where = f"instances[{position}]"
    if not isinstance(item, dict) or "name" not in item:
        raise ModelFormatError("manifest entry must be an object with a name", field=where)
    try:
        if "file" not in item:
            return _recipe(item)
        recipe = _recipe(item) if "kind" in item else None
        residuals = {str(k): float(v) for k, v in item.get("residuals", {}).items()}
    except (AttributeError, KeyError, TypeError, ValueError) as err:
        raise ModelFormatError(f"bad recipe: {err}", field=where) from err
    return StoredInstance(str(item["name"]), os.path.join(directory, str(item["file"])), recipe, residuals)


def load_manifest(directory: str) -> List[CorpusEntry]:
    """Reads the corpus entries of ``directory``, ordered by name.

    Without a MANIFEST every ``*.json`` file of the directory is an entry.
    """
    path = os.path.join(directory, MANIFEST)
    if not os.path.exists(path):
        names = sorted(f for f in os.listdir(directory) if f.endswith(".json"))
        return [StoredInstance(os.path.splitext(f)[0], os.path.join(directory, f)) for f in names]
    with open(path, encoding="utf-8") as f:
        text = f.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelFormatError(f"invalid MANIFEST: {err.msg}", line=err.lineno) from err
    items = doc.get("instances") if isinstance(doc, dict) else None
    if not isinstance(items, list):
        raise ModelFormatError("MANIFEST needs an 'instances' list", field="instances")
    entries = [_entry(item, position, directory) for position, item in enumerate(items)]
    names = [entry.name for entry in entries]
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise ModelFormatError(f"duplicate corpus names: {', '.join(duplicates)}", field="instances")
    return sorted(entries, key=lambda entry: entry.name)


def dumps_manifest(items: List[dict]) -> str:
    """MANIFEST text, one entry per line in the given order."""
    lines = ",\n".join(f"    {json.dumps(item, ensure_ascii=False)}" for item in items)
    return '{\n  "instances": [\n' + lines + "\n  ]\n}\n"


def regenerate(forge: InstanceForge, recipe: InstanceRecipe):
    """Runs ``recipe`` and returns ``(outcome, model text)``; the text is
    ``None`` when the search found nothing.
    """
    outcome = forge.run(recipe)
    if not outcome.found:
        return outcome, None
    document = forge.document(recipe, outcome)
    return outcome, dumps_model(document.structure, document.frame, document.name, document.notes)


def materialize(forge: InstanceForge, directory: str) -> List[dict]:
    """Writes every generated member of the corpus in ``directory`` to
    ``<name>.json`` and rewrites the MANIFEST with files and residuals.

    Entries that are already stored files without a recipe are kept as they
    are. A search that finds nothing stays a recipe, with its best residual.
    Returns the new manifest items.
    """
    items = []
    for entry in load_manifest(directory):
        if isinstance(entry, StoredInstance) and entry.recipe is None:
            items.append({"name": entry.name, "file": os.path.basename(entry.path)})
            continue
        recipe = entry.recipe if isinstance(entry, StoredInstance) else entry
        outcome, text = regenerate(forge, recipe)
        item = recipe.to_dict()
        residuals = {"search": outcome.best_residual}
        if text is not None:
            filename = f"{recipe.name}.json"
            with open(os.path.join(directory, filename), "w", encoding="utf-8") as f:
                f.write(text)
            item["file"] = filename
            residuals["jacobi"] = max_norm(jacobi_tensor(outcome.frame.brackets()))
            forge.log.info("Wrote %s to %s", recipe.name, filename)
        item["residuals"] = residuals
        items.append(item)
    with open(os.path.join(directory, MANIFEST), "w", encoding="utf-8") as f:
        f.write(dumps_manifest(items))
    return items
