# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Instance forge: flat models, random Norden structures and searches for
quasi-Kähler, isotropic-Kähler and parallel-torsion instances.
"""

import os
from dataclasses import dataclass, field
from typing import Dict, Optional

from traitlets import Bool, Integer, default
from traitlets.config.configurable import LoggingConfigurable

from ..errors import GenerationError
from ..norden_model import LIE_ALGEBRA, ModelDocument
from .generators import (
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

FLAT = "flat"
RANDOM_NORDEN = "random_norden"
QUASI_KAHLER_SEARCH = "quasi_kahler_search"
ISOTROPIC_SEARCH = "isotropic_search"
PARALLEL_TORSION_SEARCH = "parallel_torsion_search"

KINDS = (FLAT, RANDOM_NORDEN, QUASI_KAHLER_SEARCH, ISOTROPIC_SEARCH, PARALLEL_TORSION_SEARCH)
#: Frame kind of every generated instance, whatever the recipe kind.
GENERATED_FRAME_KIND = LIE_ALGEBRA


@dataclass(frozen=True)
class InstanceRecipe:
    """Everything needed to regenerate one instance."""

    name: str
    kind: str
    dim: int
    seed: int = 0
    search_budget: Optional[int] = None
    constraints: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind '{self.kind}', expected one of {', '.join(KINDS)}")
        if self.dim < 2 or self.dim % 2:
            raise ValueError(f"dim must be even and >= 2, got {self.dim}")

    @property
    def n(self) -> int:
        return self.dim // 2

    def to_dict(self) -> dict:
        doc = {"name": self.name, "kind": self.kind, "dim": self.dim, "seed": self.seed}
        if self.search_budget is not None:
            doc["budget"] = self.search_budget
        return doc


class InstanceForge(LoggingConfigurable):
    """Runs instance recipes and renders the results as model documents."""

    search_budget_env = "NORDEN_SEARCH_BUDGET"
    search_budget = Integer(
        config=True,
        help="Restarts or draws a generator may spend before giving up (NORDEN_SEARCH_BUDGET env var)",
    )

    @default("search_budget")
    def search_budget_default(self):
        return int(os.getenv(self.search_budget_env, 200))

    frame_change = Bool(
        True,
        config=True,
        help="Express generated Lie-algebra instances in a random frame instead of the standard one",
    )

    def run(self, recipe: InstanceRecipe) -> SearchOutcome:
        """Runs a recipe; flat, random and quasi-Kähler recipes either succeed
        or raise ``GenerationError``.
        """
        budget = recipe.search_budget if recipe.search_budget is not None else self.search_budget
        self.log.debug(
            "Running %s recipe '%s' (dim %d, seed %d, budget %d)",
            recipe.kind,
            recipe.name,
            recipe.dim,
            recipe.seed,
            budget,
        )
        if recipe.kind == FLAT:
            return SearchOutcome(True, 0.0, 0, *flat_model(recipe.n))
        if recipe.kind == RANDOM_NORDEN:
            return SearchOutcome(True, 0.0, 1, *random_norden(recipe.n, recipe.seed, budget, self.frame_change))
        if recipe.kind == QUASI_KAHLER_SEARCH:
            return SearchOutcome(True, 0.0, 1, *quasi_kahler_search(recipe.n, recipe.seed, budget, self.frame_change))
        search = isotropic_search if recipe.kind == ISOTROPIC_SEARCH else parallel_torsion_search
        outcome = search(recipe.n, recipe.seed, budget, self.frame_change)
        if outcome.found:
            self.log.info("%s '%s': %s", recipe.kind, recipe.name, outcome.describe())
        else:
            self.log.warning("%s '%s': %s", recipe.kind, recipe.name, outcome.describe())
        return outcome

    def document(self, recipe: InstanceRecipe, outcome: Optional[SearchOutcome] = None) -> ModelDocument:
        """Wraps the instance of a recipe as a model document, running the
        recipe unless its ``outcome`` is given.

        Raises
        ------
        GenerationError
            If the recipe produced no instance
        """
        if outcome is None:
            outcome = self.run(recipe)
        if not outcome.found:
            raise GenerationError(outcome.describe())
        return ModelDocument(outcome.structure, outcome.frame, recipe.name, self.notes(recipe))

    def notes(self, recipe: InstanceRecipe) -> str:
        return f"{recipe.kind} dim={recipe.dim} seed={recipe.seed}"


def create_forge(*args, **kwargs):
    return InstanceForge(*args, **kwargs)


__all__ = [
    "GENERATED_FRAME_KIND",
    "KINDS",
    "InstanceForge",
    "InstanceRecipe",
    "SearchOutcome",
    "change_frame",
    "create_forge",
    "flat_model",
    "isotropic_search",
    "parallel_torsion_search",
    "quasi_kahler_search",
    "random_frame_change",
    "random_norden",
    "standard_structure",
]
