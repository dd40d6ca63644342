# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Generators and searches for Norden Lie-algebra instances.

Every generator draws all of its randomness from ``np.random.default_rng(seed)``
in a fixed order, so equal arguments give equal instances.
"""

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize

from ..connections import QUASI_KAHLER_PATH, canonical_connection
from ..errors import GenerationError
from ..frame_calculus import (
    class_membership,
    covariant_derivative,
    local_geometry,
    square_norm_nabla_J,
)
from ..norden_model import LieAlgebraFrame, NordenStructure, jacobi_tensor, validate
from ..tensor_core import cyclic_sum, max_norm

#: Jacobi residual accepted from numeric descent before validation.
JACOBI_TARGET = 1e-11
#: Target residual of the isotropic and parallel-torsion searches.
SEARCH_TARGET = 1e-8
#: Largest condition number accepted for a random frame change.
FRAME_CHANGE_CONDITION = 50.0

Instance = Tuple[NordenStructure, LieAlgebraFrame]


@dataclass(frozen=True, eq=False)
class SearchOutcome:
    """Result of a bounded search; ``structure`` and ``frame`` are set only
    when ``found``.
    """

    found: bool
    best_residual: float
    restarts: int
    structure: Optional[NordenStructure] = None
    frame: Optional[LieAlgebraFrame] = None

    def describe(self) -> str:
        if self.found:
            return f"found after {self.restarts} restarts, residual {self.best_residual:.3e}"
        return f"not found, best residual {self.best_residual:.3e}"


def standard_structure(n: int) -> NordenStructure:
    """g = diag(+1 x n, -1 x n), J e_i = e_{n+i} and J e_{n+i} = -e_i."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    dim = 2 * n
    g = np.diag([1.0] * n + [-1.0] * n)
    J = np.zeros((dim, dim))
    for i in range(n):
        J[n + i, i] = 1.0
        J[i, n + i] = -1.0
    return NordenStructure.from_arrays(g, J)


def flat_model(n: int) -> Instance:
    """Abelian Lie algebra of dim 2n with the standard Norden structure; Kähler."""
    structure = standard_structure(n)
    return structure, LieAlgebraFrame.abelian(structure.dim)


def change_frame(structure: NordenStructure, frame: LieAlgebraFrame, P) -> Instance:
    """Rewrites an instance in the frame e'_a = P[b, a] e_b."""
    P = np.asarray(P, dtype=np.float64)
    P_inv = np.linalg.inv(P)
    g = P.T @ structure.g.array @ P
    J = P_inv @ structure.J.array @ P
    C = np.einsum("ia,jb,ijk,ck->abc", P, P, frame.brackets(), P_inv)
    return NordenStructure.from_arrays(0.5 * (g + g.T), J), LieAlgebraFrame(C)


def random_frame_change(rng: np.random.Generator, dim: int, attempts: int = 100) -> np.ndarray:
    """A well-conditioned random change of frame close to the identity."""
    for _ in range(attempts):
        P = np.eye(dim) + rng.uniform(-0.5, 0.5, size=(dim, dim))
        if np.linalg.cond(P) <= FRAME_CHANGE_CONDITION:
            return P
    raise GenerationError("generation failed; increase budget")


def antisymmetric_basis(dim: int, pairs=None, targets=None) -> np.ndarray:
    """Basis of structure-constant arrays, one per (i < j, k).

    ``pairs`` restricts the bracket pairs and ``targets`` the components k.
    """
    pairs = list(itertools.combinations(range(dim), 2)) if pairs is None else list(pairs)
    targets = range(dim) if targets is None else targets
    elements = []
    for (i, j), k in itertools.product(pairs, targets):
        E = np.zeros((dim, dim, dim))
        E[i, j, k] = 1.0
        E[j, i, k] = -1.0
        elements.append(E)
    return np.array(elements).reshape((-1, dim, dim, dim))


def _F(structure: NordenStructure, C: np.ndarray) -> np.ndarray:
    return local_geometry(structure, LieAlgebraFrame(C)).F.array


def quasi_kahler_constraints(structure: NordenStructure, basis: np.ndarray) -> np.ndarray:
    """Matrix of the linear map from basis coefficients to the cyclic sum of F.

    F depends linearly on the structure constants for fixed g and J, so the
    quasi-Kähler condition is a linear system.
    """
    columns = [
        cyclic_sum(local_geometry(structure, LieAlgebraFrame(E)).F.F).array.ravel() for E in basis
    ]
    return np.array(columns).T


def nilpotent_splits(dim: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Splits of the frame into V and a central Z with [V, V] inside Z.

    Such brackets are 2-step nilpotent and satisfy the Jacobi identity.
    """
    indices = range(dim)
    for size in range(1, dim - 1):
        for center in itertools.combinations(indices, size):
            rest = tuple(i for i in indices if i not in center)
            yield rest, center


class _Coordinates:
    """Structure constants parametrized as ``coefficients @ basis``."""

    def __init__(self, basis: np.ndarray, null: np.ndarray, nilpotent: bool):
        self.basis = basis
        self.null = null
        self.nilpotent = nilpotent

    @property
    def size(self) -> int:
        return self.null.shape[1]

    def constants(self, y) -> np.ndarray:
        return np.tensordot(self.null @ y, self.basis, axes=1)


def _coordinate_systems(structure: NordenStructure, budget: int) -> Iterator[_Coordinates]:
    dim = structure.dim
    for rest, center in itertools.islice(nilpotent_splits(dim), budget):
        basis = antisymmetric_basis(dim, itertools.combinations(rest, 2), center)
        null = scipy.linalg.null_space(quasi_kahler_constraints(structure, basis))
        if null.shape[1]:
            yield _Coordinates(basis, null, nilpotent=True)
    basis = antisymmetric_basis(dim)
    null = scipy.linalg.null_space(quasi_kahler_constraints(structure, basis))
    if null.shape[1]:
        yield _Coordinates(basis, null, nilpotent=False)


def _clean(C: np.ndarray) -> np.ndarray:
    C = np.where(np.abs(C) < 1e-14, 0.0, C)
    return 0.5 * (C - np.transpose(C, (1, 0, 2)))


def _descend(
    structure: NordenStructure,
    coordinates: _Coordinates,
    y0: np.ndarray,
    target: Optional[Callable[[NordenStructure, LieAlgebraFrame], np.ndarray]],
):
    def residual(y):
        C = coordinates.constants(y)
        F = _F(structure, C)
        parts = [np.atleast_1d(np.sum(F * F) - 1.0)]
        if not coordinates.nilpotent:
            parts.append(jacobi_tensor(C).ravel())
        if target is not None:
            parts.append(np.atleast_1d(target(structure, LieAlgebraFrame(C))))
        return np.concatenate(parts)

    result = scipy.optimize.least_squares(
        residual, y0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=100 * (len(y0) + 1)
    )
    return result.x


def _accepts(structure: NordenStructure, C: np.ndarray) -> bool:
    frame = LieAlgebraFrame(C)
    if max_norm(jacobi_tensor(C)) > JACOBI_TARGET * max(1.0, max_norm(C)) ** 2:
        return False
    geometry = local_geometry(structure, frame)
    flags = class_membership(geometry.F, structure)
    return flags.is_quasi_kahler and not flags.is_kahler


def _finish(rng: np.random.Generator, structure: NordenStructure, C: np.ndarray, frame_change: bool) -> Instance:
    instance = (structure, LieAlgebraFrame(_clean(C)))
    if frame_change:
        instance = change_frame(*instance, random_frame_change(rng, structure.dim))
    validate(*instance).raise_for_violations()
    return instance


def random_norden(n: int, seed: int, budget: int = 200, frame_change: bool = True) -> Instance:
    """Random 2-step nilpotent Lie algebra with a Norden structure outside the
    quasi-Kähler class.

    Raises
    ------
    GenerationError
        If no candidate is accepted within ``budget`` draws
    """
    rng = np.random.default_rng(seed)
    base = standard_structure(n)
    dim = base.dim
    for _ in range(budget):
        size = int(rng.integers(1, dim - 1))
        center = tuple(sorted(rng.choice(dim, size=size, replace=False).tolist()))
        rest = [i for i in range(dim) if i not in center]
        C = np.zeros((dim, dim, dim))
        for i, j in itertools.combinations(rest, 2):
            C[i, j, list(center)] = rng.integers(-2, 3, size=len(center))
            C[j, i] = -C[i, j]
        if max_norm(jacobi_tensor(C)) > 0.0:
            continue
        flags = class_membership(local_geometry(base, LieAlgebraFrame(C)).F, base)
        if flags.is_quasi_kahler:
            continue
        return _finish(rng, base, C, frame_change)
    raise GenerationError("generation failed; increase budget")


def quasi_kahler_search(n: int, seed: int, budget: int = 200, frame_change: bool = True) -> Instance:
    """Quasi-Kähler, non-Kähler Lie algebra with the standard Norden structure,
    expressed in a random frame.

    2-step nilpotent families satisfying the quasi-Kähler condition are tried
    first; when they hold only Kähler solutions, numeric descent runs on the
    null space of the full linear system.

    Raises
    ------
    GenerationError
        If ``budget`` restarts find nothing
    """
    rng = np.random.default_rng(seed)
    structure = standard_structure(n)
    restarts = 0
    for coordinates in _coordinate_systems(structure, budget):
        while restarts < budget:
            restarts += 1
            y = rng.standard_normal(coordinates.size)
            if not coordinates.nilpotent:
                y = _descend(structure, coordinates, y, None)
            C = coordinates.constants(y)
            scale = np.sqrt(np.sum(_F(structure, C) ** 2))
            if scale > 1e-6 and coordinates.nilpotent:
                C = C / scale
            if _accepts(structure, C):
                return _finish(rng, structure, C, frame_change)
            if coordinates.nilpotent:
                break
        if restarts >= budget:
            break
    raise GenerationError("no W₃ instance found")


def _square_norm_target(structure, frame):
    geometry = local_geometry(structure, frame)
    return square_norm_nabla_J(structure, geometry.nabla_J)


def _torsion_target(structure, frame):
    geometry = local_geometry(structure, frame)
    dc = canonical_connection(structure, frame, geometry.connection, geometry.nabla_J, QUASI_KAHLER_PATH)
    return covariant_derivative(dc.torsion_at, dc.gamma_prime.array, structure, frame).array.ravel()


def _targeted_search(n, seed, budget, target, frame_change) -> SearchOutcome:
    rng = np.random.default_rng(seed)
    structure = standard_structure(n)
    best = np.inf
    restarts = 0
    for coordinates in _coordinate_systems(structure, budget):
        attempts = max(1, budget // 4) if coordinates.nilpotent else budget
        for _ in range(attempts):
            if restarts >= budget:
                break
            restarts += 1
            y = _descend(structure, coordinates, rng.standard_normal(coordinates.size), target)
            C = coordinates.constants(y)
            residual = max_norm(target(structure, LieAlgebraFrame(C)))
            # rejected candidates count toward best with their Jacobi and scale defects
            defect = max(max_norm(jacobi_tensor(C)), abs(np.sum(_F(structure, C) ** 2) - 1.0))
            best = min(best, max(residual, defect))
            if residual <= SEARCH_TARGET and _accepts(structure, C):
                instance = _finish(rng, structure, C, frame_change)
                return SearchOutcome(True, residual, restarts, *instance)
    return SearchOutcome(False, float(best), restarts)


def isotropic_search(n: int, seed: int, budget: int = 200, frame_change: bool = True) -> SearchOutcome:
    """Best-effort search for a quasi-Kähler instance with ‖∇J‖ = 0 and ∇J ≠ 0."""
    return _targeted_search(n, seed, budget, _square_norm_target, frame_change)


def parallel_torsion_search(n: int, seed: int, budget: int = 200, frame_change: bool = True) -> SearchOutcome:
    """Best-effort search for a quasi-Kähler instance whose canonical
    connection has parallel torsion.
    """
    return _targeted_search(n, seed, budget, _torsion_target, frame_change)

