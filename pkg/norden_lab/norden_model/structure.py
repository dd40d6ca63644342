# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Norden structures (M, J, g) and the frames that carry them."""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.linalg

from ..errors import MetricError, TensorShapeError
from ..tensor_core import (
    IDENTITY_TOLERANCE,
    LOWER,
    UPPER,
    DenseTensor,
    inverse_metric,
    max_norm,
    scaled_tolerance,
)

LIE_ALGEBRA = "lie_algebra"
CHART = "chart"

#: Eigenvalues of the metric within this (relative) distance of zero are
#: treated as numerically degenerate.
DEGENERACY_THRESHOLD = 1e-10


@dataclass(frozen=True, eq=False)
class NordenStructure:
    """Metric g and almost complex structure J in a fixed frame.

    Constructing a structure only checks shapes and invertibility of g; use
    ``validate`` for the Norden axioms.
    """

    g: DenseTensor
    J: DenseTensor
    g_inv: DenseTensor = field(init=False)
    g_assoc: DenseTensor = field(init=False)

    def __post_init__(self):
        if self.g.variance != (LOWER, LOWER):
            raise TensorShapeError("g must be a rank-2 lower tensor")
        if self.J.variance != (UPPER, LOWER):
            raise TensorShapeError("J must be a (1,1) tensor")
        if self.g.dim != self.J.dim:
            raise TensorShapeError(f"dimension mismatch: {self.g.dim} != {self.J.dim}")
        g_inv = DenseTensor(self.dim, (UPPER, UPPER), inverse_metric(self.g))
        object.__setattr__(self, "g_inv", g_inv)
        # g~_ij = g_ik J^k_j
        object.__setattr__(self, "g_assoc", self.g.like(self.g.array @ self.J.array))

    @classmethod
    def from_arrays(cls, g, J) -> "NordenStructure":
        g = np.asarray(g, dtype=np.float64)
        return cls(
            DenseTensor(g.shape[0], (LOWER, LOWER), g),
            DenseTensor(g.shape[0], (UPPER, LOWER), J),
        )

    @property
    def dim(self) -> int:
        return self.g.dim

    @property
    def n(self) -> int:
        return self.dim // 2


class FrameModel:
    """A frame {e_i} on which fields are evaluated.

    Subclasses supply brackets of frame fields and frame derivatives of
    fields. ``kind`` is ``"lie_algebra"`` or ``"chart"``.
    """

    kind: str
    dim: int

    def brackets(self) -> np.ndarray:
        """Structure functions, ``C[i, j, k]`` is component k of [e_i, e_j]."""
        raise NotImplementedError

    def metric_gradient(self, structure: NordenStructure) -> np.ndarray:
        """``out[m, i, j] = e_m(g_ij)``"""
        raise NotImplementedError

    def J_gradient(self, structure: NordenStructure) -> np.ndarray:
        """``out[m, a, b] = e_m(J^a_b)``"""
        raise NotImplementedError

    def derivative(
        self,
        quantity: Callable[[NordenStructure, "FrameModel"], np.ndarray],
        structure: NordenStructure,
    ) -> np.ndarray:
        """Frame derivative of a field given as a function of (structure, frame).

        Returns ``out[m, ...] = e_m(quantity)``.
        """
        raise NotImplementedError


class LieAlgebraFrame(FrameModel):
    """Left-invariant frame of a Lie group, given by structure constants.

    Left-invariant fields have constant components, so every frame derivative
    vanishes and the brackets carry all of the geometry.

    Parameters
    ----------
    structure_constants
        Array with ``structure_constants[i, j, k] = C^k_ij``, where
        ``[e_i, e_j] = C^k_ij e_k``
    """

    kind = LIE_ALGEBRA

    def __init__(self, structure_constants):
        constants = np.array(structure_constants, dtype=np.float64)
        if constants.ndim != 3 or len(set(constants.shape)) != 1:
            raise TensorShapeError("structure constants must have shape (dim, dim, dim)")
        constants.setflags(write=False)
        self.structure_constants = constants
        self.dim = constants.shape[0]

    @classmethod
    def abelian(cls, dim: int) -> "LieAlgebraFrame":
        return cls(np.zeros((dim, dim, dim)))

    def brackets(self) -> np.ndarray:
        return self.structure_constants

    def metric_gradient(self, structure):
        return np.zeros((self.dim,) * 3)

    def J_gradient(self, structure):
        return np.zeros((self.dim,) * 3)

    def derivative(self, quantity, structure):
        value = np.asarray(quantity(structure, self))
        return np.zeros((self.dim,) + value.shape)


class PolynomialChart(FrameModel):
    """Coordinate frame {d/du_i} of a chart with polynomial g and J.

    Coordinate fields commute, so brackets vanish. First derivatives of g and
    J are exact; derivatives of derived fields use central differences with
    step ``fd_step``.

    Parameters
    ----------
    metric
        ``PolynomialMatrix`` for g_ij(u)
    J
        ``PolynomialMatrix`` for J^a_b(u)
    point
        Evaluation point u
    fd_step
        Central finite-difference step h
    """

    kind = CHART

    def __init__(self, metric, J, point, fd_step: float = 1e-5):
        self.metric = metric
        self.J = J
        self.point = np.array(point, dtype=np.float64)
        self.dim = self.point.shape[0]
        if metric.dim != self.dim or J.dim != self.dim:
            raise TensorShapeError("polynomial fields and point disagree in dimension")
        if fd_step <= 0:
            raise ValueError(f"fd_step must be positive, got {fd_step}")
        self.fd_step = float(fd_step)

    def moved(self, delta) -> "PolynomialChart":
        """The same chart evaluated at ``point + delta``."""
        return PolynomialChart(self.metric, self.J, self.point + np.asarray(delta), self.fd_step)

    def structure(self) -> NordenStructure:
        """Norden structure at the evaluation point."""
        return NordenStructure.from_arrays(
            self.metric.evaluate(self.point), self.J.evaluate(self.point)
        )

    def stencil(self) -> List["PolynomialChart"]:
        """Charts moved to every point of the central-difference stencil."""
        charts = []
        for m in range(self.dim):
            step = np.zeros(self.dim)
            step[m] = self.fd_step
            charts.extend([self.moved(step), self.moved(-step)])
        return charts

    def brackets(self):
        return np.zeros((self.dim,) * 3)

    def metric_gradient(self, structure):
        return self.metric.gradient(self.point)

    def J_gradient(self, structure):
        return self.J.gradient(self.point)

    def derivative(self, quantity, structure):
        stencil = self.stencil()
        rows = []
        for m in range(self.dim):
            ahead, behind = stencil[2 * m], stencil[2 * m + 1]
            plus = np.asarray(quantity(ahead.structure(), ahead))
            minus = np.asarray(quantity(behind.structure(), behind))
            rows.append((plus - minus) / (2.0 * self.fd_step))
        return np.stack(rows)


def signature(matrix, threshold: float = DEGENERACY_THRESHOLD) -> Tuple[int, int]:
    """Counts positive and negative eigenvalues of a symmetric matrix.

    Raises
    ------
    MetricError
        If an eigenvalue lies within the degeneracy threshold of zero

    >>> signature([[1.0, 0.0], [0.0, -1.0]])
    (1, 1)
    """
    arr = np.asarray(matrix, dtype=np.float64)
    eigenvalues = scipy.linalg.eigvalsh(0.5 * (arr + arr.T))
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    if np.any(np.abs(eigenvalues) <= threshold * scale):
        raise MetricError("metric numerically degenerate")
    return int(np.sum(eigenvalues > 0)), int(np.sum(eigenvalues < 0))


def jacobi_tensor(constants: np.ndarray) -> np.ndarray:
    """Jacobiator components, ``out[i, j, k, l]`` is component l of
    [[e_i, e_j], e_k] + [[e_j, e_k], e_i] + [[e_k, e_i], e_j].
    """
    C = constants
    return (
        np.einsum("ijm,mkl->ijkl", C, C)
        + np.einsum("jkm,mil->ijkl", C, C)
        + np.einsum("kim,mjl->ijkl", C, C)
    )


def bracket(frame: FrameModel, x, y) -> np.ndarray:
    """Bracket of two left-invariant fields given by their frame components.

    Coordinate fields of a chart commute, so chart brackets are zero.
    """
    return np.einsum("i,j,ijk->k", np.asarray(x, float), np.asarray(y, float), frame.brackets())


@dataclass(frozen=True)
class Violation:
    """A violated invariant with its residual."""

    invariant: str
    message: str
    residual: float


@dataclass(frozen=True)
class ValidationOutcome:
    """Result of ``validate``; passes when no invariant is violated."""

    violations: Tuple[Violation, ...] = ()
    signature: Optional[Tuple[int, int]] = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def raise_for_violations(self):
        """Raises ``MetricError`` carrying the first violation message."""
        if self.violations:
            raise MetricError(self.violations[0].message)


def _structure_violations(structure: NordenStructure, where: str = "") -> List[Violation]:
    g = structure.g.array
    J = structure.J.array
    n = structure.n
    eye = np.eye(structure.dim)
    tol = scaled_tolerance(IDENTITY_TOLERANCE, g, J)
    found = []

    def check(invariant, message, residual):
        if residual > tol:
            found.append(Violation(invariant + where, message, residual))

    check("metric_symmetric", "metric not symmetric", max_norm(g - g.T))
    try:
        if signature(g) != (n, n):
            found.append(Violation("metric_signature" + where, "signature must be (n,n)", 1.0))
    except MetricError as err:
        found.append(Violation("metric_signature" + where, str(err), 1.0))
    check("inverse_metric", "g_inv g is not the identity", max_norm(structure.g_inv.array @ g - eye))
    check("J_squared", "J squared is not minus the identity", max_norm(J @ J + eye))
    check("J_anti_isometry", "g(Jx,Jy) != -g(x,y)", max_norm(J.T @ g @ J + g))
    g_assoc = structure.g_assoc.array
    check("associated_symmetric", "associated metric not symmetric", max_norm(g_assoc - g_assoc.T))
    try:
        if signature(g_assoc) != (n, n):
            found.append(
                Violation(
                    "associated_signature" + where,
                    "associated metric signature must be (n,n)",
                    1.0,
                )
            )
    except MetricError as err:
        found.append(Violation("associated_signature" + where, str(err), 1.0))
    return found


def validate(structure: NordenStructure, frame: FrameModel) -> ValidationOutcome:
    """Checks the Norden axioms of a structure and the consistency of its frame.

    Structure invariants: g symmetric with signature (n, n), J^2 = -1,
    g(Jx, Jy) = -g(x, y), and the associated metric symmetric with signature
    (n, n). Lie-algebra frames must have antisymmetric structure constants
    satisfying the Jacobi identity; charts must satisfy the structure
    invariants at every finite-difference stencil point as well.
    """
    if frame.dim != structure.dim:
        raise TensorShapeError(f"frame dim {frame.dim} does not match structure dim {structure.dim}")
    violations = _structure_violations(structure)
    if frame.kind == LIE_ALGEBRA:
        C = frame.brackets()
        tol = scaled_tolerance(IDENTITY_TOLERANCE, C)
        antisymmetry = max_norm(C + np.transpose(C, (1, 0, 2)))
        if antisymmetry > tol:
            violations.append(
                Violation("brackets_antisymmetric", "structure constants not antisymmetric", antisymmetry)
            )
        jacobi = max_norm(jacobi_tensor(C))
        if jacobi > scaled_tolerance(IDENTITY_TOLERANCE, C, C * C):
            violations.append(Violation("jacobi", "Jacobi identity violated", jacobi))
    else:
        for index, shifted in enumerate(frame.stencil()):
            violations.extend(_structure_violations(shifted.structure(), f"@stencil{index}"))
    sig = None
    try:
        sig = signature(structure.g.array)
    except MetricError:
        pass
    return ValidationOutcome(tuple(violations), sig)


def associated_metric(structure: NordenStructure) -> DenseTensor:
    """The associated metric g~(x, y) = g(x, Jy), itself a Norden metric.

    Raises
    ------
    MetricError
        If g~ is not symmetric or its signature is not (n, n)
    """
    g_assoc = structure.g_assoc
    arr = g_assoc.array
    if max_norm(arr - arr.T) > scaled_tolerance(IDENTITY_TOLERANCE, arr):
        raise MetricError("associated metric not symmetric")
    if signature(arr) != (structure.n, structure.n):
        raise MetricError("signature must be (n,n)")
    return g_assoc
