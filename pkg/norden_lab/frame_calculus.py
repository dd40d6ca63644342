# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Levi-Civita connection and the first-order invariants of a Norden structure.

Connection coefficients are stored as ``gamma[i, j, k] = Γ^k_ij`` with
``∇_{e_i} e_j = Γ^k_ij e_k``. The covariant derivative of J is a
vector-valued bilinear map ``DJ[i, j, k]``, component k of (∇_{e_i} J) e_j.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .errors import FundamentalTensorError, TensorShapeError
from .norden_model import FrameModel, NordenStructure
from .tensor_core import (
    IDENTITY_TOLERANCE,
    LOWER,
    MEMBERSHIP_TOLERANCE,
    UPPER,
    DenseTensor,
    cyclic_sum,
    inverse_metric,
    max_norm,
    scaled_tolerance,
    substitute,
)

#: Variance of vector-valued bilinear maps and of connection coefficients.
VECTOR_VALUED = (LOWER, LOWER, UPPER)

EXACT = "exact"
FINITE_DIFFERENCES = "fd"


@dataclass(frozen=True, eq=False)
class ConnectionCoeffs:
    """Coefficients of a linear connection in a frame.

    ``metric_residual`` and ``torsion_residual`` are the max-norms of ∇g and
    of the torsion, measured when the connection was built.
    """

    gamma: DenseTensor
    frame: FrameModel
    metric_residual: float = 0.0
    torsion_residual: float = 0.0
    label: str = "levi_civita"

    @property
    def dim(self) -> int:
        return self.gamma.dim

    @property
    def metric_compatible(self) -> bool:
        return self.metric_residual <= scaled_tolerance(IDENTITY_TOLERANCE, self.gamma)

    @property
    def torsion_free(self) -> bool:
        return self.torsion_residual <= scaled_tolerance(IDENTITY_TOLERANCE, self.gamma)


@dataclass(frozen=True, eq=False)
class FundamentalTensor:
    """F(x, y, z) = g((∇_x J)y, z) with the residuals of its symmetries."""

    F: DenseTensor
    symmetry_residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def array(self) -> np.ndarray:
        return self.F.array


@dataclass(frozen=True)
class ClassFlags:
    """Class membership verdicts of a Norden structure.

    The quasi-Kähler class has three equivalent characterizations: the cyclic
    sum of F vanishes, N* vanishes, and the cyclic sum of F(Jx, y, z)
    vanishes. ``residuals`` holds the max-norm behind every verdict.
    """

    is_kahler: bool
    is_quasi_kahler: bool
    nstar_vanishes: bool
    jx_cyclic_vanishes: bool
    residuals: Dict[str, float]
    is_isotropic_kahler: Optional[bool] = None

    @property
    def characterizations_agree(self) -> bool:
        return self.is_quasi_kahler == self.nstar_vanishes == self.jx_cyclic_vanishes


def membership_tolerance(*operands) -> float:
    """Residuals at or below ``1e-8 * (1 + max|operand|)`` count as zero."""
    return MEMBERSHIP_TOLERANCE * (1.0 + max([0.0] + [max_norm(op) for op in operands]))


def _koszul(g, g_inv, dg, C) -> np.ndarray:
    # g(∇_{e_i} e_j, e_l), then raise l
    c = np.einsum("ijk,kl->ijl", C, g)
    lowered = 0.5 * (
        dg
        + np.transpose(dg, (1, 0, 2))
        - np.transpose(dg, (1, 2, 0))
        + c
        - np.transpose(c, (2, 0, 1))
        + np.transpose(c, (1, 2, 0))
    )
    return np.einsum("ijl,lk->ijk", lowered, g_inv)


def metric_covariant_derivative(gamma, g, dg) -> np.ndarray:
    """``out[i, j, k] = (∇_{e_i} g)(e_j, e_k)``"""
    gamma = np.asarray(gamma)
    return dg - np.einsum("ijm,mk->ijk", gamma, g) - np.einsum("ikm,jm->ijk", gamma, g)


def torsion_components(gamma, C) -> np.ndarray:
    """``out[i, j, k]`` is component k of ∇_{e_i} e_j - ∇_{e_j} e_i - [e_i, e_j]."""
    gamma = np.asarray(gamma)
    return gamma - np.transpose(gamma, (1, 0, 2)) - C


def levi_civita(
    structure: NordenStructure,
    frame: FrameModel,
    derivatives: str = EXACT,
    metric: Optional[np.ndarray] = None,
    metric_gradient: Optional[np.ndarray] = None,
) -> ConnectionCoeffs:
    """Levi-Civita connection of g in the frame, from the Koszul formula.

    Parameters
    ----------
    structure
        Norden structure at the frame
    frame
        Lie-algebra frame or polynomial chart
    derivatives
        ``"exact"`` differentiates the polynomial metric of a chart; ``"fd"``
        takes central differences of g instead. Both agree in Lie-algebra mode,
        where left-invariant components are constant.
    metric, metric_gradient
        Use another metric on the same frame, for example the associated
        metric, together with its frame derivatives ``out[m, i, j]``

    Returns
    -------
    ConnectionCoeffs
        Coefficients with the residuals of ∇g = 0 and zero torsion
    """
    if frame.dim != structure.dim:
        raise TensorShapeError(f"frame dim {frame.dim} does not match structure dim {structure.dim}")
    if metric is None:
        g = structure.g.array
        g_inv = structure.g_inv.array
        if derivatives == EXACT:
            dg = frame.metric_gradient(structure)
        elif derivatives == FINITE_DIFFERENCES:
            dg = frame.derivative(lambda s, f: s.g.array, structure)
        else:
            raise ValueError(f"derivatives must be '{EXACT}' or '{FINITE_DIFFERENCES}', got '{derivatives}'")
    else:
        g = np.asarray(metric, dtype=np.float64)
        g_inv = inverse_metric(g)
        if metric_gradient is None:
            raise ValueError("metric_gradient is required together with metric")
        dg = np.asarray(metric_gradient, dtype=np.float64)
    C = frame.brackets()
    gamma = _koszul(g, g_inv, dg, C)
    return ConnectionCoeffs(
        DenseTensor(structure.dim, VECTOR_VALUED, gamma),
        frame,
        metric_residual=max_norm(metric_covariant_derivative(gamma, g, dg)),
        torsion_residual=max_norm(torsion_components(gamma, C)),
    )


def J_covariant_derivative(gamma, structure: NordenStructure, frame: FrameModel) -> DenseTensor:
    """(∇_x J)y = ∇_x(Jy) - J(∇_x y) for an arbitrary connection."""
    gamma = np.asarray(gamma)
    J = structure.J.array
    dJ = frame.J_gradient(structure)
    DJ = (
        np.transpose(dJ, (0, 2, 1))
        + np.einsum("imk,mj->ijk", gamma, J)
        - np.einsum("km,ijm->ijk", J, gamma)
    )
    return DenseTensor(structure.dim, VECTOR_VALUED, DJ)


def nabla_J(conn: ConnectionCoeffs, structure: NordenStructure) -> DenseTensor:
    """Covariant derivative of J, ``out[i, j, k]`` is component k of
    (∇_{e_i} J) e_j.
    """
    return J_covariant_derivative(conn.gamma.array, structure, conn.frame)


def lower_values(V: DenseTensor, structure: NordenStructure) -> DenseTensor:
    """Turns a vector-valued map V(x, y) into the (0, 3) tensor g(V(x, y), z)."""
    return DenseTensor.covariant(np.einsum("ijk,kl->ijl", V.array, structure.g.array))


def raise_values(t: DenseTensor, structure: NordenStructure) -> DenseTensor:
    """Inverse of ``lower_values``."""
    return DenseTensor(structure.dim, VECTOR_VALUED, np.einsum("ijl,lk->ijk", t.array, structure.g_inv.array))


def fundamental_F(nabla_J: DenseTensor, structure: NordenStructure) -> FundamentalTensor:
    """Fundamental tensor F(x, y, z) = g((∇_x J)y, z).

    Every Norden structure forces F(x, y, z) = F(x, z, y) = F(x, Jy, Jz); a
    violation means the input did not come from a Norden structure.

    Raises
    ------
    FundamentalTensorError
        If a symmetry residual exceeds the identity tolerance
    """
    if nabla_J.variance != VECTOR_VALUED or nabla_J.dim != structure.dim:
        raise TensorShapeError("nabla_J must be a vector-valued bilinear map of matching dim")
    F = lower_values(nabla_J, structure)
    J = structure.J
    residuals = {
        "swap_last_two": max_norm(F.array - np.transpose(F.array, (0, 2, 1))),
        "J_on_last_two": max_norm(F - substitute(F, "x,Jy,Jz", J)),
        "J_moves_between_last_two": max_norm(substitute(F, "x,Jy,z", J) + substitute(F, "x,y,Jz", J)),
    }
    tolerance = scaled_tolerance(IDENTITY_TOLERANCE, F, structure.g, J)
    if max(residuals.values()) > tolerance:
        raise FundamentalTensorError("not a fundamental tensor of a Norden structure")
    return FundamentalTensor(F, residuals)


def _jx_terms(nabla_J: DenseTensor, J: np.ndarray):
    DJ = nabla_J.array
    # (∇_{e_i} J) J e_j and (∇_{J e_i} J) e_j
    return np.einsum("mj,imk->ijk", J, DJ), np.einsum("mi,mjk->ijk", J, DJ)


def nijenhuis(structure: NordenStructure, nabla_J: DenseTensor) -> DenseTensor:
    """N(x, y) = (∇_x J)Jy - (∇_y J)Jx + (∇_{Jx} J)y - (∇_{Jy} J)x"""
    A, B = _jx_terms(nabla_J, structure.J.array)
    N = A - np.transpose(A, (1, 0, 2)) + B - np.transpose(B, (1, 0, 2))
    return DenseTensor(structure.dim, VECTOR_VALUED, N)


def nijenhuis_assoc(structure: NordenStructure, nabla_J: DenseTensor) -> DenseTensor:
    """N*(x, y) = (∇_x J)Jy + (∇_y J)Jx + (∇_{Jx} J)y + (∇_{Jy} J)x"""
    A, B = _jx_terms(nabla_J, structure.J.array)
    N = A + np.transpose(A, (1, 0, 2)) + B + np.transpose(B, (1, 0, 2))
    return DenseTensor(structure.dim, VECTOR_VALUED, N)


def nijenhuis_lowered(F: FundamentalTensor, J: DenseTensor, associated: bool = False) -> DenseTensor:
    """g(N(x, y), z), or g(N*(x, y), z), written through F alone."""
    sign = 1.0 if associated else -1.0
    F = F.F
    return (
        substitute(F, "x,Jy,z", J)
        + sign * substitute(F, "y,Jx,z", J)
        + substitute(F, "Jx,y,z", J)
        + sign * substitute(F, "Jy,x,z", J)
    )


def square_norm_nabla_J(structure: NordenStructure, nabla_J: DenseTensor) -> float:
    """‖∇J‖ = g^ij g^ks g((∇_{e_i} J)e_k, (∇_{e_j} J)e_s).

    The metric is indefinite, so the value can vanish or be negative for a
    nonzero ∇J.
    """
    g_inv = structure.g_inv.array
    DJ = nabla_J.array
    return float(np.einsum("ij,ks,ika,jsb,ab->", g_inv, g_inv, DJ, DJ, structure.g.array))


def square_norm_cross_form(structure: NordenStructure, nabla_J: DenseTensor) -> float:
    """-2 g^ij g^ks g((∇_{e_i} J)e_k, (∇_{e_s} J)e_j), equal to ‖∇J‖ on
    quasi-Kähler structures only.
    """
    g_inv = structure.g_inv.array
    DJ = nabla_J.array
    return -2.0 * float(np.einsum("ij,ks,ika,sjb,ab->", g_inv, g_inv, DJ, DJ, structure.g.array))


def class_membership(
    F: FundamentalTensor, structure: NordenStructure, nabla_J: Optional[DenseTensor] = None
) -> ClassFlags:
    """Kähler and quasi-Kähler verdicts from residual thresholds.

    When ``nabla_J`` is given, also flags isotropic-Kähler structures, those
    with ‖∇J‖ = 0 while ∇J does not vanish.
    """
    J = structure.J
    residuals = {
        "F": F.F.max_norm(),
        "cyclic_F": max_norm(cyclic_sum(F.F)),
        "nstar": max_norm(nijenhuis_lowered(F, J, associated=True)),
        "cyclic_F_Jx": max_norm(cyclic_sum(F.F, J, "Jx")),
    }
    tolerance = membership_tolerance(F.F)
    isotropic = None
    if nabla_J is not None:
        norm = square_norm_nabla_J(structure, nabla_J)
        residuals["square_norm"] = abs(norm)
        isotropic = abs(norm) <= membership_tolerance(F.F, F.F.max_norm() ** 2) and residuals["F"] > tolerance
    return ClassFlags(
        is_kahler=residuals["F"] <= tolerance,
        is_quasi_kahler=residuals["cyclic_F"] <= tolerance,
        nstar_vanishes=residuals["nstar"] <= tolerance,
        jx_cyclic_vanishes=residuals["cyclic_F_Jx"] <= tolerance,
        residuals=residuals,
        is_isotropic_kahler=isotropic,
    )


def trace_F_jz(F: FundamentalTensor, structure: NordenStructure) -> np.ndarray:
    """The covector z -> g^ij F(Jz, e_i, e_j); it vanishes on every Norden
    structure.
    """
    values = substitute(F.F, "Jz,x,y", structure.J).array
    return np.einsum("ij,ijz->z", structure.g_inv.array, values)


def covariant_derivative(
    quantity: Callable[[NordenStructure, FrameModel], np.ndarray],
    gamma,
    structure: NordenStructure,
    frame: FrameModel,
) -> DenseTensor:
    """Covariant derivative of an all-lower tensor field.

    ``quantity(structure, frame)`` recomputes the field so that chart frames
    can difference it at shifted points. The result has the direction slot
    first: ``out[i, a, b, ...] = (∇_{e_i} t)(e_a, e_b, ...)``.
    """
    values = np.asarray(quantity(structure, frame))
    gamma = np.asarray(gamma)
    out = np.array(frame.derivative(quantity, structure), dtype=np.float64)
    rank = values.ndim
    letters = "abcdef"[:rank]
    for slot in range(rank):
        replaced = letters[:slot] + "m" + letters[slot + 1 :]
        out -= np.einsum(f"i{letters[slot]}m,{replaced}->i{letters}", gamma, values)
    return DenseTensor.covariant(out)


@dataclass(frozen=True, eq=False)
class LocalGeometry:
    """Levi-Civita data of one structure in one frame."""

    structure: NordenStructure
    frame: FrameModel
    connection: ConnectionCoeffs
    nabla_J: DenseTensor
    F: FundamentalTensor


def local_geometry(structure: NordenStructure, frame: FrameModel) -> LocalGeometry:
    """Levi-Civita connection, ∇J and F of a structure.

    Chart code calls this again at shifted points to difference derived fields.
    """
    conn = levi_civita(structure, frame)
    DJ = nabla_J(conn, structure)
    return LocalGeometry(structure, frame, conn, DJ, fundamental_F(DJ, structure))
