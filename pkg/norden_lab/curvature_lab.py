# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Curvature of the Levi-Civita and natural connections, and the identities
relating them.

Curvature follows R(x, y)z = ∇_x ∇_y z - ∇_y ∇_x z - ∇_[x,y] z, lowered as
R(x, y, z, w) = g(R(x, y)z, w). Ricci and scalar curvature are
ρ(y, z) = g^ij R(e_i, y, z, e_j) and τ = g^ij ρ(e_i, e_j).
"""

from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np

from .connections import DeformedConnection
from .errors import ClassRequirementError
from .frame_calculus import (
    ConnectionCoeffs,
    LocalGeometry,
    class_membership,
    covariant_derivative,
    levi_civita,
    local_geometry,
    membership_tolerance,
    square_norm_nabla_J,
)
from .norden_model import FrameModel, NordenStructure
from .tensor_core import IDENTITY_TOLERANCE, DenseTensor, cyclic_sum, max_norm, scaled_tolerance, substitute

VERIFIED = "verified"
FAILED = "failed"
NOT_APPLICABLE = "not_applicable"

Connection = Union[ConnectionCoeffs, DeformedConnection]


@dataclass(frozen=True, eq=False)
class CurvatureData:
    """Curvature, Ricci and scalar curvature of one connection."""

    R: DenseTensor
    ricci: DenseTensor
    scalar: float
    source: str


@dataclass(frozen=True)
class ResidualSet:
    """Named residuals judged against one tolerance."""

    residuals: Dict[str, float]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(value <= self.tolerance for value in self.residuals.values())

    @property
    def worst(self) -> float:
        return max(self.residuals.values(), default=0.0)


def _gamma_and_field(connection: Connection):
    if isinstance(connection, DeformedConnection):
        return connection.gamma_prime.array, connection.gamma_at, connection.label
    return connection.gamma.array, lambda s, f: levi_civita(s, f).gamma.array, connection.label


def contract_curvature(R: np.ndarray, structure: NordenStructure, source: str) -> CurvatureData:
    """Wraps a lowered curvature array with its Ricci and scalar curvature."""
    g_inv = structure.g_inv.array
    ricci = np.einsum("ij,iyzj->yz", g_inv, R)
    return CurvatureData(
        DenseTensor.covariant(R),
        DenseTensor.covariant(ricci),
        float(np.einsum("ij,ij->", g_inv, ricci)),
        source,
    )


def curvature(connection: Connection, structure: NordenStructure, frame: Optional[FrameModel] = None) -> CurvatureData:
    """Curvature of a Levi-Civita or deformed connection.

    Lie-algebra frames contribute ∇_[x,y] through the structure constants;
    charts difference the connection coefficients recomputed at shifted
    points.
    """
    frame = frame if frame is not None else connection.frame
    gamma, gamma_field, source = _gamma_and_field(connection)
    C = frame.brackets()
    dgamma = frame.derivative(gamma_field, structure)
    R = (
        dgamma
        - np.transpose(dgamma, (1, 0, 2, 3))
        + np.einsum("jkm,iml->ijkl", gamma, gamma)
        - np.einsum("ikm,jml->ijkl", gamma, gamma)
        - np.einsum("ijm,mkl->ijkl", C, gamma)
    )
    return contract_curvature(np.einsum("ijkl,lw->ijkw", R, structure.g.array), structure, source)


def kahler_tensor_check(data: CurvatureData, structure: NordenStructure) -> ResidualSet:
    """Residuals of the Kähler-tensor conditions: antisymmetry in each pair,
    the first Bianchi identity, and L(x, y, Jz, Jw) = -L(x, y, z, w).
    """
    R = data.R
    return ResidualSet(
        {
            "antisymmetric_xy": max_norm(R + substitute(R, "y,x,z,w")),
            "antisymmetric_zw": max_norm(R + substitute(R, "x,y,w,z")),
            "first_bianchi": max_norm(cyclic_sum(R)),
            "J_on_last_two": max_norm(R + substitute(R, "x,y,Jz,Jw", structure.J)),
        },
        scaled_tolerance(IDENTITY_TOLERANCE, R),
    )


def _vector(t: np.ndarray, structure: NordenStructure) -> np.ndarray:
    return np.einsum("ijl,lk->ijk", t, structure.g_inv.array)


@dataclass(frozen=True, eq=False)
class BianchiTorsion:
    """Cyclic sum of (∇'_x T)(y, z, w) + T(T(x, y), z, w) and the same
    quantity read off the curvature, 𝔖 R'(x, y, z, w).
    """

    residual: DenseTensor
    curvature_route: DenseTensor
    tolerance: float

    @property
    def dual_path_residual(self) -> float:
        return max_norm(self.residual - self.curvature_route)

    @property
    def vanishes(self) -> bool:
        return self.residual.max_norm() <= self.tolerance


def bianchi_torsion_residual(
    dc: DeformedConnection,
    structure: NordenStructure,
    frame: Optional[FrameModel] = None,
    rprime: Optional[CurvatureData] = None,
) -> BianchiTorsion:
    """First Bianchi identity of a connection with torsion.

    Its vanishing is equivalent to R' being a Kähler tensor when ∇' is natural.
    """
    frame = frame if frame is not None else dc.frame
    if rprime is None:
        rprime = curvature(dc, structure, frame)
    T = dc.T.array
    DT = covariant_derivative(dc.torsion_at, dc.gamma_prime.array, structure, frame)
    TT = np.einsum("xym,mzw->xyzw", _vector(T, structure), T)
    residual = cyclic_sum(DT + DenseTensor.covariant(TT))
    return BianchiTorsion(
        residual,
        cyclic_sum(rprime.R),
        scaled_tolerance(IDENTITY_TOLERANCE, residual, rprime.R, DT),
    )


def kahler_curvature_consequences(dc: DeformedConnection, geometry: LocalGeometry) -> Dict[str, float]:
    """Identities implied by a Kähler R' on a quasi-Kähler structure.

    Returns the max-norms of T(T(z, x), y, w),
    g(T(x, z), T(y, w) - (∇_{Jy} J)w) and
    g((∇_x J)Jz + (∇_{Jx} J)z, (∇_{Jy} J)w - (∇_y J)Jw).
    """
    structure = geometry.structure
    g = structure.g.array
    J = structure.J.array
    DJ = geometry.nabla_J.array
    T = dc.T.array
    Tv = _vector(T, structure)
    nabla_jy_w = np.einsum("my,mwn->ywn", J, DJ)
    nabla_y_jw = np.einsum("mw,ymn->ywn", J, DJ)
    left = np.einsum("mz,xmn->xzn", J, DJ) + np.einsum("mx,mzn->xzn", J, DJ)
    return {
        "torsion_of_torsion": max_norm(np.einsum("zxm,myw->xyzw", Tv, T)),
        "torsion_pairing": max_norm(np.einsum("xzn,ywn->xyzw", T, Tv - nabla_jy_w)),
        "nabla_J_pairing": max_norm(np.einsum("xzn,nk,ywk->xyzw", left, g, nabla_jy_w - nabla_y_jw)),
    }


def _q_quadratic(Q: np.ndarray, structure: NordenStructure) -> np.ndarray:
    # g(Q(y, z), Q(x, w)) - g(Q(x, z), Q(y, w)), indexed [x, y, z, w]
    Qv = _vector(Q, structure)
    return np.einsum("yzm,xwm->xyzw", Qv, Q) - np.einsum("xzm,ywm->xyzw", Qv, Q)


def rprime_via_deformation(
    dc: DeformedConnection,
    base: CurvatureData,
    structure: NordenStructure,
    frame: Optional[FrameModel] = None,
) -> CurvatureData:
    """R' = R + (∇_x Q)(y, z, w) - (∇_y Q)(x, z, w) - g(Q(x, w), Q(y, z))
    + g(Q(y, w), Q(x, z)), with ∇ the Levi-Civita connection.
    """
    frame = frame if frame is not None else dc.frame
    DQ = covariant_derivative(dc.deformation_at, dc.base.gamma.array, structure, frame).array
    R = base.R.array + DQ - np.transpose(DQ, (1, 0, 2, 3)) - _q_quadratic(dc.Q.array, structure)
    return contract_curvature(R, structure, dc.label)


def ricci_via_deformation(
    dc: DeformedConnection,
    base: CurvatureData,
    structure: NordenStructure,
    frame: Optional[FrameModel] = None,
) -> DenseTensor:
    """ρ'(y, z) = ρ(y, z) + g^ij (∇_{e_i} Q)(y, z, e_j) + g^ij g(Q(y, e_j), Q(e_i, z)).

    Holds when the trace g^ij Q(e_i, e_j, z) vanishes, as for the canonical
    connection.
    """
    frame = frame if frame is not None else dc.frame
    g_inv = structure.g_inv.array
    Q = dc.Q.array
    DQ = covariant_derivative(dc.deformation_at, dc.base.gamma.array, structure, frame).array
    quadratic = np.einsum("ij,yjm,izm->yz", g_inv, _vector(Q, structure), Q)
    return base.ricci + DenseTensor.covariant(np.einsum("ij,iyzj->yz", g_inv, DQ) + quadratic)


def _q_contraction(Q: np.ndarray, structure: NordenStructure) -> float:
    # g^ij g^ks g(Q(e_k, e_j), Q(e_i, e_s))
    g_inv = structure.g_inv.array
    return float(np.einsum("ij,ks,kjm,ism->", g_inv, g_inv, _vector(Q, structure), Q))


def _p_contraction(nabla_J: np.ndarray, structure: NordenStructure) -> float:
    # 1/16 g^ij g^ks g(P_jk, P_si),
    # P_jk = (∇_{e_j} J)J e_k - (∇_{J e_j} J)e_k + 2(∇_{e_k} J)J e_j
    J = structure.J.array
    g_inv = structure.g_inv.array
    P = (
        np.einsum("mk,jmn->jkn", J, nabla_J)
        - np.einsum("mj,mkn->jkn", J, nabla_J)
        + 2.0 * np.einsum("mj,kmn->jkn", J, nabla_J)
    )
    return float(np.einsum("ij,ks,jka,sib,ab->", g_inv, g_inv, P, P, structure.g.array)) / 16.0


@dataclass(frozen=True)
class ScalarRelation:
    """Scalar curvatures of ∇ and the canonical ∇' on a quasi-Kähler structure.

    ``residual`` measures τ' - τ + ⅛‖∇J‖. ``stated_constant_residual``
    measures the same gap with ¼ in place of ⅛; it is reported for reference
    only.
    """

    tau: float
    tau_prime: float
    norm_nabla_J: float
    residual: float
    tolerance: float
    q_contraction: float
    q_contraction_residual: float
    trace_route_residual: float
    p_route_residual: float
    stated_constant_residual: float
    isotropic_consistent: bool

    @property
    def passed(self) -> bool:
        worst = max(self.residual, self.q_contraction_residual, self.trace_route_residual, self.p_route_residual)
        return worst <= self.tolerance


def scalar_relation_check(
    structure: NordenStructure,
    frame: FrameModel,
    canonical: DeformedConnection,
    geometry: Optional[LocalGeometry] = None,
    base: Optional[CurvatureData] = None,
    rprime: Optional[CurvatureData] = None,
) -> ScalarRelation:
    """Compares τ' with τ - ⅛‖∇J‖ and checks the contractions behind it.

    Raises
    ------
    ClassRequirementError
        If the structure is not quasi-Kähler
    """
    if geometry is None:
        geometry = local_geometry(structure, frame)
    if not class_membership(geometry.F, structure).is_quasi_kahler:
        raise ClassRequirementError("scalar curvature relation requires class W₃")
    if base is None:
        base = curvature(geometry.connection, structure, frame)
    if rprime is None:
        rprime = curvature(canonical, structure, frame)
    norm = square_norm_nabla_J(structure, geometry.nabla_J)
    tau, tau_prime = base.scalar, rprime.scalar
    q_value = _q_contraction(canonical.Q.array, structure)
    tolerance = membership_tolerance(abs(tau) + abs(tau_prime))
    gap = tau_prime - tau
    isotropic = abs(norm) <= membership_tolerance(geometry.F.F.max_norm() ** 2)
    return ScalarRelation(
        tau=tau,
        tau_prime=tau_prime,
        norm_nabla_J=norm,
        residual=abs(gap + norm / 8.0),
        tolerance=tolerance,
        q_contraction=q_value,
        q_contraction_residual=abs(q_value + norm / 8.0),
        trace_route_residual=abs(gap - q_value),
        p_route_residual=abs(_p_contraction(geometry.nabla_J.array, structure) - q_value),
        stated_constant_residual=abs(gap + norm / 4.0),
        isotropic_consistent=isotropic == (abs(gap) <= tolerance),
    )


@dataclass(frozen=True)
class ParallelTorsion:
    """Parallelism of T, Q and F under ∇', and the curvature identities that
    follow from it.

    ``isotropic_verdict`` is ``"verified"``, ``"failed"`` or
    ``"not_applicable"``; the latter when the torsion is not parallel.
    """

    residuals: Dict[str, float]
    verdicts: Dict[str, bool]
    tolerance: float
    isotropic_verdict: str
    norm_nabla_J: Optional[float] = None

    @property
    def is_parallel(self) -> bool:
        return self.verdicts["T"]

    @property
    def verdicts_coincide(self) -> bool:
        return len(set(self.verdicts.values())) == 1


def parallel_torsion_check(
    dc: DeformedConnection,
    structure: NordenStructure,
    frame: Optional[FrameModel] = None,
    geometry: Optional[LocalGeometry] = None,
    base: Optional[CurvatureData] = None,
    rprime: Optional[CurvatureData] = None,
) -> ParallelTorsion:
    """Measures ∇'T, ∇'Q and ∇'F and evaluates the curvature of a natural
    connection through its deformation.

    Residual keys:

    * ``deformation_identity``: R' = R + Q(T(x, y), z, w) + g(Q(y, z), Q(x, w))
      - g(Q(x, z), Q(y, w)) + (∇'_x Q)(y, z, w) - (∇'_y Q)(x, z, w), valid for
      every natural connection
    * ``torsion_substitution``: Q(T(x, y), z, w) = g(Q(z, w), T(x, y))
      + g((∇_{Jw} J)z, T(x, y)), valid for the canonical connection of a
      quasi-Kähler structure
    * ``q_contraction`` and ``torsion_contraction``: g^ij g^ks g(Q(e_j, e_s), Q(e_i, e_k))
      against -⅜‖∇J‖ and g^ij g^ks g((∇_{J e_s} J)e_j, T(e_i, e_k)) against ½‖∇J‖
    * ``parallel_deformation`` and ``parallel_curvature``: R' through the
      parallel-torsion formulas, present only when T is parallel
    """
    frame = frame if frame is not None else dc.frame
    if geometry is None:
        geometry = local_geometry(structure, frame)
    if base is None:
        base = curvature(geometry.connection, structure, frame)
    if rprime is None:
        rprime = curvature(dc, structure, frame)
    gamma = dc.gamma_prime.array
    T, Q = dc.T.array, dc.Q.array
    DT = covariant_derivative(dc.torsion_at, gamma, structure, frame).array
    DQ = covariant_derivative(dc.deformation_at, gamma, structure, frame).array
    DF = covariant_derivative(lambda s, f: local_geometry(s, f).F.array, gamma, structure, frame).array
    residuals = {"nabla_prime_T": max_norm(DT), "nabla_prime_Q": max_norm(DQ), "nabla_prime_F": max_norm(DF)}
    verdicts = {
        "T": residuals["nabla_prime_T"] <= membership_tolerance(T),
        "Q": residuals["nabla_prime_Q"] <= membership_tolerance(Q),
        "F": residuals["nabla_prime_F"] <= membership_tolerance(geometry.F.F),
    }

    J = structure.J.array
    g_inv = structure.g_inv.array
    DJ = geometry.nabla_J.array
    Tv = _vector(T, structure)
    Qv = _vector(Q, structure)
    q_of_torsion = np.einsum("xym,mzw->xyzw", Tv, Q)
    quadratic = _q_quadratic(Q, structure)
    R, R_prime = base.R.array, rprime.R.array
    residuals["deformation_identity"] = max_norm(
        R_prime - (R + q_of_torsion + quadratic + DQ - np.transpose(DQ, (1, 0, 2, 3)))
    )
    substituted = np.einsum("zwm,xym->xyzw", Qv, T) + np.einsum("mw,mzn,xyn->xyzw", J, DJ, T)
    residuals["torsion_substitution"] = max_norm(q_of_torsion - substituted)

    norm = square_norm_nabla_J(structure, geometry.nabla_J)
    q_value = float(np.einsum("ij,ks,jsm,ikm->", g_inv, g_inv, Qv, Q))
    t_value = float(np.einsum("ij,ks,ms,mjn,ikn->", g_inv, g_inv, J, DJ, T))
    residuals["q_contraction"] = abs(q_value + 3.0 * norm / 8.0)
    residuals["torsion_contraction"] = abs(t_value - norm / 2.0)

    tolerance = scaled_tolerance(IDENTITY_TOLERANCE, R, R_prime, Q, T, DQ)
    isotropic = NOT_APPLICABLE
    if verdicts["T"]:
        residuals["parallel_deformation"] = max_norm(R_prime - (R + q_of_torsion + quadratic))
        residuals["parallel_curvature"] = max_norm(R_prime - (R + quadratic + substituted))
        isotropic = VERIFIED if abs(norm) <= membership_tolerance(geometry.F.F.max_norm() ** 2) else FAILED
    return ParallelTorsion(residuals, verdicts, tolerance, isotropic, norm)
