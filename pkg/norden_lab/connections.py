# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Natural connections of a Norden structure.

A connection ∇' is written as a deformation of the Levi-Civita connection,
∇'_x y = ∇_x y + Q(x, y), and its tensors are stored lowered:
Q(x, y, z) = g(Q(x, y), z) and T(x, y, z) = g(T(x, y), z). A connection is
natural when ∇'J = ∇'g = 0.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import ClassRequirementError, TensorShapeError, TorsionError
from .frame_calculus import (
    VECTOR_VALUED,
    ConnectionCoeffs,
    FundamentalTensor,
    J_covariant_derivative,
    class_membership,
    fundamental_F,
    levi_civita,
    local_geometry,
    lower_values,
    metric_covariant_derivative,
    nijenhuis_lowered,
    torsion_components,
)
from .norden_model import FrameModel, NordenStructure
from .tensor_core import (
    IDENTITY_TOLERANCE,
    DenseTensor,
    max_norm,
    scaled_tolerance,
    substitute,
    substitute_array,
)

CANONICAL = "canonical"
B_CONNECTION = "b_connection"
KT_CONNECTION = "kt_connection"
CUSTOM = "custom"

GENERAL_PATH = "general"
QUASI_KAHLER_PATH = "quasi_kahler"
DEFINITIONAL_PATH = "definitional"

NOT_QUASI_KAHLER_NOTE = "structure is not quasi-Kähler; natural-connection properties are not guaranteed"

QField = Callable[[NordenStructure, FrameModel], np.ndarray]

# (scale, [(coefficient, pattern), ...]) for each torsion component p_k
PROJECTIONS = {
    1: (4.0, [(1, "x,y,z"), (-1, "Jx,Jy,z"), (-1, "Jx,y,Jz"), (-1, "x,Jy,Jz")]),
    2: (4.0, [(1, "x,y,z"), (-1, "Jx,Jy,z"), (1, "Jx,y,Jz"), (1, "x,Jy,Jz")]),
    3: (
        8.0,
        [
            (2, "x,y,z"),
            (-1, "y,z,x"),
            (-1, "z,x,y"),
            (-1, "Jy,z,Jx"),
            (-1, "z,Jx,Jy"),
            (2, "Jx,Jy,z"),
            (-1, "Jy,Jz,x"),
            (-1, "Jz,Jx,y"),
            (1, "y,Jz,Jx"),
            (1, "Jz,x,Jy"),
        ],
    ),
    4: (
        8.0,
        [
            (2, "x,y,z"),
            (1, "y,z,x"),
            (1, "z,x,y"),
            (1, "Jy,z,Jx"),
            (1, "z,Jx,Jy"),
            (2, "Jx,Jy,z"),
            (1, "Jy,Jz,x"),
            (1, "Jz,Jx,y"),
            (-1, "y,Jz,Jx"),
            (-1, "Jz,x,Jy"),
        ],
    ),
}


def _combine(arr, terms, J) -> np.ndarray:
    return sum(coefficient * substitute_array(arr, pattern, J) for coefficient, pattern in terms)


def apply_projection(index: int, T, J) -> np.ndarray:
    """Component p_index of a torsion array; leading batch axes are kept."""
    scale, terms = PROJECTIONS[index]
    return _combine(T, terms, J) / scale


@dataclass(frozen=True, eq=False)
class TorsionProjections:
    """The four components of a torsion tensor under the J-action."""

    p1: DenseTensor
    p2: DenseTensor
    p3: DenseTensor
    p4: DenseTensor
    J: DenseTensor

    def components(self) -> Tuple[DenseTensor, ...]:
        return (self.p1, self.p2, self.p3, self.p4)

    def total(self) -> DenseTensor:
        return self.p1 + self.p2 + self.p3 + self.p4

    def idempotence_residual(self) -> float:
        """Largest of |p_j(p_k) - δ_jk p_k| over all pairs."""
        worst = 0.0
        for k, component in enumerate(self.components(), start=1):
            for j in PROJECTIONS:
                expected = component.array if j == k else 0.0
                worst = max(worst, max_norm(apply_projection(j, component.array, self.J.array) - expected))
        return worst


def _check_torsion(T: DenseTensor):
    if T.rank != 3 or any(marker != "lower" for marker in T.variance):
        raise TensorShapeError("torsion must be a rank-3 lower tensor")
    residual = max_norm(T.array + np.transpose(T.array, (1, 0, 2)))
    if residual > scaled_tolerance(IDENTITY_TOLERANCE, T):
        raise TorsionError(f"torsion not antisymmetric in its first two slots (residual {residual:.3e})")


def torsion_projections(T: DenseTensor, structure: NordenStructure) -> TorsionProjections:
    """Splits T into p1 + p2 + p3 + p4.

    Raises
    ------
    TorsionError
        If T is not antisymmetric in its first two slots
    """
    _check_torsion(T)
    J = structure.J.array
    parts = [T.like(apply_projection(k, T.array, J)) for k in PROJECTIONS]
    return TorsionProjections(*parts, J=structure.J)


def phi_tensor(F: FundamentalTensor, structure: NordenStructure) -> DenseTensor:
    """Φ(x, y, z) = ½{F(Jz, x, y) - F(x, y, Jz) - F(y, Jz, x)}, the
    difference of the Levi-Civita connections of g~ and g, lowered with g.
    """
    J = structure.J
    F = F.F
    return 0.5 * (substitute(F, "Jz,x,y", J) - substitute(F, "x,y,Jz", J) - substitute(F, "y,Jz,x", J))


def associated_metric_gradient(structure: NordenStructure, frame: FrameModel) -> np.ndarray:
    """Frame derivatives of g~ = gJ by the product rule, ``out[m, i, j]``."""
    dg = frame.metric_gradient(structure)
    dJ = frame.J_gradient(structure)
    return np.einsum("mik,kj->mij", dg, structure.J.array) + np.einsum(
        "ik,mkj->mij", structure.g.array, dJ
    )


def phi_from_associated_metric(
    structure: NordenStructure, frame: FrameModel, conn: Optional[ConnectionCoeffs] = None
) -> DenseTensor:
    """Φ(x, y, z) = g(∇~_x y - ∇_x y, z) from the Levi-Civita connection ∇~
    of the associated metric.
    """
    if conn is None:
        conn = levi_civita(structure, frame)
    associated = levi_civita(
        structure,
        frame,
        metric=structure.g_assoc.array,
        metric_gradient=associated_metric_gradient(structure, frame),
    )
    return lower_values(associated.gamma - conn.gamma, structure)


def canonical_q_general(phi: DenseTensor, structure: NordenStructure) -> DenseTensor:
    """Deformation tensor of the canonical connection on any Norden structure.

    Natural, with torsion components p1 = p4 = 0; reduces to the quasi-Kähler
    form when the cyclic sum of F vanishes.
    """
    J = structure.J
    first = substitute(phi, "x,y,z", J) - substitute(phi, "x,z,y", J)
    second = (
        substitute(phi, "Jx,y,Jz", J)
        + substitute(phi, "x,Jy,Jz", J)
        - substitute(phi, "Jx,z,Jy", J)
        - substitute(phi, "x,Jz,Jy", J)
        - substitute(phi, "z,Jy,Jx", J)
        + substitute(phi, "y,Jz,Jx", J)
    )
    return 0.25 * first + 0.125 * second


def canonical_q_three_term(phi: DenseTensor, structure: NordenStructure) -> DenseTensor:
    """¼{Φ(x, y, z) - Φ(z, x, y) - Φ(Jz, x, Jy)}.

    Agrees with the canonical deformation only on Kähler structures; elsewhere
    it is not skew in its last two slots, so the connection it defines is not
    metric.
    """
    J = structure.J
    return 0.25 * (phi - substitute(phi, "z,x,y", J) - substitute(phi, "Jz,x,Jy", J))


def canonical_q_quasi_kahler(F: FundamentalTensor, structure: NordenStructure) -> DenseTensor:
    """Q(x, y, z) = ¼{F(y, Jx, z) - F(Jy, x, z) + 2F(x, Jy, z)}"""
    J = structure.J
    F = F.F
    return 0.25 * (substitute(F, "y,Jx,z", J) - substitute(F, "Jy,x,z", J) + 2.0 * substitute(F, "x,Jy,z", J))


def canonical_q_vector_form(nabla_J: DenseTensor, structure: NordenStructure) -> DenseTensor:
    """Q(x, y) = ¼{(∇_y J)Jx - (∇_{Jy} J)x + 2(∇_x J)Jy} as a vector-valued map."""
    J = structure.J.array
    DJ = nabla_J.array
    Q = 0.25 * (
        np.einsum("mi,jmk->ijk", J, DJ)
        - np.einsum("mj,mik->ijk", J, DJ)
        + 2.0 * np.einsum("mj,imk->ijk", J, DJ)
    )
    return DenseTensor(structure.dim, VECTOR_VALUED, Q)


def _natural_constraints(Q, J) -> Tuple[np.ndarray, ...]:
    # linear in Q; Q may carry leading batch axes
    T = Q - np.swapaxes(Q, -3, -2)
    return (
        substitute_array(Q, "x,y,Jz", J) - substitute_array(Q, "x,Jy,z", J),
        Q + substitute_array(Q, "x,z,y"),
        apply_projection(1, T, J),
        apply_projection(4, T, J),
    )


def canonical_q_definitional(F: FundamentalTensor, structure: NordenStructure) -> Tuple[DenseTensor, float]:
    """Solves for the canonical deformation from its defining conditions.

    The conditions are F(x, y, z) = Q(x, y, Jz) - Q(x, Jy, z), skewness of Q in
    its last two slots, and vanishing p1 and p4 of its torsion. They are linear
    in Q and solved by least squares.

    Returns
    -------
    (DenseTensor, float)
        The deformation and the max-norm residual of the solved system
    """
    dim = structure.dim
    size = dim**3
    J = structure.J.array
    basis = np.eye(size).reshape((size, dim, dim, dim))
    blocks = _natural_constraints(basis, J)
    matrix = np.concatenate([block.reshape(size, size).T for block in blocks], axis=0)
    target = np.concatenate([F.array.ravel()] + [np.zeros(size)] * (len(blocks) - 1))
    solution = scipy.linalg.lstsq(matrix, target)[0]
    residual = max_norm(matrix @ solution - target)
    return DenseTensor.covariant(solution.reshape((dim, dim, dim))), residual


@dataclass(frozen=True, eq=False)
class DeformedConnection:
    """∇' = ∇ + Q over a Levi-Civita base.

    ``q_field`` recomputes Q from scratch at another point of a chart; chart
    code uses it to difference derived fields.
    """

    base: ConnectionCoeffs
    Q: DenseTensor
    gamma_prime: DenseTensor
    T: DenseTensor
    label: str = CUSTOM
    q_field: Optional[QField] = None
    notes: Tuple[str, ...] = ()
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def frame(self) -> FrameModel:
        return self.base.frame

    def deformation_at(self, structure: NordenStructure, frame: FrameModel) -> np.ndarray:
        if self.q_field is None:
            return self.Q.array
        return self.q_field(structure, frame)

    def gamma_at(self, structure: NordenStructure, frame: FrameModel) -> np.ndarray:
        """Coefficients of ∇' recomputed at another point."""
        base = levi_civita(structure, frame).gamma.array
        return base + np.einsum("ijl,lk->ijk", self.deformation_at(structure, frame), structure.g_inv.array)

    def torsion_at(self, structure: NordenStructure, frame: FrameModel) -> np.ndarray:
        tor = torsion_components(self.gamma_at(structure, frame), frame.brackets())
        return np.einsum("ijk,kl->ijl", tor, structure.g.array)


def deform(
    base: ConnectionCoeffs,
    Q: DenseTensor,
    structure: NordenStructure,
    label: str = CUSTOM,
    q_field: Optional[QField] = None,
    notes: Tuple[str, ...] = (),
    diagnostics: Optional[Dict[str, float]] = None,
) -> DeformedConnection:
    """Builds ∇' = ∇ + Q with its torsion.

    ``diagnostics["torsion_identity"]`` records the largest deviation of T
    from Q(x, y, z) - Q(y, x, z).
    """
    if Q.rank != 3 or Q.dim != structure.dim:
        raise TensorShapeError("Q must be a rank-3 lower tensor of matching dim")
    gamma = base.gamma.array + np.einsum("ijl,lk->ijk", Q.array, structure.g_inv.array)
    tor = torsion_components(gamma, base.frame.brackets())
    T = DenseTensor.covariant(np.einsum("ijk,kl->ijl", tor, structure.g.array))
    recorded = {
        "torsion_identity": max_norm(T.array - (Q.array - np.transpose(Q.array, (1, 0, 2)))),
        "torsion_antisymmetry": max_norm(T.array + np.transpose(T.array, (1, 0, 2))),
    }
    recorded.update(diagnostics or {})
    return DeformedConnection(
        base,
        Q,
        DenseTensor(structure.dim, VECTOR_VALUED, gamma),
        T,
        label,
        q_field,
        tuple(notes),
        recorded,
    )


def _canonical_q(path: str, structure, frame, conn=None, nabla_J=None) -> Tuple[np.ndarray, Dict[str, float]]:
    if conn is None or nabla_J is None:
        geometry = local_geometry(structure, frame)
        conn, nabla_J = geometry.connection, geometry.nabla_J
    if path == QUASI_KAHLER_PATH:
        return lower_values(canonical_q_vector_form(nabla_J, structure), structure).array, {}
    F = fundamental_F(nabla_J, structure)
    if path == GENERAL_PATH:
        return canonical_q_general(phi_tensor(F, structure), structure).array, {}
    Q, residual = canonical_q_definitional(F, structure)
    return Q.array, {"definitional_system": residual}


def canonical_connection(
    structure: NordenStructure,
    frame: FrameModel,
    conn: ConnectionCoeffs,
    nabla_J: DenseTensor,
    path: str = GENERAL_PATH,
) -> DeformedConnection:
    """The canonical connection, the natural connection with p1 = p4 = 0.

    Parameters
    ----------
    path
        ``"general"`` builds Q from Φ and works on any Norden structure;
        ``"quasi_kahler"`` uses the closed form in ∇J, valid only when the
        structure is quasi-Kähler; ``"definitional"`` solves the defining
        conditions numerically

    Raises
    ------
    ClassRequirementError
        If the quasi-Kähler path receives a structure outside that class
    """
    if path not in (GENERAL_PATH, QUASI_KAHLER_PATH, DEFINITIONAL_PATH):
        raise ValueError(f"unknown canonical connection path '{path}'")
    if path == QUASI_KAHLER_PATH:
        F = fundamental_F(nabla_J, structure)
        if not class_membership(F, structure).is_quasi_kahler:
            raise ClassRequirementError("quasi-Kähler form requires class W₃")
    Q, diagnostics = _canonical_q(path, structure, frame, conn, nabla_J)
    return deform(
        conn,
        DenseTensor.covariant(Q),
        structure,
        CANONICAL,
        q_field=lambda s, f: _canonical_q(path, s, f)[0],
        diagnostics=diagnostics,
    )


def _named_connection(label, q_of_F, F, structure, conn) -> DeformedConnection:
    notes = ()
    if not class_membership(F, structure).is_quasi_kahler:
        notes = (NOT_QUASI_KAHLER_NOTE,)

    def q_field(s, f):
        return q_of_F(local_geometry(s, f).F, s).array

    return deform(conn, q_of_F(F, structure), structure, label, q_field=q_field, notes=notes)


def b_deformation(F: FundamentalTensor, structure: NordenStructure) -> DenseTensor:
    """Q(x, y, z) = ½F(x, Jy, z)"""
    return 0.5 * substitute(F.F, "x,Jy,z", structure.J)


def kt_deformation(F: FundamentalTensor, structure: NordenStructure) -> DenseTensor:
    """Q(x, y, z) = -¼{F(x, y, Jz) + F(y, z, Jx) + F(z, x, Jy)}"""
    J = structure.J
    F = F.F
    return -0.25 * (substitute(F, "x,y,Jz", J) + substitute(F, "y,z,Jx", J) + substitute(F, "z,x,Jy", J))


def b_connection(F: FundamentalTensor, structure: NordenStructure, conn: ConnectionCoeffs) -> DeformedConnection:
    """The B-connection. Outside the quasi-Kähler class it is still built,
    with a note that it need not be natural.
    """
    return _named_connection(B_CONNECTION, b_deformation, F, structure, conn)


def kt_connection(F: FundamentalTensor, structure: NordenStructure, conn: ConnectionCoeffs) -> DeformedConnection:
    """The KT-connection, natural with totally skew-symmetric torsion on
    quasi-Kähler structures.
    """
    return _named_connection(KT_CONNECTION, kt_deformation, F, structure, conn)


@dataclass(frozen=True)
class NaturalityCheck:
    """Residuals of ∇'J = ∇'g = 0 and of the equivalent conditions on Q.

    The torsion-component identities relate p2 to the Nijenhuis tensor and to
    Φ, and p3 to Φ. They are measured for every connection; they are expected
    to vanish for the canonical one.
    """

    residuals: Dict[str, float]
    tolerance: float

    @property
    def is_natural(self) -> bool:
        keys = ("nabla_prime_J", "nabla_prime_g", "F_from_Q", "Q_skew")
        return all(self.residuals[key] <= self.tolerance for key in keys)


def naturality_check(dc: DeformedConnection, structure: NordenStructure, F: FundamentalTensor) -> NaturalityCheck:
    """Measures how far ∇' is from being natural."""
    frame = dc.frame
    J = structure.J
    gamma = dc.gamma_prime.array
    Q = dc.Q
    DJ_prime = J_covariant_derivative(gamma, structure, frame)
    Dg_prime = metric_covariant_derivative(gamma, structure.g.array, frame.metric_gradient(structure))
    phi = phi_tensor(F, structure)
    N = nijenhuis_lowered(F, J)
    p2 = apply_projection(2, dc.T.array, J.array)
    p3 = apply_projection(3, dc.T.array, J.array)
    phi_p2 = 2.0 * (substitute(phi, "z,Jx,Jy", J) - substitute(phi, "z,x,y", J))
    phi_p3 = (
        -phi
        + substitute(phi, "y,z,x", J)
        + substitute(phi, "x,Jy,Jz", J)
        + substitute(phi, "y,Jz,Jx", J)
        - 2.0 * substitute(phi, "z,Jx,Jy", J)
    )
    residuals = {
        "nabla_prime_J": max_norm(DJ_prime),
        "nabla_prime_g": max_norm(Dg_prime),
        "F_from_Q": max_norm(F.F - (substitute(Q, "x,y,Jz", J) - substitute(Q, "x,Jy,z", J))),
        "Q_skew": max_norm(Q.array + np.transpose(Q.array, (0, 2, 1))),
        "p2_nijenhuis": max_norm(4.0 * p2 - N.array),
        "nijenhuis_phi": max_norm(N - phi_p2),
        "p3_phi": max_norm(4.0 * p3 - phi_p3.array),
    }
    tolerance = scaled_tolerance(IDENTITY_TOLERANCE, F.F, Q, structure.g, J)
    return NaturalityCheck(residuals, tolerance)


def hayden_q_from_torsion(T: DenseTensor) -> DenseTensor:
    """Deformation of the metric connection with torsion T,
    ½{T(x, y, z) - T(y, z, x) + T(z, x, y)}.
    """
    _check_torsion(T)
    return 0.5 * (T - substitute(T, "y,z,x") + substitute(T, "z,x,y"))


def f_from_torsion(T: DenseTensor, structure: NordenStructure) -> DenseTensor:
    """F(x, y, z) = T(x, z, Jy) - T(x, Jy, z); recovers F from the canonical
    torsion of a quasi-Kähler structure.
    """
    J = structure.J
    return substitute(T, "x,z,Jy", J) - substitute(T, "x,Jy,z", J)


def torsion_from_f(F: FundamentalTensor, structure: NordenStructure) -> DenseTensor:
    """T(x, y, z) = ½{F(x, Jy, z) + F(Jx, y, z)}, the canonical torsion of a
    quasi-Kähler structure.
    """
    J = structure.J
    return 0.5 * (substitute(F.F, "x,Jy,z", J) + substitute(F.F, "Jx,y,z", J))


def canonical_torsion_symmetries(T: DenseTensor, structure: NordenStructure) -> Dict[str, float]:
    """Residuals of T(x, y, z) = -T(y, x, z) and
    T(Jx, y, z) = T(x, Jy, z) = -T(x, y, Jz).
    """
    J = structure.J
    Jx = substitute(T, "Jx,y,z", J)
    return {
        "antisymmetry": max_norm(T.array + np.transpose(T.array, (1, 0, 2))),
        "Jx_equals_Jy": max_norm(Jx - substitute(T, "x,Jy,z", J)),
        "Jx_opposes_Jz": max_norm(Jx + substitute(T, "x,y,Jz", J)),
    }


def canonical_q_identities(Q: DenseTensor, F: FundamentalTensor, structure: NordenStructure) -> Dict[str, float]:
    """Residuals of Q(x, y, z) = -Q(y, x, z) + F(Jz, x, y) and of the trace
    g^ij Q(e_i, e_j, z) = 0.
    """
    swapped = substitute(Q, "y,x,z")
    return {
        "swap_first_two": max_norm(Q + swapped - substitute(F.F, "Jz,x,y", structure.J)),
        "trace": max_norm(np.einsum("ij,ijz->z", structure.g_inv.array, Q.array)),
    }


def total_skew_residual(T: DenseTensor) -> float:
    """How far T is from being skew in all three slots."""
    return max(
        max_norm(T.array + np.transpose(T.array, (1, 0, 2))),
        max_norm(T.array + np.transpose(T.array, (0, 2, 1))),
    )


def mean_connection_residual(b: DeformedConnection, kt: DeformedConnection, canonical: DeformedConnection) -> float:
    """Residual of Q^B = ½(Q^KT + Q^C)."""
    return max_norm(b.Q - 0.5 * (kt.Q + canonical.Q))

