# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Registry of verification checks.

A check turns an :class:`InstanceContext` into a residual. Its verdict is
pass exactly when the residual is at most the tolerance, where the tolerance
is the check's base tolerance times max(1, operand max-norm) times the
configured scale. Charts use the looser base tolerance of checks that read
finite-difference derivatives.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..connections import (
    canonical_q_identities,
    canonical_q_quasi_kahler,
    canonical_q_three_term,
    canonical_torsion_symmetries,
    f_from_torsion,
    hayden_q_from_torsion,
    mean_connection_residual,
    naturality_check,
    torsion_from_f,
    torsion_projections,
    total_skew_residual,
)
from ..curvature_lab import (
    VERIFIED,
    kahler_curvature_consequences,
    kahler_tensor_check,
    ricci_via_deformation,
    rprime_via_deformation,
)
from ..errors import MetricError, UnknownCheckError
from ..frame_calculus import (
    FINITE_DIFFERENCES,
    levi_civita,
    nijenhuis_lowered,
    square_norm_cross_form,
    square_norm_nabla_J,
    trace_F_jz,
)
from ..norden_model import LIE_ALGEBRA, jacobi_tensor, signature
from ..tensor_core import IDENTITY_TOLERANCE, MEMBERSHIP_TOLERANCE, max_norm, substitute
from .context import InstanceContext
from .model import CheckResult
from .references import reference

ANY = "any"
W3 = "w3"
NON_KAHLER_W3 = "non_kahler_w3"
NON_W3 = "non_w3"
NON_KAHLER = "non_kahler"
CHART_ONLY = "chart"
LIE_ONLY = "lie_algebra"

#: Base tolerance of checks that difference derived fields on a chart.
CHART_TOLERANCE = 1e-6
#: A quantity expected to be nonzero must exceed this.
NONZERO_FLOOR = 1e-6

_REQUIREMENTS = {
    W3: "requires a quasi-Kähler instance",
    NON_KAHLER_W3: "requires a quasi-Kähler, non-Kähler instance",
    NON_W3: "requires an instance outside the quasi-Kähler class",
    NON_KAHLER: "requires a non-Kähler instance",
    CHART_ONLY: "requires a polynomial chart",
    LIE_ONLY: "requires a Lie-algebra frame",
}


class NotApplicable(Exception):
    """Raised by a check whose precondition does not hold on the instance."""


@dataclass(frozen=True)
class Measurement:
    """A residual and the operands whose size scales its tolerance."""

    residual: float
    operands: Tuple = ()


@dataclass(frozen=True)
class Check:
    check_id: str
    statement: str
    applicability: str
    evaluate: Callable[[InstanceContext], Measurement]
    tolerance: float = IDENTITY_TOLERANCE
    chart_tolerance: Optional[float] = None
    paper_ref: str = ""
    alias: Optional[str] = None

    def applies_to(self, context: InstanceContext) -> bool:
        if self.applicability == ANY:
            return True
        if self.applicability == CHART_ONLY:
            return context.is_chart
        if self.applicability == LIE_ONLY:
            return context.frame.kind == LIE_ALGEBRA
        if self.applicability == NON_W3:
            return not context.is_quasi_kahler
        if self.applicability == NON_KAHLER:
            return not context.is_kahler
        if self.applicability == W3:
            return context.is_quasi_kahler
        return context.is_quasi_kahler and not context.is_kahler

    def base_tolerance(self, context: InstanceContext) -> float:
        if context.is_chart and self.chart_tolerance is not None:
            return self.chart_tolerance
        return self.tolerance

    def run(self, context: InstanceContext, scale: float = 1.0) -> CheckResult:
        if not self.applies_to(context):
            return CheckResult.skipped(
                self.check_id, self.statement, _REQUIREMENTS[self.applicability], self.paper_ref
            )
        try:
            measurement = self.evaluate(context)
        except NotApplicable as reason:
            return CheckResult.skipped(self.check_id, self.statement, str(reason), self.paper_ref)
        size = max([1.0] + [max_norm(op) for op in measurement.operands])
        tolerance = self.base_tolerance(context) * size * scale
        return CheckResult.measured(
            self.check_id, self.statement, measurement.residual, tolerance, self.paper_ref
        )


REGISTRY: Dict[str, Check] = {}


def check(check_id, statement, applicability=ANY, tolerance=IDENTITY_TOLERANCE, chart_tolerance=None):
    """Registers the decorated function as a check.

    The check's alias and paper_ref come from :data:`references.REFERENCES`;
    registering a check without one is an error.
    """

    def register(evaluate):
        if check_id in REGISTRY:
            raise ValueError(f"duplicate check id '{check_id}'")
        alias, paper_ref = reference(check_id)
        REGISTRY[check_id] = Check(
            check_id, statement, applicability, evaluate, tolerance, chart_tolerance, paper_ref, alias
        )
        return evaluate

    return register


def _flag(holds: bool) -> Measurement:
    return Measurement(0.0 if holds else 1.0)


def _nonzero(value: float) -> Measurement:
    return Measurement(max(0.0, NONZERO_FLOOR - value))


def select(check_ids=None) -> List[Check]:
    """Checks in registry order, optionally restricted to ``check_ids``.

    An entry may be a check id or an alias tag such as ``thm_4_4``; a tag
    selects every check carrying it.

    Raises
    ------
    UnknownCheckError
        If an entry is neither a registered id nor an alias
    """
    if not check_ids:
        return list(REGISTRY.values())
    aliases = {c.alias for c in REGISTRY.values() if c.alias}
    unknown = [name for name in check_ids if name not in REGISTRY and name not in aliases]
    if unknown:
        raise UnknownCheckError(f"unknown check ids: {', '.join(unknown)}")
    wanted = set(check_ids)
    return [c for c in REGISTRY.values() if c.check_id in wanted or c.alias in wanted]


# structure and frame


@check("structure_axioms", "g symmetric and invertible, J^2 = -1, g(Jx, Jy) = -g(x, y)")
def _structure_axioms(ctx):
    s = ctx.structure
    g, J = s.g.array, s.J.array
    eye = np.eye(s.dim)
    residual = max(
        max_norm(g - g.T),
        max_norm(s.g_inv.array @ g - eye),
        max_norm(J @ J + eye),
        max_norm(J.T @ g @ J + g),
    )
    return Measurement(residual, (g, J))


@check("metric_signature", "g and the associated metric both have signature (n, n)")
def _metric_signature(ctx):
    s = ctx.structure
    try:
        return _flag(signature(s.g.array) == (s.n, s.n) and signature(s.g_assoc.array) == (s.n, s.n))
    except MetricError:
        return _flag(False)


@check("associated_metric", "g~(x, y) = g(x, Jy) is symmetric and its own associated metric is -g")
def _associated_metric(ctx):
    s = ctx.structure
    g_assoc = s.g_assoc.array
    residual = max(max_norm(g_assoc - g_assoc.T), max_norm(g_assoc @ s.J.array + s.g.array))
    return Measurement(residual, (s.g, s.J))


@check("jacobi_identity", "structure constants satisfy the Jacobi identity", LIE_ONLY)
def _jacobi_identity(ctx):
    C = ctx.frame.brackets()
    return Measurement(max_norm(jacobi_tensor(C)), (C, C * C))


@check(
    "chart_christoffel",
    "Christoffel symbols from the exact metric derivative match finite differences",
    CHART_ONLY,
    tolerance=CHART_TOLERANCE,
)
def _chart_christoffel(ctx):
    exact = ctx.geometry.connection.gamma
    fd = levi_civita(ctx.structure, ctx.frame, FINITE_DIFFERENCES).gamma
    return Measurement(max_norm(exact - fd), (exact,))


# frame calculus


@check("levi_civita_metric", "the Levi-Civita connection satisfies ∇g = 0")
def _levi_civita_metric(ctx):
    conn = ctx.geometry.connection
    return Measurement(conn.metric_residual, (conn.gamma, ctx.structure.g))


@check("levi_civita_torsion_free", "the Levi-Civita connection is torsion free")
def _levi_civita_torsion_free(ctx):
    conn = ctx.geometry.connection
    return Measurement(conn.torsion_residual, (conn.gamma, ctx.frame.brackets()))


@check("nabla_J_anticommutes", "(∇_x J)Jy = -J(∇_x J)y")
def _nabla_J_anticommutes(ctx):
    J = ctx.structure.J.array
    DJ = ctx.geometry.nabla_J.array
    residual = max_norm(np.einsum("mj,imk->ijk", J, DJ) + np.einsum("km,ijm->ijk", J, DJ))
    return Measurement(residual, (DJ, J))


@check("fundamental_tensor_symmetries", "F(x, y, z) = F(x, z, y) = F(x, Jy, Jz) and F(x, Jy, z) = -F(x, y, Jz)")
def _fundamental_tensor_symmetries(ctx):
    F = ctx.F
    return Measurement(max(F.symmetry_residuals.values()), (F.F, ctx.structure.J))


@check("trace_F_jz", "g^ij F(Jz, e_i, e_j) = 0")
def _trace_F_jz(ctx):
    return Measurement(max_norm(trace_F_jz(ctx.F, ctx.structure)), (ctx.F.F, ctx.structure.g_inv))


@check(
    "class_characterizations",
    "cyclic F = 0, N* = 0 and the cyclic sum of F(Jx, y, z) = 0 give the same quasi-Kähler verdict",
)
def _class_characterizations(ctx):
    return _flag(ctx.flags.characterizations_agree)


@check("nijenhuis_symmetries", "N is skew and N* symmetric in their first two arguments")
def _nijenhuis_symmetries(ctx):
    J = ctx.structure.J
    N = nijenhuis_lowered(ctx.F, J).array
    N_star = nijenhuis_lowered(ctx.F, J, associated=True).array
    residual = max(max_norm(N + np.transpose(N, (1, 0, 2))), max_norm(N_star - np.transpose(N_star, (1, 0, 2))))
    return Measurement(residual, (ctx.F.F,))


@check("nijenhuis_star_vanishes", "N* = 0 on a quasi-Kähler structure", W3, tolerance=MEMBERSHIP_TOLERANCE)
def _nijenhuis_star_vanishes(ctx):
    return Measurement(max_norm(nijenhuis_lowered(ctx.F, ctx.structure.J, associated=True)), (ctx.F.F,))


@check("nijenhuis_nonzero", "N ≠ 0 on a quasi-Kähler, non-Kähler structure", NON_KAHLER_W3)
def _nijenhuis_nonzero(ctx):
    return _nonzero(max_norm(nijenhuis_lowered(ctx.F, ctx.structure.J)))


def _square_norms(ctx):
    DJ = ctx.geometry.nabla_J
    return square_norm_nabla_J(ctx.structure, DJ), square_norm_cross_form(ctx.structure, DJ)


@check(
    "square_norm_forms",
    "‖∇J‖ equals -2 g^ij g^ks g((∇_i J)e_k, (∇_s J)e_j) on a quasi-Kähler structure",
    W3,
)
def _square_norm_forms(ctx):
    norm, cross = _square_norms(ctx)
    return Measurement(abs(norm - cross), (norm, cross, ctx.F.F.max_norm() ** 2))


@check("square_norm_forms_differ", "the two square-norm formulas disagree outside the quasi-Kähler class", NON_W3)
def _square_norm_forms_differ(ctx):
    norm, cross = _square_norms(ctx)
    return _nonzero(abs(norm - cross))


# connections


@check("phi_associated_metric", "Φ equals the difference of the Levi-Civita connections of g~ and g")
def _phi_associated_metric(ctx):
    return Measurement(max_norm(ctx.phi - ctx.phi_associated), (ctx.phi,))


@check("phi_quasi_kahler_form", "Φ(x, y, z) = F(Jz, x, y) on a quasi-Kähler structure", W3)
def _phi_quasi_kahler_form(ctx):
    return Measurement(max_norm(ctx.phi - substitute(ctx.F.F, "Jz,x,y", ctx.structure.J)), (ctx.phi,))


@check("canonical_natural", "the canonical connection satisfies ∇'J = ∇'g = 0")
def _canonical_natural(ctx):
    residuals = ctx.naturality.residuals
    worst = max(residuals[key] for key in ("nabla_prime_J", "nabla_prime_g", "F_from_Q", "Q_skew"))
    return Measurement(worst, (ctx.F.F, ctx.canonical.Q, ctx.structure.J))


@check("canonical_definitional", "the closed-form canonical deformation solves its defining conditions")
def _canonical_definitional(ctx):
    definitional = ctx.canonical_definitional
    residual = max(max_norm(ctx.canonical.Q - definitional.Q), definitional.diagnostics["definitional_system"])
    return Measurement(residual, (ctx.canonical.Q, ctx.F.F))


@check("canonical_paths_agree", "general and quasi-Kähler forms of the canonical deformation agree", W3)
def _canonical_paths_agree(ctx):
    return Measurement(max_norm(ctx.canonical.Q - ctx.canonical_quasi_kahler.Q), (ctx.canonical.Q,))


@check("canonical_q_closed_form", "Q(x, y, z) = ¼{F(y, Jx, z) - F(Jy, x, z) + 2F(x, Jy, z)}", W3)
def _canonical_q_closed_form(ctx):
    expected = canonical_q_quasi_kahler(ctx.F, ctx.structure)
    return Measurement(max_norm(ctx.canonical.Q - expected), (expected,))


@check("canonical_q_identities", "Q(x, y, z) + Q(y, x, z) = F(Jz, x, y) and g^ij Q(e_i, e_j, z) = 0", W3)
def _canonical_q_identities(ctx):
    residuals = canonical_q_identities(ctx.canonical.Q, ctx.F, ctx.structure)
    return Measurement(max(residuals.values()), (ctx.canonical.Q, ctx.F.F))


@check("canonical_p1_p4_vanish", "the canonical torsion has no p1 or p4 component")
def _canonical_p1_p4_vanish(ctx):
    parts = torsion_projections(ctx.canonical.T, ctx.structure)
    return Measurement(max(parts.p1.max_norm(), parts.p4.max_norm()), (ctx.canonical.T,))


@check("canonical_torsion_component", "the canonical torsion equals its p2 component", W3)
def _canonical_torsion_component(ctx):
    T = ctx.canonical.T
    parts = torsion_projections(T, ctx.structure)
    residual = max(parts.p1.max_norm(), parts.p3.max_norm(), parts.p4.max_norm(), max_norm(T - parts.p2))
    return Measurement(residual, (T,))


@check("canonical_torsion_nonzero", "the canonical torsion is nonzero off the Kähler class", NON_KAHLER_W3)
def _canonical_torsion_nonzero(ctx):
    return _nonzero(torsion_projections(ctx.canonical.T, ctx.structure).p2.max_norm())


@check("canonical_torsion_symmetries", "T(Jx, y, z) = T(x, Jy, z) = -T(x, y, Jz)", W3)
def _canonical_torsion_symmetries(ctx):
    residuals = canonical_torsion_symmetries(ctx.canonical.T, ctx.structure)
    return Measurement(max(residuals.values()), (ctx.canonical.T,))


@check("canonical_torsion_from_F", "T(x, y, z) = ½{F(x, Jy, z) + F(Jx, y, z)}", W3)
def _canonical_torsion_from_F(ctx):
    expected = torsion_from_f(ctx.F, ctx.structure)
    return Measurement(max_norm(ctx.canonical.T - expected), (expected,))


@check("F_from_canonical_torsion", "F(x, y, z) = T(x, z, Jy) - T(x, Jy, z)", W3)
def _F_from_canonical_torsion(ctx):
    return Measurement(max_norm(f_from_torsion(ctx.canonical.T, ctx.structure) - ctx.F.F), (ctx.F.F,))


@check("canonical_p2_nijenhuis", "4 p2(T) = N for the canonical connection")
def _canonical_p2_nijenhuis(ctx):
    return Measurement(ctx.naturality.residuals["p2_nijenhuis"], (ctx.F.F, ctx.canonical.T))


@check("nijenhuis_phi_form", "N(x, y, z) = 2{Φ(z, Jx, Jy) - Φ(z, x, y)}")
def _nijenhuis_phi_form(ctx):
    return Measurement(ctx.naturality.residuals["nijenhuis_phi"], (ctx.F.F, ctx.phi))


@check("canonical_p3_phi", "p3 of the canonical torsion is determined by Φ")
def _canonical_p3_phi(ctx):
    return Measurement(ctx.naturality.residuals["p3_phi"], (ctx.phi, ctx.canonical.T))


@check("torsion_projection_sum", "p1 + p2 + p3 + p4 = T for the canonical, B- and KT-torsions")
def _torsion_projection_sum(ctx):
    worst, operands = 0.0, []
    for dc in (ctx.canonical, ctx.b, ctx.kt):
        worst = max(worst, max_norm(torsion_projections(dc.T, ctx.structure).total() - dc.T))
        operands.append(dc.T)
    return Measurement(worst, tuple(operands))


@check("torsion_projection_idempotent", "p_j(p_k(T)) = δ_jk p_k(T)")
def _torsion_projection_idempotent(ctx):
    T = ctx.b.T
    return Measurement(torsion_projections(T, ctx.structure).idempotence_residual(), (T,))


@check("metric_deformation_from_torsion", "Q = ½{T(x, y, z) - T(y, z, x) + T(z, x, y)} for metric connections")
def _metric_deformation_from_torsion(ctx):
    worst = max(max_norm(hayden_q_from_torsion(dc.T) - dc.Q) for dc in (ctx.canonical, ctx.b))
    return Measurement(worst, (ctx.canonical.T, ctx.b.T))


@check("b_connection_natural", "the B-connection is natural on a quasi-Kähler structure", W3)
def _b_connection_natural(ctx):
    return _named_natural(ctx, ctx.b)


@check("kt_connection_natural", "the KT-connection is natural on a quasi-Kähler structure", W3)
def _kt_connection_natural(ctx):
    return _named_natural(ctx, ctx.kt)


def _named_natural(ctx, dc):
    residuals = naturality_check(dc, ctx.structure, ctx.F).residuals
    worst = max(residuals[key] for key in ("nabla_prime_J", "nabla_prime_g", "F_from_Q", "Q_skew"))
    return Measurement(worst, (ctx.F.F, dc.Q, ctx.structure.J))


@check("kt_torsion_totally_skew", "the KT-torsion is totally skew-symmetric and Q^KT = ½T^KT", W3)
def _kt_torsion_totally_skew(ctx):
    T, Q = ctx.kt.T, ctx.kt.Q
    return Measurement(max(total_skew_residual(T), max_norm(Q - 0.5 * T)), (T,))


@check("mean_connection", "Q^B = ½(Q^KT + Q^C)", W3)
def _mean_connection(ctx):
    return Measurement(mean_connection_residual(ctx.b, ctx.kt, ctx.canonical), (ctx.b.Q,))


@check("levi_civita_not_natural", "the Levi-Civita connection does not preserve J off the Kähler class", NON_KAHLER)
def _levi_civita_not_natural(ctx):
    return _nonzero(ctx.geometry.nabla_J.max_norm())


@check(
    "three_term_deformation_not_metric",
    "the three-term Φ formula is not skew in its last two slots off the Kähler class",
    NON_KAHLER_W3,
)
def _three_term_not_metric(ctx):
    Q = canonical_q_three_term(ctx.phi, ctx.structure).array
    return _nonzero(max_norm(Q + np.transpose(Q, (0, 2, 1))))


# curvature


@check(
    "levi_civita_curvature_symmetries",
    "R is skew in (x, y) and (z, w) and satisfies the first Bianchi identity",
    chart_tolerance=CHART_TOLERANCE,
)
def _levi_civita_curvature_symmetries(ctx):
    result = kahler_tensor_check(ctx.base_curvature, ctx.structure)
    keys = ("antisymmetric_xy", "antisymmetric_zw", "first_bianchi")
    return Measurement(max(result.residuals[key] for key in keys), (ctx.base_curvature.R,))


def _natural_curvature(data, ctx):
    result = kahler_tensor_check(data, ctx.structure)
    keys = ("antisymmetric_xy", "antisymmetric_zw", "J_on_last_two")
    return Measurement(max(result.residuals[key] for key in keys), (data.R,))


@check(
    "canonical_curvature_symmetries",
    "R' of the canonical connection is skew in both pairs and R'(x, y, Jz, Jw) = -R'(x, y, z, w)",
    chart_tolerance=CHART_TOLERANCE,
)
def _canonical_curvature_symmetries(ctx):
    return _natural_curvature(ctx.canonical_curvature, ctx)


@check(
    "b_kt_curvature_symmetries",
    "R' of the B- and KT-connections is skew in both pairs and R'(x, y, Jz, Jw) = -R'(x, y, z, w)",
    W3,
    chart_tolerance=CHART_TOLERANCE,
)
def _b_kt_curvature_symmetries(ctx):
    b = _natural_curvature(ctx.b_curvature, ctx)
    kt = _natural_curvature(ctx.kt_curvature, ctx)
    return Measurement(max(b.residual, kt.residual), b.operands + kt.operands)


@check(
    "deformation_curvature",
    "R' from the connection equals R + (∇_x Q)(y) - (∇_y Q)(x) + quadratic terms in Q",
    chart_tolerance=CHART_TOLERANCE,
)
def _deformation_curvature(ctx):
    via = rprime_via_deformation(ctx.canonical, ctx.base_curvature, ctx.structure, ctx.frame)
    direct = ctx.canonical_curvature.R
    return Measurement(max_norm(direct - via.R), (direct, ctx.base_curvature.R))


@check(
    "deformation_ricci",
    "ρ' = ρ + g^ij (∇_i Q)(y, z, e_j) + g^ij g(Q(y, e_j), Q(e_i, z)) for the canonical connection",
    W3,
    chart_tolerance=CHART_TOLERANCE,
)
def _deformation_ricci(ctx):
    via = ricci_via_deformation(ctx.canonical, ctx.base_curvature, ctx.structure, ctx.frame)
    direct = ctx.canonical_curvature.ricci
    return Measurement(max_norm(direct - via), (direct, ctx.base_curvature.ricci))


@check(
    "bianchi_torsion_dual_path",
    "the cyclic sum of (∇'_x T)(y, z) + T(T(x, y), z) equals the cyclic sum of R'",
    chart_tolerance=CHART_TOLERANCE,
)
def _bianchi_torsion_dual_path(ctx):
    bianchi = ctx.bianchi
    return Measurement(bianchi.dual_path_residual, (bianchi.residual, bianchi.curvature_route))


@check(
    "kahler_curvature_equivalence",
    "R' of the canonical connection is a Kähler tensor iff the Bianchi identity with torsion holds",
    W3,
)
def _kahler_curvature_equivalence(ctx):
    is_kahler_tensor = kahler_tensor_check(ctx.canonical_curvature, ctx.structure).passed
    return _flag(is_kahler_tensor == ctx.bianchi.vanishes)


@check(
    "kahler_curvature_consequences",
    "a Kähler R' forces T(T(z, x), y, w) = 0 and the torsion and ∇J pairings to vanish",
    W3,
    chart_tolerance=CHART_TOLERANCE,
)
def _kahler_curvature_consequences(ctx):
    if not ctx.bianchi.vanishes:
        raise NotApplicable("canonical curvature is not a Kähler tensor")
    residuals = kahler_curvature_consequences(ctx.canonical, ctx.geometry)
    return Measurement(max(residuals.values()), (ctx.canonical.T, ctx.geometry.nabla_J))


@check(
    "scalar_curvature_relation",
    "τ' = τ - ⅛‖∇J‖ for the canonical connection",
    W3,
    tolerance=MEMBERSHIP_TOLERANCE,
    chart_tolerance=CHART_TOLERANCE,
)
def _scalar_curvature_relation(ctx):
    scalar = ctx.scalar
    return Measurement(scalar.residual, (scalar.tau, scalar.tau_prime))


@check(
    "scalar_curvature_contractions",
    "g^ij g^ks g(Q(e_k, e_j), Q(e_i, e_s)) = τ' - τ = -⅛‖∇J‖, also through the P_jk contraction",
    W3,
    tolerance=MEMBERSHIP_TOLERANCE,
    chart_tolerance=CHART_TOLERANCE,
)
def _scalar_curvature_contractions(ctx):
    scalar = ctx.scalar
    residual = max(scalar.q_contraction_residual, scalar.trace_route_residual, scalar.p_route_residual)
    return Measurement(residual, (scalar.tau, scalar.tau_prime, scalar.norm_nabla_J))


@check("isotropic_scalar_equivalence", "τ' = τ iff the structure is isotropic-Kähler", W3)
def _isotropic_scalar_equivalence(ctx):
    return _flag(ctx.scalar.isotropic_consistent)


@check("parallel_verdicts_coincide", "∇'T = 0, ∇'Q = 0 and ∇'F = 0 hold together for the canonical connection")
def _parallel_verdicts_coincide(ctx):
    return _flag(ctx.parallel.verdicts_coincide)


@check(
    "natural_deformation_identity",
    "R' = R + Q(T(x, y), z, w) + quadratic terms in Q + (∇'_x Q)(y, z, w) - (∇'_y Q)(x, z, w)",
    chart_tolerance=CHART_TOLERANCE,
)
def _natural_deformation_identity(ctx):
    return Measurement(ctx.parallel.residuals["deformation_identity"], _curvatures(ctx))


@check(
    "torsion_substitution",
    "Q(T(x, y), z, w) = g(Q(z, w), T(x, y)) + g((∇_Jw J)z, T(x, y))",
    W3,
)
def _torsion_substitution(ctx):
    return Measurement(ctx.parallel.residuals["torsion_substitution"], (ctx.canonical.Q, ctx.canonical.T))


@check(
    "parallel_torsion_contractions",
    "g^ij g^ks g(Q(e_j, e_s), Q(e_i, e_k)) = -⅜‖∇J‖ and "
    "g^ij g^ks g((∇_Je_s J)e_j, T(e_i, e_k)) = ½‖∇J‖",
    W3,
    tolerance=MEMBERSHIP_TOLERANCE,
)
def _parallel_torsion_contractions(ctx):
    parallel = ctx.parallel
    residual = max(parallel.residuals["q_contraction"], parallel.residuals["torsion_contraction"])
    return Measurement(residual, (parallel.norm_nabla_J, ctx.F.F.max_norm() ** 2))


def _curvatures(ctx) -> Tuple:
    return (ctx.base_curvature.R, ctx.canonical_curvature.R, ctx.canonical.Q, ctx.canonical.T)


def _require_parallel(ctx):
    if not ctx.parallel.is_parallel:
        residual = ctx.parallel.residuals["nabla_prime_T"]
        raise NotApplicable(f"canonical torsion is not parallel (|∇'T| = {residual:.2e})")


@check(
    "parallel_torsion_curvature",
    "with ∇'T = 0, R' = R + Q(T(x, y), z, w) + quadratic terms in Q",
    W3,
    chart_tolerance=CHART_TOLERANCE,
)
def _parallel_torsion_curvature(ctx):
    _require_parallel(ctx)
    residuals = ctx.parallel.residuals
    return Measurement(max(residuals["parallel_deformation"], residuals["parallel_curvature"]), _curvatures(ctx))


@check(
    "parallel_torsion_isotropic",
    "a quasi-Kähler structure with parallel canonical torsion is isotropic-Kähler",
    W3,
)
def _parallel_torsion_isotropic(ctx):
    _require_parallel(ctx)
    return _flag(ctx.parallel.isotropic_verdict == VERIFIED)
