# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Where each check's identity comes from in the literature.

Every registered check carries a ``paper_ref`` naming the equation, lemma or
theorem it verifies, and an optional alias tag (``thm_4_4``, ``eq_4_16``)
that ``--checks`` accepts in place of the descriptive id. A tag selects every
check carrying it. Checks that only exercise the toolkit's own machinery are
marked :data:`PLUMBING` and have no tag.
"""

from typing import Dict, Optional, Tuple

PLUMBING = "plumbing"

#: check id -> (alias tag, paper_ref)
REFERENCES: Dict[str, Tuple[Optional[str], str]] = {
    "structure_axioms": ("eq_2_1", "Eq. (2.1)"),
    "metric_signature": ("eq_2_1", "Eq. (2.1), Norden signature (n, n)"),
    "associated_metric": ("sec_1", "Section 1, associated metric"),
    "jacobi_identity": (None, PLUMBING),
    "chart_christoffel": (None, PLUMBING),
    "levi_civita_metric": ("sec_1", "Section 1, Levi-Civita connection"),
    "levi_civita_torsion_free": ("sec_1", "Section 1, Levi-Civita connection"),
    "nabla_J_anticommutes": ("eq_2_2", "Eq. (2.2)"),
    "fundamental_tensor_symmetries": ("eq_2_3", "Eq. (2.3)"),
    "trace_F_jz": ("eq_2_3", "Eqs. (2.1), (2.3)"),
    "class_characterizations": ("eq_2_4", "Eqs. (2.4), (2.7), (2.8)"),
    "nijenhuis_symmetries": ("eq_2_5", "Eqs. (2.5), (2.6)"),
    "nijenhuis_star_vanishes": ("eq_2_7", "Eq. (2.7)"),
    "nijenhuis_nonzero": ("thm_3_3", "Theorem 3.3"),
    "square_norm_forms": ("eq_2_9", "Eqs. (2.9), (2.10)"),
    "square_norm_forms_differ": ("eq_2_9", "Eqs. (2.9), (2.10)"),
    "phi_associated_metric": ("eq_3_10", "Eqs. (3.7), (3.10)"),
    "phi_quasi_kahler_form": ("eq_3_11", "Eq. (3.11)"),
    "canonical_natural": ("eq_3_5", "Eqs. (3.5), (3.6)"),
    "canonical_definitional": ("eq_4_3", "Definition 4.1, Eqs. (4.1)-(4.3)"),
    "canonical_paths_agree": ("prop_4_3", "Proposition 4.3, Eq. (4.7)"),
    "canonical_q_closed_form": ("eq_4_11", "Eq. (4.11)"),
    "canonical_q_identities": ("eq_4_12", "Eqs. (4.12), (4.14)"),
    "canonical_p1_p4_vanish": ("eq_4_2", "Eq. (4.2)"),
    "canonical_torsion_component": ("thm_4_2", "Theorem 4.2"),
    "canonical_torsion_nonzero": ("thm_3_3", "Theorem 3.3"),
    "canonical_torsion_symmetries": ("eq_4_4", "Eqs. (4.4), (4.5)"),
    "canonical_torsion_from_F": ("eq_4_9", "Eq. (4.9)"),
    "F_from_canonical_torsion": ("eq_4_10", "Eq. (4.10)"),
    "canonical_p2_nijenhuis": ("thm_3_1", "Theorem 3.1, Eq. (3.8)"),
    "nijenhuis_phi_form": ("thm_3_1", "Theorem 3.1, Eq. (3.8)"),
    "canonical_p3_phi": ("thm_3_1", "Theorem 3.1, Eq. (3.9)"),
    "torsion_projection_sum": ("eq_3_4", "Eq. (3.4)"),
    "torsion_projection_idempotent": ("eq_3_4", "Eq. (3.4)"),
    "metric_deformation_from_torsion": ("eq_6_2", "Eq. (6.2)"),
    "b_connection_natural": ("sec_7", "Section 7, B-connection"),
    "kt_connection_natural": ("sec_7", "Section 7, KT-connection"),
    "kt_torsion_totally_skew": ("sec_7", "Section 7, KT-connection"),
    "mean_connection": ("prop_7_1", "Section 7, mean connection proposition"),
    "levi_civita_not_natural": (None, PLUMBING),
    "three_term_deformation_not_metric": (None, PLUMBING),
    "levi_civita_curvature_symmetries": ("eq_2_12", "Eqs. (2.11), (2.12)"),
    "canonical_curvature_symmetries": ("eq_2_13", "Eqs. (2.11), (2.13)"),
    "b_kt_curvature_symmetries": ("eq_2_13", "Eqs. (2.11), (2.13)"),
    "deformation_curvature": ("eq_4_16", "Eq. (4.16)"),
    "deformation_ricci": ("eq_4_17", "Eq. (4.17)"),
    "bianchi_torsion_dual_path": ("eq_5_1", "Eq. (5.1)"),
    "kahler_curvature_equivalence": ("lem_5_1", "Lemma 5.1"),
    "kahler_curvature_consequences": ("thm_5_2", "Theorem 5.2, Eq. (5.3)"),
    "scalar_curvature_relation": ("thm_4_4", "Theorem 4.4, Eq. (4.13)"),
    "scalar_curvature_contractions": ("eq_4_18", "Eqs. (4.18), (4.19)"),
    "isotropic_scalar_equivalence": ("cor_4_5", "Corollary 4.5"),
    "parallel_verdicts_coincide": ("prop_6_1", "Proposition 6.1"),
    "natural_deformation_identity": ("lem_6_2", "Lemma 6.2, Eq. (6.4)"),
    "torsion_substitution": ("thm_6_3", "Theorem 6.3, Eq. (6.5)"),
    "parallel_torsion_contractions": ("eq_6_10", "Eqs. (6.10), (6.11)"),
    "parallel_torsion_curvature": ("thm_6_3", "Lemma 6.2, Theorem 6.3"),
    "parallel_torsion_isotropic": ("thm_6_4", "Theorem 6.4"),
}


def reference(check_id: str) -> Tuple[Optional[str], str]:
    """Alias tag and paper_ref of ``check_id``.

    Raises
    ------
    KeyError
        If the check has no recorded reference
    """
    try:
        return REFERENCES[check_id]
    except KeyError:
        raise KeyError(f"check '{check_id}' has no paper reference") from None
