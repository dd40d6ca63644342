# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Tests for natural connections and torsion decompositions."""

import numpy as np
import pytest

from norden_lab.connections import (
    B_CONNECTION,
    CANONICAL,
    DEFINITIONAL_PATH,
    GENERAL_PATH,
    NOT_QUASI_KAHLER_NOTE,
    QUASI_KAHLER_PATH,
    b_connection,
    canonical_connection,
    canonical_q_identities,
    canonical_q_three_term,
    canonical_torsion_symmetries,
    deform,
    f_from_torsion,
    hayden_q_from_torsion,
    kt_connection,
    mean_connection_residual,
    naturality_check,
    phi_from_associated_metric,
    phi_tensor,
    torsion_from_f,
    torsion_projections,
    total_skew_residual,
)
from norden_lab.errors import ClassRequirementError, TorsionError
from norden_lab.frame_calculus import local_geometry
from norden_lab.tensor_core import DenseTensor, max_norm


def canonical(instance, path=GENERAL_PATH):
    structure, frame = instance
    geometry = local_geometry(structure, frame)
    return canonical_connection(structure, frame, geometry.connection, geometry.nabla_J, path), geometry


def random_torsion(dim, seed):
    raw = np.random.default_rng(seed).standard_normal((dim, dim, dim))
    return DenseTensor.covariant(raw - np.transpose(raw, (1, 0, 2)))


class TestPhi:
    """Difference of the Levi-Civita connections of g~ and g."""

    def test_formula_matches_associated_connection(self, qk6, random4, chart):
        for structure, frame in (qk6, random4, chart):
            geometry = local_geometry(structure, frame)
            direct = phi_from_associated_metric(structure, frame, geometry.connection)
            assert max_norm(phi_tensor(geometry.F, structure) - direct) <= 1e-9 * max(1.0, max_norm(direct))

    def test_flat_is_zero(self, flat4):
        structure, frame = flat4
        assert max_norm(phi_tensor(local_geometry(structure, frame).F, structure)) == 0.0


class TestCanonicalConnection:
    """The natural connection with vanishing p1 and p4."""

    @pytest.mark.parametrize("instance", ["qk4", "qk6", "random4"])
    def test_general_path_is_natural(self, instance, request):
        structure, frame = request.getfixturevalue(instance)
        dc, geometry = canonical((structure, frame))
        assert dc.label == CANONICAL
        check = naturality_check(dc, structure, geometry.F)
        assert check.is_natural, check.residuals

    @pytest.mark.parametrize("instance", ["qk6", "random4"])
    def test_definitional_path_agrees(self, instance, request):
        structure, frame = request.getfixturevalue(instance)
        general, _ = canonical((structure, frame))
        solved, _ = canonical((structure, frame), DEFINITIONAL_PATH)
        assert solved.diagnostics["definitional_system"] <= 1e-9
        assert max_norm(general.Q - solved.Q) <= 1e-9

    def test_quasi_kahler_path_agrees(self, qk4, qk6):
        for instance in (qk4, qk6):
            general, _ = canonical(instance)
            closed, _ = canonical(instance, QUASI_KAHLER_PATH)
            assert max_norm(general.Q - closed.Q) <= 1e-9
            assert max_norm(general.gamma_prime - closed.gamma_prime) <= 1e-9

    def test_quasi_kahler_path_rejects_other_classes(self, random4):
        with pytest.raises(ClassRequirementError):
            canonical(random4, QUASI_KAHLER_PATH)

    def test_unknown_path(self, flat4):
        with pytest.raises(ValueError, match="unknown canonical connection path"):
            canonical(flat4, "shortest")

    def test_flat_is_levi_civita(self, flat4):
        dc, _ = canonical(flat4)
        assert max_norm(dc.Q) == 0.0
        assert max_norm(dc.T) == 0.0

    def test_torsion_is_p2_on_quasi_kahler(self, qk6):
        dc, geometry = canonical(qk6)
        parts = torsion_projections(dc.T, qk6[0])
        assert max_norm(parts.p2 - dc.T) <= 1e-9
        for part in (parts.p1, parts.p3, parts.p4):
            assert max_norm(part) <= 1e-9
        assert max_norm(parts.p2) > 1e-6

    def test_torsion_symmetries(self, qk4, qk6):
        for instance in (qk4, qk6):
            dc, _ = canonical(instance)
            residuals = canonical_torsion_symmetries(dc.T, instance[0])
            assert max(residuals.values()) <= 1e-9

    def test_torsion_and_F_determine_each_other(self, qk4, qk6):
        for structure, frame in (qk4, qk6):
            dc, geometry = canonical((structure, frame))
            assert max_norm(torsion_from_f(geometry.F, structure) - dc.T) <= 1e-9
            assert max_norm(f_from_torsion(dc.T, structure) - geometry.F.F) <= 1e-9

    def test_b_torsion_does_not_reconstruct_F(self, qk6):
        structure, frame = qk6
        geometry = local_geometry(structure, frame)
        b = b_connection(geometry.F, structure, geometry.connection)
        assert max_norm(f_from_torsion(b.T, structure) - geometry.F.F) > 1e-6

    def test_q_identities(self, qk6):
        dc, geometry = canonical(qk6)
        residuals = canonical_q_identities(dc.Q, geometry.F, qk6[0])
        assert max(residuals.values()) <= 1e-9

    def test_q_recovered_from_torsion(self, qk4, qk6):
        for instance in (qk4, qk6):
            dc, _ = canonical(instance)
            assert max_norm(hayden_q_from_torsion(dc.T) - dc.Q) <= 1e-9

    def test_torsion_component_identities(self, qk6):
        dc, geometry = canonical(qk6)
        residuals = naturality_check(dc, qk6[0], geometry.F).residuals
        for key in ("p2_nijenhuis", "nijenhuis_phi", "p3_phi"):
            assert residuals[key] <= 1e-9, key


class TestNamedConnections:
    """B- and KT-connections."""

    def test_natural_on_quasi_kahler(self, qk4, qk6):
        for structure, frame in (qk4, qk6):
            geometry = local_geometry(structure, frame)
            for build in (b_connection, kt_connection):
                dc = build(geometry.F, structure, geometry.connection)
                assert dc.notes == ()
                assert naturality_check(dc, structure, geometry.F).is_natural

    def test_kt_torsion_totally_skew(self, qk4, qk6):
        for structure, frame in (qk4, qk6):
            geometry = local_geometry(structure, frame)
            kt = kt_connection(geometry.F, structure, geometry.connection)
            assert total_skew_residual(kt.T) <= 1e-9
            assert max_norm(kt.T) > 1e-6

    def test_b_is_mean_of_kt_and_canonical(self, qk4, qk6):
        for structure, frame in (qk4, qk6):
            dc, geometry = canonical((structure, frame))
            b = b_connection(geometry.F, structure, geometry.connection)
            kt = kt_connection(geometry.F, structure, geometry.connection)
            assert mean_connection_residual(b, kt, dc) <= 1e-9

    def test_outside_quasi_kahler_carries_note(self, random4):
        structure, frame = random4
        geometry = local_geometry(structure, frame)
        b = b_connection(geometry.F, structure, geometry.connection)
        assert b.label == B_CONNECTION
        assert b.notes == (NOT_QUASI_KAHLER_NOTE,)


class TestNegativeControls:
    """Inputs that must not pass as natural connections."""

    def test_levi_civita_is_not_natural(self, qk6):
        structure, frame = qk6
        geometry = local_geometry(structure, frame)
        zero = deform(geometry.connection, DenseTensor.zeros(6, ("lower",) * 3), structure)
        assert not naturality_check(zero, structure, geometry.F).is_natural

    def test_three_term_deformation_is_not_metric(self, qk6):
        structure, frame = qk6
        geometry = local_geometry(structure, frame)
        Q = canonical_q_three_term(phi_tensor(geometry.F, structure), structure)
        dc = deform(geometry.connection, Q, structure)
        check = naturality_check(dc, structure, geometry.F)
        assert check.residuals["Q_skew"] > 1e-6
        assert not check.is_natural

    def test_non_antisymmetric_torsion_rejected(self, qk6):
        rng = np.random.default_rng(1)
        T = DenseTensor.covariant(rng.standard_normal((6, 6, 6)))
        with pytest.raises(TorsionError, match="not antisymmetric"):
            torsion_projections(T, qk6[0])
        with pytest.raises(TorsionError):
            hayden_q_from_torsion(T)


class TestTorsionProjections:
    """p1 + p2 + p3 + p4 decomposition of arbitrary torsion tensors."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_components_sum_to_torsion(self, seed, qk6):
        T = random_torsion(6, seed)
        parts = torsion_projections(T, qk6[0])
        assert max_norm(parts.total() - T) <= 1e-9 * max(1.0, max_norm(T))

    @pytest.mark.parametrize("seed", [3, 4])
    def test_components_are_idempotent(self, seed, flat4):
        T = random_torsion(4, seed)
        parts = torsion_projections(T, flat4[0])
        assert parts.idempotence_residual() <= 1e-9 * max(1.0, max_norm(T))

    def test_q_from_torsion_is_metric(self):
        T = random_torsion(4, 7)
        Q = hayden_q_from_torsion(T).array
        assert max_norm(Q + np.transpose(Q, (0, 2, 1))) <= 1e-12
        assert max_norm(Q - np.transpose(Q, (1, 0, 2)) - T.array) <= 1e-12
