# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Lazily computed geometry shared by the checks of one instance."""

from functools import cached_property

from ..connections import (
    DEFINITIONAL_PATH,
    GENERAL_PATH,
    QUASI_KAHLER_PATH,
    b_connection,
    canonical_connection,
    kt_connection,
    naturality_check,
    phi_from_associated_metric,
    phi_tensor,
)
from ..curvature_lab import bianchi_torsion_residual, curvature, parallel_torsion_check, scalar_relation_check
from ..frame_calculus import class_membership, local_geometry
from ..norden_model import CHART, FrameModel, NordenStructure


class InstanceContext:
    """Connections, curvatures and class flags of one structure in one frame.

    Each quantity is computed on first use, so a run restricted to a few
    checks only pays for what those checks read.
    """

    def __init__(self, structure: NordenStructure, frame: FrameModel):
        self.structure = structure
        self.frame = frame

    @property
    def is_chart(self) -> bool:
        return self.frame.kind == CHART

    @cached_property
    def geometry(self):
        return local_geometry(self.structure, self.frame)

    @property
    def F(self):
        return self.geometry.F

    @cached_property
    def flags(self):
        return class_membership(self.F, self.structure, self.geometry.nabla_J)

    @property
    def is_quasi_kahler(self) -> bool:
        return self.flags.is_quasi_kahler

    @property
    def is_kahler(self) -> bool:
        return self.flags.is_kahler

    def _canonical(self, path):
        geometry = self.geometry
        return canonical_connection(self.structure, self.frame, geometry.connection, geometry.nabla_J, path)

    @cached_property
    def canonical(self):
        return self._canonical(GENERAL_PATH)

    @cached_property
    def canonical_quasi_kahler(self):
        return self._canonical(QUASI_KAHLER_PATH)

    @cached_property
    def canonical_definitional(self):
        return self._canonical(DEFINITIONAL_PATH)

    @cached_property
    def b(self):
        return b_connection(self.F, self.structure, self.geometry.connection)

    @cached_property
    def kt(self):
        return kt_connection(self.F, self.structure, self.geometry.connection)

    @cached_property
    def phi(self):
        return phi_tensor(self.F, self.structure)

    @cached_property
    def phi_associated(self):
        return phi_from_associated_metric(self.structure, self.frame, self.geometry.connection)

    @cached_property
    def naturality(self):
        return naturality_check(self.canonical, self.structure, self.F)

    @cached_property
    def base_curvature(self):
        return curvature(self.geometry.connection, self.structure, self.frame)

    @cached_property
    def canonical_curvature(self):
        return curvature(self.canonical, self.structure, self.frame)

    @cached_property
    def b_curvature(self):
        return curvature(self.b, self.structure, self.frame)

    @cached_property
    def kt_curvature(self):
        return curvature(self.kt, self.structure, self.frame)

    @cached_property
    def bianchi(self):
        return bianchi_torsion_residual(self.canonical, self.structure, self.frame, self.canonical_curvature)

    @cached_property
    def scalar(self):
        return scalar_relation_check(
            self.structure,
            self.frame,
            self.canonical,
            self.geometry,
            self.base_curvature,
            self.canonical_curvature,
        )

    @cached_property
    def parallel(self):
        return parallel_torsion_check(
            self.canonical,
            self.structure,
            self.frame,
            self.geometry,
            self.base_curvature,
            self.canonical_curvature,
        )
