# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Norden structures, their frames, and the model file format."""

from .modelfile import (
    DEFAULT_FD_STEP,
    ModelDocument,
    dumps_model,
    load_model,
    loads_model,
    model_to_document,
    save_model,
)
from .polynomial import PolynomialMatrix
from .structure import (
    CHART,
    LIE_ALGEBRA,
    FrameModel,
    LieAlgebraFrame,
    NordenStructure,
    PolynomialChart,
    ValidationOutcome,
    Violation,
    associated_metric,
    bracket,
    jacobi_tensor,
    signature,
    validate,
)
