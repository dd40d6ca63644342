# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Exception classes for norden_lab."""


class TensorShapeError(ValueError):
    """Raised when tensor operands disagree in dimension, rank or slot
    variance.
    """


class MetricError(ValueError):
    """Raised when a metric is not symmetric, not invertible, numerically
    degenerate or has a signature other than (n, n).
    """


class FundamentalTensorError(ValueError):
    """Raised when a computed F violates the symmetries every Norden structure
    imposes on it. Signals an upstream bug rather than bad input.
    """


class ClassRequirementError(ValueError):
    """Raised when a formula that only holds on quasi-Kähler manifolds is
    applied to an instance outside W3.
    """


class TorsionError(ValueError):
    """Raised when a torsion tensor is not antisymmetric in its first two
    slots.
    """


class GenerationError(RuntimeError):
    """Raised when an instance generator exhausts its search budget."""


class ModelFormatError(ValueError):
    """Raised when a model file cannot be parsed.

    Parameters
    ----------
    message
        Human readable description of the problem
    field
        Dotted path of the offending field, if known
    line
        Line number in the source document, if known
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        if location:
            message = "{} ({})".format(message, ", ".join(location))
        super().__init__(message)


class UnknownCheckError(LookupError):
    """Raised when a requested check id or alias is not registered."""
