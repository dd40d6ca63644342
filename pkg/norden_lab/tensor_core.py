# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Dense multi-index tensors over a 2n-dimensional real frame.

Every tensor of the library is a ``DenseTensor``: a float64 component array of
shape ``(dim,) * rank`` plus one variance marker per slot. Arrays are indexed
by frame slot:

* ``g[i, j] = g(e_i, e_j)``
* ``J[a, b] = J^a_b``, so that ``J e_b = J[a, b] e_a``
* a (0, k) tensor takes all-lower slots, ``t[i, j, k] = t(e_i, e_j, e_k)``
* a vector-valued bilinear map ``V`` is stored with variance
  ``(lower, lower, upper)`` and ``V[i, j, k]`` is component k of ``V(e_i, e_j)``

Pairings such as ``g(Jx, y)`` are produced with ``apply_J`` followed by
``contract``, or in one step with ``substitute``.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import MetricError, TensorShapeError

UPPER = "upper"
LOWER = "lower"

#: Absolute residual tolerance of exact identities, scaled by operand size.
IDENTITY_TOLERANCE = 1e-9
#: Threshold below which membership residuals count as zero.
MEMBERSHIP_TOLERANCE = 1e-8

_ARGUMENT_LETTERS = "xyzwuv"


def max_norm(value) -> float:
    """Gets the largest absolute component of a tensor, array or scalar.

    >>> max_norm([[1.0, -3.0], [2.0, 0.5]])
    3.0
    """
    if isinstance(value, DenseTensor):
        value = value.array
    arr = np.asarray(value, dtype=np.float64)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def scaled_tolerance(base: float, *operands) -> float:
    """Scales an absolute tolerance by the max-norm of the operands, never
    shrinking it below ``base``.

    >>> scaled_tolerance(1e-9, [4.0, -8.0])
    8e-09
    >>> scaled_tolerance(1e-9)
    1e-09
    """
    return base * max([1.0] + [max_norm(op) for op in operands])


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """Rank-r component array with per-slot variance markers.

    Parameters
    ----------
    dim
        Dimension 2n of the underlying vector space
    variance
        One of ``"upper"`` or ``"lower"`` per slot
    array
        Components, either already shaped ``(dim,) * rank`` or flat in
        row-major slot order
    """

    dim: int
    variance: Tuple[str, ...]
    array: np.ndarray

    def __post_init__(self):
        if self.dim < 2 or self.dim % 2:
            raise TensorShapeError(f"dim must be even and >= 2, got {self.dim}")
        variance = tuple(self.variance)
        for marker in variance:
            if marker not in (UPPER, LOWER):
                raise TensorShapeError(f"unknown variance marker '{marker}'")
        arr = np.array(self.array, dtype=np.float64)
        if arr.size != self.dim ** len(variance):
            raise TensorShapeError(
                f"components length {arr.size} does not equal dim^rank = "
                f"{self.dim ** len(variance)}"
            )
        arr = arr.reshape((self.dim,) * len(variance))
        arr.setflags(write=False)
        object.__setattr__(self, "variance", variance)
        object.__setattr__(self, "array", arr)

    @classmethod
    def from_components(cls, dim: int, variance: Sequence[str], components) -> "DenseTensor":
        """Builds a tensor from a flat row-major component list."""
        return cls(dim, tuple(variance), np.asarray(components, dtype=np.float64))

    @classmethod
    def covariant(cls, array) -> "DenseTensor":
        """Wraps an all-lower (0, k) component array; ``k`` must be at least 1."""
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim == 0:
            raise TensorShapeError("covariant() needs at least one slot")
        return cls(arr.shape[0], (LOWER,) * arr.ndim, arr)

    @classmethod
    def zeros(cls, dim: int, variance: Sequence[str]) -> "DenseTensor":
        return cls(dim, tuple(variance), np.zeros((dim,) * len(variance)))

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def components(self) -> np.ndarray:
        """Flat row-major view of the components."""
        return self.array.ravel()

    def like(self, array) -> "DenseTensor":
        """Returns a tensor with this tensor's dim and variance."""
        return DenseTensor(self.dim, self.variance, array)

    def max_norm(self) -> float:
        return max_norm(self.array)

    def _check_compatible(self, other):
        if not isinstance(other, DenseTensor):
            return NotImplemented
        if other.dim != self.dim or other.variance != self.variance:
            raise TensorShapeError(
                f"cannot combine tensors of variance {self.variance} and {other.variance} "
                f"in dims {self.dim} and {other.dim}"
            )
        return None

    def __add__(self, other):
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        return self.like(self.array + other.array)

    def __sub__(self, other):
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        return self.like(self.array - other.array)

    def __mul__(self, scalar):
        if isinstance(scalar, DenseTensor):
            return NotImplemented
        return self.like(self.array * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self.like(self.array / float(scalar))

    def __neg__(self):
        return self.like(-self.array)

    def __repr__(self):
        return f"DenseTensor(dim={self.dim}, variance={self.variance})"


def _check_slot(t: DenseTensor, slot: int):
    if not 0 <= slot < t.rank:
        raise TensorShapeError(f"slot {slot} out of range for rank {t.rank}")


def contract(a: DenseTensor, slot_a: int, b: DenseTensor, slot_b: int) -> DenseTensor:
    """Sums one slot of ``a`` against one slot of ``b``.

    The remaining slots of ``a`` come first, followed by the remaining slots
    of ``b``.

    Raises
    ------
    TensorShapeError
        If the dims differ or both slots have the same variance
    """
    if a.dim != b.dim:
        raise TensorShapeError(f"dimension mismatch: {a.dim} != {b.dim}")
    _check_slot(a, slot_a)
    _check_slot(b, slot_b)
    if a.variance[slot_a] == b.variance[slot_b]:
        raise TensorShapeError("contraction requires opposite variance")
    arr = np.tensordot(a.array, b.array, axes=([slot_a], [slot_b]))
    variance = (
        a.variance[:slot_a] + a.variance[slot_a + 1 :] + b.variance[:slot_b] + b.variance[slot_b + 1 :]
    )
    return DenseTensor(a.dim, variance, arr)


def inverse_metric(metric) -> np.ndarray:
    """Inverts a metric component matrix.

    Raises
    ------
    MetricError
        If the matrix is singular to working precision
    """
    arr = metric.array if isinstance(metric, DenseTensor) else np.asarray(metric, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise TensorShapeError("a metric must be a square rank-2 array")
    cond = np.linalg.cond(arr)
    if not np.isfinite(cond) or cond > 1e12:
        raise MetricError("metric not invertible")
    return np.linalg.inv(arr)


def raise_lower(t: DenseTensor, slot: int, metric: DenseTensor, direction: str) -> DenseTensor:
    """Flips the variance of one slot with a metric.

    Parameters
    ----------
    t
        Tensor to transform
    slot
        Slot whose variance flips
    metric
        Symmetric nondegenerate rank-2 lower tensor
    direction
        ``"raise"`` or ``"lower"``
    """
    _check_slot(t, slot)
    if metric.rank != 2 or metric.variance != (LOWER, LOWER) or metric.dim != t.dim:
        raise TensorShapeError("metric must be a rank-2 lower tensor of matching dim")
    if max_norm(metric.array - metric.array.T) > scaled_tolerance(IDENTITY_TOLERANCE, metric):
        raise MetricError("metric not symmetric")
    if direction == "lower":
        if t.variance[slot] != UPPER:
            raise TensorShapeError(f"slot {slot} is already lower")
        matrix = metric.array
        marker = LOWER
    elif direction == "raise":
        if t.variance[slot] != LOWER:
            raise TensorShapeError(f"slot {slot} is already upper")
        matrix = inverse_metric(metric)
        marker = UPPER
    else:
        raise ValueError(f"direction must be 'raise' or 'lower', got '{direction}'")
    arr = np.moveaxis(np.tensordot(t.array, matrix, axes=([slot], [0])), -1, slot)
    variance = t.variance[:slot] + (marker,) + t.variance[slot + 1 :]
    return DenseTensor(t.dim, variance, arr)


def _precompose(arr: np.ndarray, slot: int, J: np.ndarray) -> np.ndarray:
    # t'[..b..] = t[..a..] J[a, b]
    return np.moveaxis(np.tensordot(arr, J, axes=([slot], [0])), -1, slot)


def apply_J(t: DenseTensor, slot: int, J: DenseTensor) -> DenseTensor:
    """Substitutes J into one slot.

    A lower slot has its argument precomposed with J, so ``t(.., x, ..)``
    becomes ``t(.., Jx, ..)``. An upper slot has its value postcomposed with J.
    Applying twice to the same slot negates the tensor.
    """
    _check_slot(t, slot)
    if J.variance != (UPPER, LOWER) or J.dim != t.dim:
        raise TensorShapeError("J must be a (1,1) tensor of matching dim")
    if t.variance[slot] == LOWER:
        arr = _precompose(t.array, slot, J.array)
    else:
        arr = np.moveaxis(np.tensordot(J.array, t.array, axes=([1], [slot])), 0, slot)
    return t.like(arr)


def substitute_array(arr, pattern: str, J=None) -> np.ndarray:
    """Array form of ``substitute`` acting on the trailing slots.

    Leading axes are carried along untouched, so a stack of tensors with
    shape ``(batch, dim, dim, dim)`` is substituted slot by slot in one call.
    """
    arr = np.asarray(arr, dtype=np.float64)
    args = [arg.strip() for arg in pattern.split(",")]
    if len(args) > arr.ndim:
        raise TensorShapeError(f"pattern '{pattern}' has more arguments than slots")
    offset = arr.ndim - len(args)
    letters = []
    for slot, arg in enumerate(args):
        letter = arg.replace("J", "")
        if len(letter) != 1 or letter not in _ARGUMENT_LETTERS:
            raise TensorShapeError(f"bad argument '{arg}' in pattern '{pattern}'")
        for _ in range(arg.count("J")):
            if J is None:
                raise TensorShapeError(f"pattern '{pattern}' needs J")
            arr = _precompose(arr, offset + slot, J)
        letters.append(letter)
    if len(set(letters)) != len(letters):
        raise TensorShapeError(f"repeated argument in pattern '{pattern}'")
    target = "".join(sorted(letters, key=_ARGUMENT_LETTERS.index))
    return np.einsum("...{}->...{}".format("".join(letters), target), arr)


def substitute(t: DenseTensor, pattern: str, J: DenseTensor = None) -> DenseTensor:
    """Evaluates a (0, k) tensor on permuted and J-substituted arguments.

    ``pattern`` lists one argument per slot, for example ``"Jz,x,y"``. The
    result is indexed by the argument letters in the order ``x, y, z, w``,
    so ``substitute(F, "Jz,x,y", J)[i, j, k] = F(J e_k, e_i, e_j)``.
    """
    if any(marker != LOWER for marker in t.variance):
        raise TensorShapeError("substitute needs an all-lower tensor")
    if len(pattern.split(",")) != t.rank:
        raise TensorShapeError(f"pattern '{pattern}' does not match rank {t.rank}")
    return t.like(substitute_array(t.array, pattern, None if J is None else J.array))


def cyclic_sum(t: DenseTensor, J: DenseTensor = None, first: str = "x") -> DenseTensor:
    """Cyclic sum over the first three arguments.

    ``first`` may carry a J, so ``cyclic_sum(F, J, "Jx")`` is the tensor
    ``F(Jx, y, z) + F(Jy, z, x) + F(Jz, x, y)``.
    """
    if t.rank < 3:
        raise TensorShapeError("cyclic sum needs rank >= 3")
    prefix = first.replace("x", "")
    rest = list(_ARGUMENT_LETTERS[3 : t.rank])
    total = None
    for rotation in ("xyz", "yzx", "zxy"):
        args = [prefix + rotation[0], rotation[1], rotation[2]] + rest
        term = substitute(t, ",".join(args), J)
        total = term if total is None else total + term
    return total
