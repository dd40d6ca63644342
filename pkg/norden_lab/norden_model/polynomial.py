# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Matrix fields with multivariate polynomial entries."""

from typing import Dict, Iterable, Tuple

import numpy as np

Monomials = Tuple[np.ndarray, np.ndarray]


class PolynomialMatrix:
    """A square matrix whose entries are polynomials in the chart coordinates.

    Parameters
    ----------
    dim
        Matrix size, equal to the number of coordinates
    entries
        Maps ``(row, col)`` to an iterable of ``(coefficient, exponents)``
        monomials, with ``exponents`` one non-negative integer per coordinate.
        Missing entries are zero.

    Examples
    --------
    >>> field = PolynomialMatrix(2, {(0, 0): [(1.0, [0, 0]), (1.0, [2, 0])], (1, 1): [(-1.0, [0, 0])]})
    >>> field.evaluate([3.0, 0.0]).tolist()
    [[10.0, 0.0], [0.0, -1.0]]
    >>> field.gradient([3.0, 0.0])[0].tolist()
    [[6.0, 0.0], [0.0, 0.0]]
    """

    def __init__(self, dim: int, entries: Dict[Tuple[int, int], Iterable]):
        self.dim = dim
        self.entries: Dict[Tuple[int, int], Monomials] = {}
        for (row, col), monomials in entries.items():
            terms = list(monomials)
            if not terms:
                continue
            coefficients = np.array([float(c) for c, _ in terms])
            exponents = np.array([list(e) for _, e in terms], dtype=np.int64)
            if exponents.shape != (len(terms), dim) or np.any(exponents < 0):
                raise ValueError(f"entry ({row}, {col}) needs {dim} non-negative exponents per term")
            self.entries[(row, col)] = (coefficients, exponents)

    @classmethod
    def constant(cls, matrix) -> "PolynomialMatrix":
        matrix = np.asarray(matrix, dtype=np.float64)
        dim = matrix.shape[0]
        zero = [0] * dim
        return cls(
            dim,
            {
                (i, j): [(matrix[i, j], zero)]
                for i in range(dim)
                for j in range(dim)
                if matrix[i, j] != 0.0
            },
        )

    def evaluate(self, point) -> np.ndarray:
        """Matrix value at ``point``."""
        u = np.asarray(point, dtype=np.float64)
        out = np.zeros((self.dim, self.dim))
        for (row, col), (coefficients, exponents) in self.entries.items():
            out[row, col] = coefficients @ np.prod(u**exponents, axis=1)
        return out

    def gradient(self, point) -> np.ndarray:
        """Exact partial derivatives, ``out[m, i, j] = d(entry[i, j])/du_m``."""
        u = np.asarray(point, dtype=np.float64)
        out = np.zeros((self.dim, self.dim, self.dim))
        for (row, col), (coefficients, exponents) in self.entries.items():
            for m in range(self.dim):
                lowered = exponents.copy()
                lowered[:, m] = np.maximum(lowered[:, m] - 1, 0)
                scale = coefficients * exponents[:, m]
                out[m, row, col] = scale @ np.prod(u**lowered, axis=1)
        return out

    def to_document(self, symmetric: bool = False) -> list:
        """Serializes to ``[[i, j, [[coefficient, exponents], ...]], ...]``
        with 1-based indices; a symmetric field lists only ``i <= j``.
        """
        doc = []
        for (row, col) in sorted(self.entries):
            if symmetric and row > col:
                continue
            coefficients, exponents = self.entries[(row, col)]
            terms = [[float(c), [int(e) for e in exps]] for c, exps in zip(coefficients, exponents)]
            doc.append([row + 1, col + 1, terms])
        return doc
