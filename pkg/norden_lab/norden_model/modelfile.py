# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Reading and writing model files.

A model file is one JSON document per instance. Indices are 1-based in files
and 0-based everywhere else.

Lie-algebra document::

    {"kind": "lie_algebra", "dim": 4, "metric": [[...]], "J": [[...]],
     "structure_constants": [[i, j, k, value], ...]}

Each ``[i, j, k, value]`` sets C^k_ij = value and C^k_ji = -value.

Chart document::

    {"kind": "chart", "dim": 4, "metric_poly": [[i, j, [[c, [exps]], ...]], ...],
     "J_poly": [...], "point": [...], "fd_step": 1e-05}

``metric_poly`` lists each symmetric pair once; the mirrored entry is filled in
when it is absent. ``name`` and ``notes`` are optional in both kinds.
"""

import json
import math
import os
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ModelFormatError, TensorShapeError
from .polynomial import PolynomialMatrix
from .structure import CHART, LIE_ALGEBRA, FrameModel, LieAlgebraFrame, NordenStructure, PolynomialChart

DEFAULT_FD_STEP = 1e-5


@dataclass(frozen=True, eq=False)
class ModelDocument:
    """A loaded instance: the structure at the frame, the frame, and metadata."""

    structure: NordenStructure
    frame: FrameModel
    name: str = ""
    notes: str = ""

    @property
    def kind(self) -> str:
        return self.frame.kind

    @property
    def dim(self) -> int:
        return self.structure.dim


class _Reader:
    """Field access that reports the field path and source line on failure."""

    def __init__(self, text: str):
        self.text = text

    def line_of(self, field: str) -> Optional[int]:
        key = field.split(".")[0].split("[")[0]
        if not key:
            return None
        match = re.search(r'"{}"\s*:'.format(re.escape(key)), self.text)
        if match is None:
            return None
        return self.text.count("\n", 0, match.start()) + 1

    def fail(self, message: str, field: str):
        raise ModelFormatError(message, field=field, line=self.line_of(field))

    def number(self, value, field: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"expected a number, got {value!r}", field)
        if not math.isfinite(value):
            self.fail("numbers must be finite", field)
        return float(value)

    def index(self, value, dim: int, field: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(f"expected an integer index, got {value!r}", field)
        if not 1 <= value <= dim:
            self.fail(f"index {value} outside 1..{dim}", field)
        return value - 1

    def matrix(self, value, dim: int, field: str) -> np.ndarray:
        if not isinstance(value, list) or len(value) != dim:
            self.fail(f"expected a {dim}x{dim} matrix", field)
        out = np.zeros((dim, dim))
        for i, row in enumerate(value):
            if not isinstance(row, list) or len(row) != dim:
                self.fail(f"row must have {dim} entries", f"{field}[{i}]")
            for j, entry in enumerate(row):
                out[i, j] = self.number(entry, f"{field}[{i}][{j}]")
        return out

    def polynomial(self, value, dim: int, field: str, symmetric: bool) -> PolynomialMatrix:
        if not isinstance(value, list):
            self.fail("expected a list of [i, j, monomials] entries", field)
        entries = {}
        for position, item in enumerate(value):
            where = f"{field}[{position}]"
            if not isinstance(item, list) or len(item) != 3 or not isinstance(item[2], list):
                self.fail("entry must be [i, j, [[coefficient, exponents], ...]]", where)
            row = self.index(item[0], dim, where)
            col = self.index(item[1], dim, where)
            if (row, col) in entries:
                self.fail(f"duplicate entry ({row + 1}, {col + 1})", where)
            terms = []
            for t, term in enumerate(item[2]):
                term_field = f"{where}[2][{t}]"
                if not isinstance(term, list) or len(term) != 2 or not isinstance(term[1], list):
                    self.fail("monomial must be [coefficient, exponents]", term_field)
                if len(term[1]) != dim:
                    self.fail(f"monomial needs {dim} exponents", term_field)
                exponents = []
                for e in term[1]:
                    if isinstance(e, bool) or not isinstance(e, int) or e < 0:
                        self.fail("exponents must be non-negative integers", term_field)
                    exponents.append(e)
                terms.append((self.number(term[0], term_field), exponents))
            entries[(row, col)] = terms
        if symmetric:
            for (row, col), terms in list(entries.items()):
                entries.setdefault((col, row), terms)
        return PolynomialMatrix(dim, entries)


def loads_model(text: str, fd_step: Optional[float] = None) -> ModelDocument:
    """Parses a model document.

    Parameters
    ----------
    text
        JSON text of the document
    fd_step
        Finite-difference step used when a chart document does not give one

    Raises
    ------
    ModelFormatError
        With the offending field path and line when the document is malformed
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelFormatError(f"invalid JSON: {err.msg}", line=err.lineno) from err
    reader = _Reader(text)
    if not isinstance(doc, dict):
        reader.fail("document must be a JSON object", "")
    for required in ("kind", "dim"):
        if required not in doc:
            reader.fail(f"missing field '{required}'", required)
    kind = doc["kind"]
    if kind not in (LIE_ALGEBRA, CHART):
        reader.fail(f"kind must be '{LIE_ALGEBRA}' or '{CHART}', got {kind!r}", "kind")
    dim = doc["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2 or dim % 2:
        reader.fail(f"dim must be an even integer >= 2, got {dim!r}", "dim")

    try:
        if kind == LIE_ALGEBRA:
            for required in ("metric", "J"):
                if required not in doc:
                    reader.fail(f"missing field '{required}'", required)
            metric = reader.matrix(doc["metric"], dim, "metric")
            J = reader.matrix(doc["J"], dim, "J")
            constants = np.zeros((dim, dim, dim))
            entries = doc.get("structure_constants", [])
            if not isinstance(entries, list):
                reader.fail("expected a list of [i, j, k, value]", "structure_constants")
            for position, item in enumerate(entries):
                where = f"structure_constants[{position}]"
                if not isinstance(item, list) or len(item) != 4:
                    reader.fail("entry must be [i, j, k, value]", where)
                i = reader.index(item[0], dim, where)
                j = reader.index(item[1], dim, where)
                k = reader.index(item[2], dim, where)
                if i == j:
                    reader.fail("[e_i, e_i] is always zero", where)
                value = reader.number(item[3], where)
                constants[i, j, k] = value
                constants[j, i, k] = -value
            structure = NordenStructure.from_arrays(metric, J)
            frame = LieAlgebraFrame(constants)
        else:
            for required in ("metric_poly", "J_poly", "point"):
                if required not in doc:
                    reader.fail(f"missing field '{required}'", required)
            metric_poly = reader.polynomial(doc["metric_poly"], dim, "metric_poly", symmetric=True)
            J_poly = reader.polynomial(doc["J_poly"], dim, "J_poly", symmetric=False)
            point = doc["point"]
            if not isinstance(point, list) or len(point) != dim:
                reader.fail(f"point must list {dim} coordinates", "point")
            point = [reader.number(u, f"point[{m}]") for m, u in enumerate(point)]
            step = doc.get("fd_step", fd_step if fd_step is not None else DEFAULT_FD_STEP)
            step = reader.number(step, "fd_step")
            if step <= 0:
                reader.fail("fd_step must be positive", "fd_step")
            frame = PolynomialChart(metric_poly, J_poly, point, step)
            structure = frame.structure()
    except TensorShapeError as err:
        raise ModelFormatError(str(err)) from err

    return ModelDocument(structure, frame, str(doc.get("name", "")), str(doc.get("notes", "")))


def load_model(path, fd_step: Optional[float] = None) -> ModelDocument:
    """Reads a model file from disk; the file stem is the default name."""
    with open(path, encoding="utf-8") as f:
        text = f.read()
    document = loads_model(text, fd_step=fd_step)
    if not document.name:
        stem = os.path.splitext(os.path.basename(str(path)))[0]
        document = ModelDocument(document.structure, document.frame, stem, document.notes)
    return document


def _clean(value: float) -> float:
    # -0.0 and 0.0 must serialize identically
    return float(value) + 0.0


def model_to_document(structure: NordenStructure, frame: FrameModel, name: str = "", notes: str = "") -> dict:
    """Builds the JSON-ready dictionary for an instance."""
    doc = {"kind": frame.kind, "dim": structure.dim}
    if name:
        doc["name"] = name
    if notes:
        doc["notes"] = notes
    if frame.kind == LIE_ALGEBRA:
        doc["metric"] = [[_clean(v) for v in row] for row in structure.g.array]
        doc["J"] = [[_clean(v) for v in row] for row in structure.J.array]
        C = frame.brackets()
        doc["structure_constants"] = [
            [i + 1, j + 1, k + 1, _clean(C[i, j, k])]
            for i in range(frame.dim)
            for j in range(i + 1, frame.dim)
            for k in range(frame.dim)
            if C[i, j, k] != 0.0
        ]
    else:
        doc["metric_poly"] = frame.metric.to_document(symmetric=True)
        doc["J_poly"] = frame.J.to_document()
        doc["point"] = [_clean(u) for u in frame.point]
        doc["fd_step"] = frame.fd_step
    return doc


def dumps_model(structure: NordenStructure, frame: FrameModel, name: str = "", notes: str = "") -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline.

    Equal instances produce byte-identical text.
    """
    return json.dumps(model_to_document(structure, frame, name, notes), indent=2, sort_keys=True) + "\n"


def save_model(path, structure: NordenStructure, frame: FrameModel, name: str = "", notes: str = ""):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_model(structure, frame, name, notes))
