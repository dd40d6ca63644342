# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.
"""Tests for dense tensors and their index operations."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from norden_lab.errors import MetricError, TensorShapeError
from norden_lab.instance_forge import standard_structure
from norden_lab.tensor_core import (
    LOWER,
    UPPER,
    DenseTensor,
    apply_J,
    contract,
    cyclic_sum,
    inverse_metric,
    max_norm,
    raise_lower,
    scaled_tolerance,
    substitute,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_tensor(rng, dim, variance):
    return DenseTensor(dim, variance, rng.standard_normal((dim,) * len(variance)))


class TestDenseTensor:
    """Construction and arithmetic of DenseTensor."""

    def test_flat_components_are_reshaped(self):
        t = DenseTensor.from_components(2, (LOWER, LOWER), [1, 2, 3, 4])
        assert t.array.shape == (2, 2)
        assert t.array[1, 0] == 3.0
        assert t.rank == 2
        assert t.components.tolist() == [1.0, 2.0, 3.0, 4.0]

    def test_wrong_length_rejected(self):
        with pytest.raises(TensorShapeError, match="does not equal dim"):
            DenseTensor.from_components(4, (LOWER, LOWER), np.zeros(15))

    def test_odd_dim_rejected(self):
        with pytest.raises(TensorShapeError):
            DenseTensor(3, (LOWER,), np.zeros(3))

    def test_unknown_variance_rejected(self):
        with pytest.raises(TensorShapeError, match="variance marker"):
            DenseTensor(2, ("sideways",), np.zeros(2))

    def test_array_is_read_only(self):
        t = DenseTensor.zeros(2, (LOWER,))
        with pytest.raises(ValueError):
            t.array[0] = 1.0

    def test_arithmetic_keeps_variance(self):
        a = DenseTensor.covariant(np.ones((2, 2)))
        b = DenseTensor.covariant(np.eye(2))
        assert (a - b).variance == (LOWER, LOWER)
        assert max_norm(2 * a - (a + a)) == 0.0
        assert max_norm(-a / 2 + 0.5 * a) == 0.0

    def test_mismatched_variance_rejected(self):
        a = DenseTensor(2, (UPPER, LOWER), np.eye(2))
        b = DenseTensor.covariant(np.eye(2))
        with pytest.raises(TensorShapeError):
            _ = a + b


class TestContract:
    """contract() against a loop summation written independently."""

    @settings(deadline=None, max_examples=25)
    @given(seed=seeds)
    def test_rank3_with_rank1_matches_loops(self, seed):
        rng = np.random.default_rng(seed)
        a = random_tensor(rng, 4, (LOWER, UPPER, LOWER))
        b = random_tensor(rng, 4, (LOWER,))
        out = contract(a, 1, b, 0)
        expected = np.zeros((4, 4))
        for i, k in itertools.product(range(4), repeat=2):
            for j in range(4):
                expected[i, k] += a.array[i, j, k] * b.array[j]
        assert out.variance == (LOWER, LOWER)
        assert max_norm(out.array - expected) <= 1e-12

    def test_same_variance_rejected(self):
        a = DenseTensor.covariant(np.eye(4))
        with pytest.raises(TensorShapeError, match="opposite variance"):
            contract(a, 0, a, 1)

    def test_dimension_mismatch_rejected(self):
        a = DenseTensor(2, (UPPER,), np.ones(2))
        b = DenseTensor.covariant(np.ones(4))
        with pytest.raises(TensorShapeError, match="dimension mismatch"):
            contract(a, 0, b, 0)


class TestRaiseLower:
    """Index gymnastics with an indefinite metric."""

    @settings(deadline=None, max_examples=20)
    @given(seed=seeds)
    def test_lowering_matches_loops(self, seed):
        rng = np.random.default_rng(seed)
        g = standard_structure(3).g
        t = random_tensor(rng, 6, (UPPER, LOWER))
        out = raise_lower(t, 0, g, "lower")
        expected = np.zeros((6, 6))
        for i, j in itertools.product(range(6), repeat=2):
            expected[i, j] = sum(g.array[i, k] * t.array[k, j] for k in range(6))
        assert max_norm(out.array - expected) <= 1e-12

    def test_raise_then_lower_is_identity(self):
        rng = np.random.default_rng(5)
        g = standard_structure(2).g
        t = random_tensor(rng, 4, (LOWER, LOWER, LOWER))
        back = raise_lower(raise_lower(t, 2, g, "raise"), 2, g, "lower")
        assert max_norm(back - t) <= 1e-12

    def test_already_lower_rejected(self):
        g = standard_structure(1).g
        with pytest.raises(TensorShapeError, match="already lower"):
            raise_lower(g, 0, g, "lower")

    def test_singular_metric_rejected(self):
        with pytest.raises(MetricError, match="not invertible"):
            inverse_metric(np.diag([1.0, 0.0]))

    def test_asymmetric_metric_rejected(self):
        metric = DenseTensor.covariant([[1.0, 1.0], [0.0, -1.0]])
        t = DenseTensor(2, (LOWER,), [1.0, 0.0])
        with pytest.raises(MetricError, match="not symmetric"):
            raise_lower(t, 0, metric, "raise")


class TestSubstitution:
    """apply_J, substitute and cyclic_sum."""

    def test_apply_J_twice_negates(self):
        rng = np.random.default_rng(2)
        J = standard_structure(2).J
        for variance in ((LOWER, LOWER, LOWER), (LOWER, LOWER, UPPER)):
            t = random_tensor(rng, 4, variance)
            twice = apply_J(apply_J(t, 2, J), 2, J)
            assert max_norm(twice + t) <= 1e-12

    def test_substitute_reads_argument_letters(self):
        rng = np.random.default_rng(3)
        J = standard_structure(2).J
        F = random_tensor(rng, 4, (LOWER, LOWER, LOWER))
        out = substitute(F, "Jz,x,y", J)
        JF = np.einsum("ab,ajk->bjk", J.array, F.array)
        for i, j, k in itertools.product(range(4), repeat=3):
            assert out.array[i, j, k] == pytest.approx(JF[k, i, j], abs=1e-12)

    def test_pattern_must_match_rank(self):
        F = DenseTensor.zeros(2, (LOWER, LOWER, LOWER))
        with pytest.raises(TensorShapeError):
            substitute(F, "x,y", None)
        with pytest.raises(TensorShapeError, match="repeated argument"):
            substitute(F, "x,x,y", None)

    def test_substitute_needs_J(self):
        F = DenseTensor.zeros(2, (LOWER, LOWER, LOWER))
        with pytest.raises(TensorShapeError, match="needs J"):
            substitute(F, "Jx,y,z")

    def test_cyclic_sum_of_totally_skew_tensor(self):
        rng = np.random.default_rng(4)
        raw = rng.standard_normal((4, 4, 4))
        skew = sum(
            np.sign(np.linalg.det(np.eye(3)[list(p)])) * np.transpose(raw, p)
            for p in itertools.permutations(range(3))
        )
        t = DenseTensor.covariant(skew)
        assert max_norm(cyclic_sum(t) - 3 * t) <= 1e-12

    def test_scaled_tolerance_never_shrinks(self):
        assert scaled_tolerance(1e-9, [1e-3]) == 1e-9
        assert scaled_tolerance(1e-9, [10.0]) == pytest.approx(1e-8)
