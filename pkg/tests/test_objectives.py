"""Benchmark objective values and vectorized population evaluation."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from noisymoea import (
    ConfigError,
    ObjectiveId,
    evaluate_population,
    evaluate_true,
    leading_ones,
    objective_meta,
    trailing_zeros,
)

bitlists = st.lists(st.integers(0, 1), min_size=1, max_size=40)


def test_objective_id_parse():
    assert ObjectiveId.parse("lotz") is ObjectiveId.LOTZ
    assert ObjectiveId.parse("omm") is ObjectiveId.OMM
    assert ObjectiveId.parse(ObjectiveId.LOTZ) is ObjectiveId.LOTZ
    with pytest.raises(ConfigError):
        ObjectiveId.parse("zdt1")


class TestScalarHelpers:
    def test_leading_ones_examples(self):
        assert leading_ones([1, 1, 0, 1]) == 2
        assert leading_ones([0, 1, 1, 1]) == 0
        assert leading_ones([1, 1, 1]) == 3

    def test_trailing_zeros_examples(self):
        assert trailing_zeros([1, 1, 0, 0]) == 2
        assert trailing_zeros([0, 0, 1]) == 0
        assert trailing_zeros([0, 0, 0]) == 3

    @given(bitlists)
    def test_prefix_suffix_consistency(self, bits):
        lo = leading_ones(bits)
        tz = trailing_zeros(bits)
        assert all(b == 1 for b in bits[:lo])
        assert lo == len(bits) or bits[lo] == 0
        assert all(b == 0 for b in bits[len(bits) - tz:])
        assert tz == len(bits) or bits[len(bits) - tz - 1] == 1


class TestEvaluateTrue:
    def test_lotz_examples(self):
        assert evaluate_true(ObjectiveId.LOTZ, [1, 1, 0, 0]) == (2, 2)
        assert evaluate_true(ObjectiveId.LOTZ, [1, 1, 1, 1]) == (4, 0)
        assert evaluate_true(ObjectiveId.LOTZ, [0, 1, 1, 0]) == (0, 1)

    def test_omm_examples(self):
        assert evaluate_true(ObjectiveId.OMM, [1, 0, 1, 0]) == (2, 2)
        assert evaluate_true(ObjectiveId.OMM, [1, 1, 1]) == (3, 0)

    @given(bitlists)
    def test_lotz_range_and_sum(self, bits):
        f1, f2 = evaluate_true(ObjectiveId.LOTZ, bits)
        n = len(bits)
        assert 0 <= f1 <= n and 0 <= f2 <= n
        # the ones-prefix and zeros-suffix occupy disjoint positions
        assert f1 + f2 <= n

    @given(bitlists)
    def test_omm_sum_is_n(self, bits):
        f1, f2 = evaluate_true(ObjectiveId.OMM, bits)
        assert f1 + f2 == len(bits)
        assert f1 == sum(bits)


class TestEvaluatePopulation:
    @pytest.mark.parametrize("objective", [ObjectiveId.LOTZ, ObjectiveId.OMM])
    def test_matches_scalar_path(self, objective):
        rng = np.random.default_rng(5)
        genos = (rng.random((64, 17)) < 0.5).astype(np.uint8)
        batch = evaluate_population(objective, genos)
        for row, f in zip(genos, batch):
            assert tuple(f) == evaluate_true(objective, row)

    def test_shape_and_dtype(self):
        genos = np.zeros((3, 6), dtype=np.uint8)
        out = evaluate_population(ObjectiveId.LOTZ, genos)
        assert out.shape == (3, 2)
        assert np.issubdtype(out.dtype, np.integer)


def test_objective_meta_fields():
    meta = objective_meta(ObjectiveId.LOTZ, 12)
    assert (meta.f_min, meta.f_max) == (0, 12)
    assert meta.pareto_front_size == 13
