"""Coefficient masks, difference polynomials, and index sets."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coslab import (
    CoeffMask,
    DiffPoly,
    IndexSet,
    dirichlet_eval,
    eval_f,
    eval_f_deriv,
    eval_g,
    eval_g_deriv,
    to_index_set,
)
from coslab.errors import ParameterError

bit_lists = st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=40)


class TestCoeffMask:
    def test_degree_and_weight(self):
        mask = CoeffMask((1, 0, 1, 1))
        assert mask.m == 3
        assert mask.t == 3

    def test_empty_mask_is_the_zero_polynomial(self):
        mask = CoeffMask(())
        assert mask.m == -1
        assert mask.t == 0
        assert float(eval_g(mask, np.array([1.3]))[0]) == 0.0

    def test_rejects_non_binary_bits(self):
        with pytest.raises(ParameterError):
            CoeffMask((0, 2, 1))

    @given(bits=bit_lists)
    @settings(max_examples=50, deadline=None)
    def test_weight_never_exceeds_length(self, bits):
        mask = CoeffMask(tuple(bits))
        assert 0 <= mask.t <= mask.m + 1


class TestEvaluation:
    def test_eval_g_matches_direct_sum(self):
        mask = CoeffMask((1, 1, 0, 1, 0, 0, 1))
        xs = np.linspace(0.1, 6.1, 37)
        want = sum(b * np.cos(k * xs) for k, b in enumerate(mask.bits))
        np.testing.assert_allclose(eval_g(mask, xs), want, atol=1e-13)

    def test_eval_g_deriv_matches_central_difference(self):
        mask = CoeffMask((0, 1, 1, 0, 1))
        xs = np.linspace(0.4, 5.5, 13)
        h = 1e-6
        want = (eval_g(mask, xs + h) - eval_g(mask, xs - h)) / (2 * h)
        np.testing.assert_allclose(eval_g_deriv(mask, 1, xs), want, atol=1e-6)

    def test_eval_f_is_kernel_minus_g(self):
        f = DiffPoly(9, CoeffMask((1, 0, 1)))
        xs = np.linspace(0.2, 6.0, 29)
        want = dirichlet_eval(9, xs) - eval_g(f.mask, xs)
        np.testing.assert_allclose(eval_f(f, xs), want, atol=1e-12)

    def test_eval_f_deriv_order_zero(self):
        f = DiffPoly(6, CoeffMask((0, 1)))
        xs = np.linspace(0.3, 2.9, 11)
        np.testing.assert_allclose(eval_f_deriv(f, 0, xs), eval_f(f, xs), atol=1e-12)

    @given(
        bits=bit_lists,
        x=st.floats(min_value=1e-4, max_value=2 * math.pi - 1e-4),
    )
    @settings(max_examples=50, deadline=None)
    def test_g_bounded_by_weight(self, bits, x):
        mask = CoeffMask(tuple(bits))
        assert abs(float(eval_g(mask, np.array([x]))[0])) <= mask.t + 1e-12


class TestDiffPoly:
    def test_rejects_mask_degree_above_n(self):
        with pytest.raises(ParameterError):
            DiffPoly(4, CoeffMask((1, 0, 0, 0, 0, 1)))

    def test_rejects_negative_degree(self):
        with pytest.raises(ParameterError):
            DiffPoly(-1, CoeffMask((1,)))

    def test_half_integer_frequency(self):
        assert DiffPoly(7, CoeffMask((1,))).T == 7.5


class TestIndexSet:
    def test_rejects_unsorted(self):
        with pytest.raises(ParameterError):
            IndexSet((3, 1, 2))

    def test_rejects_negative(self):
        with pytest.raises(ParameterError):
            IndexSet((-1, 2))

    def test_round_trip_evaluation(self):
        # f = D_n - g equals the cosine sum over the complementary index set.
        f = DiffPoly(8, CoeffMask((1, 0, 0, 1, 1)))
        idx = to_index_set(f)
        assert idx.a == (1, 2, 5, 6, 7, 8)
        xs = np.linspace(0.15, 6.1, 41)
        direct = sum(np.cos(a * xs) for a in idx.a)
        np.testing.assert_allclose(eval_f(f, xs), direct, atol=1e-12)

    def test_serialization(self):
        idx = IndexSet((0, 2, 5))
        assert idx.to_lines() == "0\n2\n5\n"
        assert idx.to_json() == "[0, 2, 5]"
        assert len(idx) == 3
