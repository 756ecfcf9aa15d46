"""Exhaustive enumeration oracle."""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bootperc.analytic import RateParams, exact_traverse_prob
from bootperc.lattice import Configuration, Model, Rect, closure
from bootperc.oracle import (BudgetError, Property, binomial_bounds_ok, config_to_mask,
                             exact_I, exact_span_polynomial, exact_traverse_enum, mask_to_config,
                             report_json, search_forced_overlap, verify_exhaustive)


def brute_counts(m, n, model):
    r = Rect.from_dims(m, n)
    counts = [0] * (m * n + 1)
    for mask in range(1 << (m * n)):
        c = mask_to_config(mask, m, n)
        if closure(c, model).is_full():
            counts[c.count()] += 1
    return counts


class TestMasks:
    @given(st.integers(1, 4), st.integers(1, 4), st.data())
    def test_round_trip(self, m, n, data):
        mask = data.draw(st.integers(0, (1 << (m * n)) - 1))
        assert config_to_mask(mask_to_config(mask, m, n)) == mask

    def test_bit_layout(self):
        c = mask_to_config(1 << (1 + 3 * 1), 3, 2)
        assert c.occupied == {(2, 2)}


class TestPolynomial:
    def test_single_site(self):
        assert exact_span_polynomial(1, 1).coeffs == (0, 1)

    def test_two_by_two(self):
        poly = exact_span_polynomial(2, 2)
        assert poly.coeffs == (0, 0, 2, 4, 1)
        assert poly(0.5) == pytest.approx(0.4375, abs=1e-15)

    @pytest.mark.parametrize("model", list(Model))
    @pytest.mark.parametrize("dims", [(2, 3), (3, 3), (1, 4), (3, 4)])
    def test_matches_brute_force(self, dims, model):
        assert list(exact_span_polynomial(*dims, model).coeffs) == brute_counts(*dims, model)

    @pytest.mark.parametrize("dims", [(2, 3), (3, 4), (2, 5)])
    def test_transpose(self, dims):
        a = exact_span_polynomial(*dims)
        b = exact_span_polynomial(dims[1], dims[0])
        assert a.coeffs == b.coeffs

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3), (3, 4)])
    def test_modified_below_standard(self, dims):
        std = exact_span_polynomial(*dims, Model.STANDARD).coeffs
        mod = exact_span_polynomial(*dims, Model.MODIFIED).coeffs
        assert all(a <= b for a, b in zip(mod, std))

    def test_modified_strictly_smaller(self):
        std = exact_span_polynomial(3, 3, Model.STANDARD).coeffs
        mod = exact_span_polynomial(3, 3, Model.MODIFIED).coeffs
        assert (std[3], mod[3]) == (14, 6)

    def test_endpoints_and_derivative(self):
        poly = exact_span_polynomial(3, 3)
        assert poly(0.0) == 0.0 and poly(1.0) == pytest.approx(1.0)
        assert all(poly.derivative(p) >= 0 for p in np.linspace(0, 1, 21))
        h = 1e-6
        assert poly.derivative(0.4) == pytest.approx((poly(0.4 + h) - poly(0.4 - h)) / (2 * h), rel=1e-6)

    def test_binomial_bounds(self):
        assert binomial_bounds_ok(exact_span_polynomial(3, 4))

    def test_workers_agree(self):
        assert exact_span_polynomial(4, 4, workers=1) == exact_span_polynomial(4, 4, workers=2)

    def test_budget(self):
        with pytest.raises(BudgetError):
            exact_span_polynomial(5, 5)
        with pytest.raises(ValueError):
            exact_span_polynomial(0, 3)

    def test_exact_I_range(self):
        with pytest.raises(ValueError):
            exact_I(2, 2, 1.5)
        assert exact_I(2, 2, 0.5) == pytest.approx(0.4375)


class TestTraverse:
    @pytest.mark.parametrize("direction", ["horizontal", "east", "vertical", "north"])
    @pytest.mark.parametrize("dims", [(1, 1), (3, 2), (5, 3), (4, 4)])
    def test_matches_recursion(self, dims, direction):
        for p in (0.1, 0.5, 0.8):
            enum = exact_traverse_enum(*dims, p, direction)
            if direction in ("vertical", "north"):
                rec = exact_traverse_prob(dims[1], dims[0], RateParams(p),
                                          "horizontal" if direction == "vertical" else "east")
            else:
                rec = exact_traverse_prob(*dims, RateParams(p), direction)
            assert enum == pytest.approx(rec, rel=1e-12)


class TestVerify:
    def test_traversal_of_spanned(self):
        rep = verify_exhaustive(Property.LEMMA4_I, 3, 3)
        assert rep["spanned"] == 312 and rep["counterexamples"] == []
        assert rep["configurations_checked"] == 512

    @pytest.mark.parametrize("model", list(Model))
    def test_disjoint_pairs(self, model):
        rep = verify_exhaustive("prop30", 2, 4, model)
        assert rep["counterexamples"] == []

    def test_intermediate(self):
        rep = verify_exhaustive(Property.LEMMA24, 1, 5, k=2)
        assert rep["counterexamples"] == [] and rep["k"] == 2

    def test_intermediate_needs_k(self):
        with pytest.raises(ValueError):
            verify_exhaustive(Property.LEMMA24, 3, 3)
        with pytest.raises(ValueError):
            verify_exhaustive(Property.LEMMA24, 3, 3, k=2)

    def test_span_dims(self):
        assert verify_exhaustive(Property.SPAN_DIMS, 3, 3, Model.MODIFIED)["counterexamples"] == []

    def test_report_json(self):
        rep = verify_exhaustive(Property.LEMMA4_I, 2, 2)
        assert json.loads(report_json(rep)) == rep

    def test_budget(self):
        with pytest.raises(BudgetError):
            verify_exhaustive(Property.PROP30, 5, 5)


class TestPairSearch:
    @pytest.mark.parametrize("model", list(Model))
    def test_three_by_three(self, model):
        res = search_forced_overlap(3, 3, model)
        assert res.missing == ()
        assert res.spanned == sum(exact_span_polynomial(3, 3, model).coeffs)
        assert json.loads(json.dumps(res.to_dict()))["dims"] == [3, 3]

    def test_budget(self):
        with pytest.raises(BudgetError):
            search_forced_overlap(5, 5)
        with pytest.raises(ValueError):
            search_forced_overlap(1, 1)

    def test_forced_overlap_masks_span(self):
        res = search_forced_overlap(3, 4)
        for mask in res.forced_overlap:
            assert closure(mask_to_config(mask, 3, 4)).is_full()
