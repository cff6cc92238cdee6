"""Closed-form kernel: single-queue formulas and the rewriting identities."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parq import mm1
from parq.errors import SaturationError


class TestMM1Residence:
    def test_half_load_doubles_service_time(self):
        assert mm1.mm1_residence(2.0, 0.25) == pytest.approx(0.5)

    def test_zero_rate_gives_bare_service_time(self):
        assert mm1.mm1_residence(0.0, 0.7) == 0.7

    def test_listing_configuration(self):
        # lambda/m = 0.5 against S = 0.25 puts each queue at 1/8 load
        assert mm1.mm1_residence(0.5, 0.25) == pytest.approx(0.2857142857142857)

    def test_saturated_queue_is_rejected(self):
        with pytest.raises(SaturationError) as err:
            mm1.mm1_residence(4.0, 0.25)
        assert err.value.utilization == 1.0

    def test_saturation_names_the_node(self):
        with pytest.raises(SaturationError, match="Q7"):
            mm1.mm1_residence(5.0, 0.25, node="Q7")

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            mm1.mm1_residence(-1.0, 0.25)

    def test_nonpositive_service_rejected(self):
        with pytest.raises(ValueError):
            mm1.mm1_residence(1.0, 0.0)


class TestUtilization:
    def test_simple_product(self):
        assert mm1.utilization(0.5, 0.25) == 0.125

    def test_values_at_or_above_one_are_legal(self):
        assert mm1.utilization(8.0, 0.25) == 2.0


class TestQueueLength:
    def test_eighth_load(self):
        assert mm1.queue_length(0.125) == pytest.approx(0.14285714285714285)

    def test_saturation_rejected(self):
        with pytest.raises(SaturationError):
            mm1.queue_length(1.0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            mm1.queue_length(-0.1)


class TestParallelSerialIdentity:
    def test_paper_configuration(self):
        r_para = mm1.parallel_array_residence(2.0, 0.25, 4)
        r_serial = mm1.tandem_residence(2.0, 0.25, 4)
        assert r_para == pytest.approx(0.2857142857142857, rel=1e-15)
        assert r_serial == pytest.approx(0.2857142857142857, rel=1e-15)

    def test_m_equal_one_is_a_plain_queue(self):
        assert mm1.parallel_array_residence(2.0, 0.25, 1) == \
            mm1.mm1_residence(2.0, 0.25)
        assert mm1.tandem_residence(2.0, 0.25, 1) == \
            mm1.mm1_residence(2.0, 0.25)

    @settings(max_examples=300, deadline=None)
    @given(
        m=st.integers(min_value=1, max_value=64),
        service=st.floats(min_value=1e-3, max_value=1e3),
        load=st.floats(min_value=1e-9, max_value=0.999, exclude_max=True),
    )
    def test_identity_holds_across_the_stable_region(self, m, service, load):
        # identical denominators: S/(1 - lambda S/m) vs m * (S/m)/(1 - ...)
        agg_rate = load * m / service
        r_para = mm1.parallel_array_residence(agg_rate, service, m)
        r_serial = mm1.tandem_residence(agg_rate, service, m)
        assert math.isclose(r_para, r_serial, rel_tol=1e-12)

    def test_fractional_m_rejected(self):
        with pytest.raises(ValueError):
            mm1.parallel_array_residence(1.0, 0.5, 2.5)


class TestFeedbackResidence:
    def test_demand_accumulates_over_visits(self):
        # V=4 visits of 0.0625 each make D=0.25 at rho = 0.5
        assert mm1.feedback_residence(2.0, 0.0625, 4) == pytest.approx(0.5)

    def test_single_visit_degenerates_to_mm1(self):
        assert mm1.feedback_residence(2.0, 0.25, 1) == \
            mm1.mm1_residence(2.0, 0.25)

    @settings(max_examples=300, deadline=None)
    @given(
        m=st.integers(min_value=2, max_value=64),
        service=st.floats(min_value=1e-3, max_value=1e3),
        load=st.floats(min_value=1e-9, max_value=0.999, exclude_max=True),
    )
    def test_feedback_strictly_dominates_tandem(self, m, service, load):
        # whole demand in one denominator beats m spread-out denominators
        agg_rate = load / service
        r_feedback = mm1.feedback_residence(agg_rate, service / m, m)
        r_tandem = mm1.tandem_residence(agg_rate, service, m)
        assert r_feedback > r_tandem

    def test_feedback_saturates_on_total_demand(self):
        # stable per visit but saturated on the summed demand
        with pytest.raises(SaturationError):
            mm1.feedback_residence(2.0, 0.25, 4)
