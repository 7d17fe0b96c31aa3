from itertools import product

import pytest
from hypothesis import given, strategies as st

from ncs_abstract import (
    DelayBounds,
    DelayHistory,
    RangeError,
    channel_history,
    controller_measurement_index,
    f_hat,
    g_hat,
    held_input_index,
    oracle_held_packet,
)


def hist(lo, hi, *values):
    return DelayHistory(lo, hi, tuple(values))


def all_histories(lo, hi):
    n = hi - lo + 1
    for values in product(range(lo, hi + 1), repeat=n):
        yield DelayHistory(lo, hi, values)


class TestDelayBounds:
    def test_properties(self):
        b = DelayBounds(1, 2, 2, 3)
        assert (b.n_min, b.n_max) == (3, 5)
        assert list(b.sc_choices) == [1, 2]
        assert list(b.ca_choices) == [2, 3]
        assert list(b.combined_choices) == [3, 4, 5]

    @pytest.mark.parametrize("args", [(-1, 0, 0, 0), (2, 1, 0, 0), (0, 0, 3, 2), (0, 0, 0, -2)])
    def test_rejects_bad_bounds(self, args):
        with pytest.raises(RangeError):
            DelayBounds(*args)


class TestDelayHistory:
    def test_accessor_uses_send_lag(self):
        h = hist(1, 3, 2, 1, 3)
        assert h.delay(1) == 2
        assert h.delay(2) == 1
        assert h.delay(3) == 3
        assert h.span == 2

    def test_rejects_wrong_length(self):
        with pytest.raises(RangeError):
            hist(1, 2, 1)

    def test_rejects_out_of_range_values(self):
        with pytest.raises(RangeError):
            hist(1, 2, 1, 3)

    def test_rejects_inverted_or_negative_bounds(self):
        with pytest.raises(RangeError):
            hist(2, 1, 1, 2)
        with pytest.raises(RangeError):
            DelayHistory(-1, 1, (0, 0, 1))

    def test_lag_out_of_window(self):
        with pytest.raises(RangeError):
            hist(1, 2, 1, 2).delay(0)


class TestGHat:
    def test_single_entry_window(self):
        assert g_hat(0, hist(3, 3, 3)) == 0

    def test_both_candidates_arrived(self):
        h = hist(1, 2, 1, 1)
        assert g_hat(0, h) == 0
        assert g_hat(1, h) == 0

    def test_unarrived_newer_packet_scores_one(self):
        assert g_hat(1, hist(1, 2, 2, 2)) == 1

    def test_candidate_out_of_range(self):
        with pytest.raises(RangeError):
            g_hat(3, hist(1, 2, 1, 1))

    def test_bounded_by_zero_and_one(self):
        for h in all_histories(0, 3):
            for j in range(h.span + 1):
                assert 0 <= g_hat(j, h) <= 1


class TestFHat:
    @pytest.mark.parametrize("lo,hi,n", [(1, 3, 1), (1, 3, 2), (1, 3, 3), (0, 2, 0), (2, 5, 4)])
    def test_constant_history(self, lo, hi, n):
        h = DelayHistory(lo, hi, (n,) * (hi - lo + 1))
        assert f_hat(h) == hi - n

    def test_degenerate_window(self):
        assert f_hat(hist(2, 2, 2)) == 0

    def test_newer_packet_wins_on_simultaneous_arrival(self):
        # older packet (lag 2, delay 2) and newer (lag 1, delay 1) both arrive now;
        # the newer send is kept, the older rejected
        assert f_hat(hist(1, 2, 1, 2)) == 1

    def test_all_max_and_all_min(self):
        for lo, hi in [(0, 2), (1, 3), (2, 4)]:
            n = hi - lo + 1
            assert f_hat(DelayHistory(lo, hi, (hi,) * n)) == 0
            assert f_hat(DelayHistory(lo, hi, (lo,) * n)) == hi - lo

    def test_result_in_range(self):
        for h in all_histories(1, 3):
            assert 0 <= f_hat(h) <= h.span


class TestOracle:
    def test_constant_delays(self):
        k = 10
        delays = {k - p: 2 for p in range(1, 4)}
        assert oracle_held_packet(k, delays, 1, 3) == 1

    def test_degenerate(self):
        assert oracle_held_packet(5, {3: 2}, 2, 2) == 0

    def test_newest_not_yet_arrived(self):
        k = 8
        assert oracle_held_packet(k, {k - 2: 2, k - 1: 2}, 1, 2) == 0

    def test_rejects_bad_window(self):
        with pytest.raises(RangeError):
            oracle_held_packet(0, {}, 2, 1)


def test_f_hat_matches_oracle_small_windows():
    k = 23
    for lo in range(0, 4):
        for hi in range(lo, 4):
            for h in all_histories(lo, hi):
                delays = {k - lag: h.delay(lag) for lag in range(lo, hi + 1)}
                assert f_hat(h) == oracle_held_packet(k, delays, lo, hi), h


@given(st.data())
def test_f_hat_matches_oracle_random(data):
    lo = data.draw(st.integers(0, 5))
    hi = data.draw(st.integers(lo, min(lo + 5, 8)))
    values = data.draw(
        st.tuples(*[st.integers(lo, hi) for _ in range(hi - lo + 1)])
    )
    h = DelayHistory(lo, hi, values)
    k = data.draw(st.integers(-3, 30))
    delays = {k - lag: h.delay(lag) for lag in range(lo, hi + 1)}
    assert f_hat(h) == oracle_held_packet(k, delays, lo, hi)


class TestHeldIndices:
    @pytest.mark.parametrize("lo,hi,n", [(1, 3, 2), (0, 2, 1), (1, 1, 1)])
    def test_constant_delay_holds_n_back(self, lo, hi, n):
        h = DelayHistory(lo, hi, (n,) * (hi - lo + 1))
        assert held_input_index(h) == -n
        assert controller_measurement_index(h) == -n

    def test_degenerate_channel(self):
        assert held_input_index(hist(2, 2, 2)) == -2

    def test_simultaneous_arrival_prefers_newer(self):
        assert held_input_index(hist(1, 2, 1, 1)) == -1

    def test_delayed_newer_measurement_keeps_older(self):
        # newer measurement (lag 1) delayed past now; the older one is held
        assert controller_measurement_index(hist(1, 2, 2, 1)) == -2


class TestChannelHistory:
    def test_slices_buffer_by_send_lag(self):
        h = channel_history((3, 1, 2), 1, 3)
        assert h.values == (3, 1, 2)
        h = channel_history((3, 1, 2), 2, 3)
        assert h.values == (1, 2)

    def test_lag_zero_needs_fresh_delay(self):
        h = channel_history((1, 2), 0, 2, fresh=0)
        assert h.values == (0, 1, 2)
        with pytest.raises(RangeError):
            channel_history((1, 2), 0, 2)
