"""Unit tests for cumulative vectors."""
import itertools
from typing import Iterator

import pytest

from wcsched.algebra.cumvec import (
    BEYOND_HORIZON,
    CumVec,
    make_delta,
    minplus_conv,
    rshift,
    tau,
    unshift_clip,
)
from wcsched.errors import InvalidArgumentError, InvalidHorizonError, InvariantError


def all_vectors(horizon: int, top: int) -> Iterator[CumVec]:
    """Every CumVec of the horizon with entries up to top."""
    for tail in itertools.combinations_with_replacement(range(top + 1), horizon):
        yield CumVec((0,) + tail)


# (horizon, largest entry) pairs small enough to enumerate triples
SMALL = [(1, 4), (2, 4), (3, 3), (4, 2)]


class TestConstruction:
    """Tests for building and validating CumVec."""

    def test_delta(self):
        """Unit step is 0 then all ones."""
        assert make_delta(3).entries == (0, 1, 1, 1)

    def test_zero_horizon_rejected(self):
        """Horizon 0 is not a valid vector."""
        with pytest.raises(InvalidHorizonError):
            make_delta(0)

    def test_scaled_delta(self):
        """Integer scaling multiplies every entry."""
        x = 200 * make_delta(2)

        assert x.entries == (0, 200, 200)

    def test_nonzero_first_entry(self):
        """Entry 0 must be zero; position is reported."""
        with pytest.raises(InvariantError) as exc:
            CumVec((1, 2))

        assert exc.value.position == (0,)

    def test_decreasing_entry(self):
        """The first decreasing entry is reported."""
        with pytest.raises(InvariantError) as exc:
            CumVec((0, 3, 2))

        assert exc.value.position == (2,)

    def test_from_json_saturates(self):
        """A short array is extended by repeating its last entry."""
        x = CumVec.from_json([0, 1], horizon=3)

        assert x.entries == (0, 1, 1, 1)

    def test_from_json_too_long(self):
        """An array past the horizon is an error."""
        with pytest.raises(InvariantError):
            CumVec.from_json([0, 1, 2, 3], horizon=2)

    def test_segments(self):
        """Segment shorthand expands to a piecewise-linear curve."""
        x = CumVec.from_segments([[2, 0], [1, 5]], horizon=4)

        assert x.entries == (0, 0, 0, 5, 5)

    def test_segments_from_json(self):
        """The JSON object form accepts segments and an offset."""
        x = CumVec.from_json({"segments": [[3, 1]], "offset": 2}, horizon=4)

        assert x.entries == (0, 3, 4, 5, 5)

    def test_rate_burst(self):
        """Token-bucket curve is burst + rate * j after slot 0."""
        x = CumVec.from_rate_burst(rate=2, burst=3, horizon=3)

        assert x.entries == (0, 5, 7, 9)

    def test_resized(self):
        """Resizing truncates or saturates."""
        x = CumVec((0, 1, 4))

        assert x.resized(1).entries == (0, 1)
        assert x.resized(4).entries == (0, 1, 4, 4, 4)


class TestTau:
    """Tests for the arrival-slot index tau."""

    def test_first_slot(self):
        """The first task of [0, 2, 2, 5] arrives in slot 0."""
        assert tau(CumVec((0, 2, 2, 5)), 1) == 0

    def test_later_slot(self):
        """The third task arrives in slot 2."""
        assert tau(CumVec((0, 2, 2, 5)), 3) == 2

    def test_beyond_horizon(self):
        """A task the vector never counts has no slot."""
        assert tau(CumVec((0, 2, 2, 5)), 6) is BEYOND_HORIZON

    def test_batch_deadline(self):
        """Every task of 200 R^98 delta has slot 98."""
        p = rshift(200 * make_delta(100), 98)

        assert tau(p, 1) == 98
        assert tau(p, 200) == 98

    def test_zero_index_rejected(self):
        """Task indices start at 1."""
        with pytest.raises(InvalidArgumentError):
            tau(make_delta(2), 0)

    def test_count_duality(self):
        """tau_h(x) < j exactly when x_j >= h."""
        for horizon in range(1, 5):
            for x in all_vectors(horizon, 4):
                for h in range(1, 6):
                    t = tau(x, h)
                    if t is BEYOND_HORIZON:
                        assert all(v < h for v in x)
                        continue
                    for j in range(horizon + 1):
                        assert (t < j) == (x[j] >= h)


class TestShifts:
    """Tests for rshift and unshift_clip."""

    def test_rshift(self):
        """Right shift delays every entry."""
        assert rshift(CumVec((0, 1, 2, 3)), 1).entries == (0, 0, 1, 2)

    def test_rshift_past_horizon(self):
        """Shifting by more than H gives zero."""
        assert rshift(CumVec((0, 1, 2)), 5).entries == (0, 0, 0)

    def test_batch_shift(self):
        """200 R^98 delta is zero through slot 98."""
        x = rshift(200 * make_delta(100), 98)

        assert x[98] == 0
        assert x[99] == 200
        assert x[100] == 200

    def test_unshift_clip(self):
        """Entry j becomes (x_{j+1} - d)^+ and the tail repeats."""
        assert unshift_clip(CumVec((0, 3, 5)), 3).entries == (0, 2, 2)

    def test_unshift_clip_clears(self):
        """Serving more than the vector holds leaves zeros."""
        assert unshift_clip(CumVec((0, 3, 5)), 9).entries == (0, 0, 0)

    def test_unshift_moves_batch_earlier(self):
        """With nothing served, R^98 delta becomes R^97 delta."""
        x = 200 * rshift(make_delta(100), 98)

        assert unshift_clip(x, 0) == 200 * rshift(make_delta(100), 97)

    def test_negative_service_rejected(self):
        with pytest.raises(InvalidArgumentError):
            unshift_clip(make_delta(2), -1)

    def test_shift_back_never_exceeds(self):
        """R(R^{-1} x) <= x, with equality when x_1 = 0."""
        for horizon in range(1, 5):
            for x in all_vectors(horizon, 4):
                back = rshift(unshift_clip(x, 0), 1)

                assert back.leq(x)
                assert (back == x) == (x[1] == 0)


class TestMinplusConv:
    """Tests for min-plus convolution."""

    def test_hand_example(self):
        """Hand-evaluated convolution."""
        x = CumVec((0, 1, 2))
        y = CumVec((0, 3, 3))

        assert minplus_conv(x, y).entries == (0, 1, 2)

    def test_zero_is_absorbing(self):
        """Convolving with the zero vector gives zero."""
        x = CumVec((0, 2, 4, 6))

        assert minplus_conv(x, CumVec.zeros(3)) == CumVec.zeros(3)

    def test_commutative(self):
        """Order of the operands does not matter."""
        x = CumVec((0, 1, 3, 3, 7))
        y = CumVec((0, 2, 2, 5, 6))

        assert minplus_conv(x, y) == minplus_conv(y, x)

    def test_commutative_exhaustive(self):
        for horizon, top in SMALL:
            vectors = list(all_vectors(horizon, top))
            for x, y in itertools.product(vectors, repeat=2):
                assert minplus_conv(x, y) == minplus_conv(y, x)

    def test_associative_exhaustive(self):
        """(x (*) y) (*) z = x (*) (y (*) z) for every small triple."""
        for horizon, top in SMALL:
            vectors = list(all_vectors(horizon, top))
            for x, y, z in itertools.product(vectors, repeat=3):
                assert minplus_conv(minplus_conv(x, y), z) == minplus_conv(x, minplus_conv(y, z))

    def test_horizon_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            minplus_conv(make_delta(2), make_delta(3))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
