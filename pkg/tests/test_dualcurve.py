"""Unit tests for dual-curve services."""
import numpy as np
import pytest

from wcsched.algebra.cumvec import BEYOND_HORIZON, CumVec, make_delta, minplus_conv, rshift
from wcsched.algebra.dualcurve import (
    DualCurveService,
    compose,
    compose_chain,
    deadlines,
    eval_dual,
    p_vector,
    spectrum_dual,
    u_hat,
    update_dual,
)
from wcsched.algebra.minplus import conditional_spectrum, eval_minplus, update_spectral
from wcsched.errors import CausalityViolationError, GuaranteeViolationError, InvalidArgumentError
from wcsched.oracle.tabulated import lattice, tandem

BIG = 1000


def batch(count: int, deadline: int, horizon: int = 100) -> DualCurveService:
    """count * R^deadline delta with v = 0."""
    return DualCurveService.deadline_batch(count, deadline, horizon)


def random_dual(rng: np.random.Generator, horizon: int, max_step: int = 2) -> DualCurveService:
    def curve() -> CumVec:
        steps = rng.integers(0, max_step + 1, size=horizon)
        return CumVec.from_array(np.concatenate(([0], np.cumsum(steps))))
    return DualCurveService(curve(), curve())


class TestEvaluation:
    """Tests for psi^(u,v)."""

    def test_matches_cumulative_matrix(self):
        """Dual-curve evaluation equals min-plus evaluation of M^(u,v)."""
        rng = np.random.default_rng(1)
        for _ in range(10):
            svc = random_dual(rng, 3)
            m = svc.cumulative_matrix()

            for q in lattice(0, 3, 5):
                assert eval_dual(svc, q) == eval_minplus(m, q)

    def test_equal_curves_give_convolution(self):
        """With u = v the service is the min-plus convolution q (*) v."""
        v = CumVec((0, 1, 3, 4, 6))
        svc = DualCurveService(v, v)
        q = CumVec((0, 2, 2, 5, 9))

        assert eval_dual(svc, q) == minplus_conv(q, v)

    def test_batch_flow(self):
        """200 R^98 delta with v = 0 serves u when all tasks are queued."""
        svc = batch(200, 98)
        q = 200 * make_delta(100)

        assert eval_dual(svc, q) == svc.u

    def test_huge_static_curve(self):
        """When v dominates, psi = u for q >= u."""
        u = CumVec((0, 1, 2, 4))
        svc = DualCurveService(u, CumVec((0, BIG, BIG, BIG)))

        assert eval_dual(svc, CumVec((0, 5, 5, 5))) == u


class TestUHatAndP:
    """Tests for u-hat, p and deadlines."""

    def test_u_hat_zero_static_curve(self):
        """With v = 0, u-hat = min{u, q1 delta}."""
        svc = DualCurveService(CumVec((0, 1, 4, 6)), CumVec.zeros(3))

        assert u_hat(svc, 3) == svc.u.cap(3)

    def test_u_hat_large_q1(self):
        svc = DualCurveService(CumVec((0, 1, 4, 6)), CumVec((0, 0, 1, 1)))

        assert u_hat(svc, 100) == svc.u

    def test_conditional_spectrum_matches_spectral_form(self):
        """Conditioning the dual-curve spectrum gives the dual-curve conditional spectrum."""
        rng = np.random.default_rng(4)
        for _ in range(20):
            svc = random_dual(rng, 4)
            b = int(rng.integers(0, 3))
            q1 = b + int(rng.integers(0, 3))

            expected = conditional_spectrum(spectrum_dual(svc, b), q1)

            assert svc.conditional_spectrum(q1) == expected
            assert np.array_equal(expected.entries[0], u_hat(svc, q1).as_array())

    def test_p_vector_empty_queue(self):
        """Nothing queued, nothing owed."""
        assert p_vector(batch(200, 99), 0) == CumVec.zeros(100)

    def test_p_vector_batch(self):
        """p of 200 R^99 delta with all 200 tasks queued is the curve itself."""
        svc = batch(200, 99)

        assert p_vector(svc, 200) == svc.u

    def test_deadlines(self):
        """Batch flows get one shared deadline per flow."""
        first = deadlines(batch(200, 98), 200)
        second = deadlines(batch(200, 99), 200)

        assert len(first) == 200
        assert set(first) == {98}
        assert set(second) == {99}

    def test_deadlines_beyond_horizon(self):
        """A service that owes nothing gives no deadlines within H."""
        offsets = deadlines(DualCurveService.zero(5), 3)

        assert list(offsets) == [BEYOND_HORIZON] * 3


class TestUpdate:
    """Tests for the O(H) update."""

    def test_batch_step(self):
        """Serving 2 of the batch moves the deadline one slot closer."""
        svc = batch(200, 98)

        nxt = update_dual(svc, 200, 2)

        assert nxt.u == 198 * rshift(make_delta(100), 97)
        assert nxt.v == svc.v

    def test_guarantee_violation(self):
        """Serving less than p = min(u_1, q1) is refused."""
        svc = DualCurveService(CumVec((0, 2, 3)), CumVec.zeros(2))

        with pytest.raises(GuaranteeViolationError):
            update_dual(svc, 3, 1)

    def test_causality_violation(self):
        svc = DualCurveService.zero(2)

        with pytest.raises(CausalityViolationError):
            update_dual(svc, 1, 2)

    def test_matches_spectral_update(self):
        """Updating (u, v) then taking its spectrum equals the spectral update."""
        rng = np.random.default_rng(21)
        for _ in range(30):
            svc = random_dual(rng, 5)
            b = int(rng.integers(0, 3))
            for _ in range(5):
                q1 = b + int(rng.integers(0, 3))
                d = int(rng.integers(min(svc.u[1], q1), q1 + 1))

                expected = update_spectral(spectrum_dual(svc, b), q1, d)
                svc = update_dual(svc, q1, d)
                b = q1 - d

                assert spectrum_dual(svc, b) == expected


class TestCompose:
    """Tests for tandem composition."""

    def test_identity_hop(self):
        """A hop with huge curves and no backlog changes nothing."""
        inner = DualCurveService(CumVec((0, 1, 3, 4)), CumVec((0, 0, 1, 2)))
        identity = DualCurveService(BIG * make_delta(3), BIG * make_delta(3))

        assert compose(inner, identity, 0) == inner

    def test_rate_latency(self):
        """Latencies add and the rate is the smaller one."""
        inner = DualCurveService.rate_latency(2, 1, 8)
        outer = DualCurveService.rate_latency(1, 2, 8)

        assert compose(inner, outer, 0) == DualCurveService.rate_latency(1, 3, 8)

    def test_service_curve_case(self):
        """With b = 0 and u = v on both hops, both curves convolve."""
        a = CumVec((0, 1, 2, 4, 5))
        c = CumVec((0, 0, 2, 3, 3))

        svc = compose(DualCurveService(a, a), DualCurveService(c, c), 0)

        assert svc.u == minplus_conv(a, c)
        assert svc.v == minplus_conv(a, c)

    def test_matches_tandem(self):
        """The composed service equals the two hops evaluated in turn."""
        rng = np.random.default_rng(7)
        for trial in range(60):
            inner = random_dual(rng, 3)
            outer = random_dual(rng, 3)
            b_outer = trial % 4
            composed = compose(inner, outer, b_outer)
            direct = tandem(inner, outer, b_outer)

            for q in lattice(b_outer, 3, b_outer + 5):
                assert composed.evaluate(q) == direct(q)

    def test_chain(self):
        """Chains fold left and add the backlogs."""
        hops = [DualCurveService.rate_latency(3, 1, 6) for _ in range(3)]

        svc, total = compose_chain(hops, [0, 1, 2])

        assert total == 3
        assert svc == compose(compose(hops[0], hops[1], 1), hops[2], 2)

    def test_empty_chain(self):
        with pytest.raises(InvalidArgumentError):
            compose_chain([], [])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
