import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exgap.egap import (GOLDEN_TAU0, SchedulerState, compute_C0, compute_Qk, compute_Rk,
                        eta, initial_delta, tau_bounds, update_tau_dual, update_tau_fixed,
                        update_tau_primal, xi)
from exgap.egap.schedule import requested_accuracy


def consts(**kw):
    base = dict(M=1, L_A=1.0, C_d=1.0, norm_A=1.0, sum_sigma=1.0, D_sigma=1.0, sum_A2=1.0)
    base.update(kw)
    return SimpleNamespace(**base)


def state(tau=0.5, beta1=1.0, beta2=1.0, delta=0.0):
    return SchedulerState(k=0, tau=tau, beta1=beta1, beta2=beta2, delta=delta)


class TestTauDual:
    # the documented 7-digit values differ from the exact roots in the 7th digit
    def test_alpha_one(self):
        assert update_tau_dual(0.6180340, 1.0) == pytest.approx(0.3159212, abs=1e-6)

    def test_alpha_zero(self):
        assert update_tau_dual(0.6180340, 0.0) == pytest.approx(0.4558876, abs=1e-6)

    def test_zero(self):
        assert update_tau_dual(0.0, 0.5) == 0.0

    def test_closed_form_expression(self):
        t, a = 0.6180340, 0.3
        ref = 0.5 * t * (math.sqrt((1 - a * t) ** 2 * t * t + 4 * (1 - a * t)) - (1 - a * t) * t)
        assert update_tau_dual(t, a) == pytest.approx(ref, rel=1e-14)

    @settings(max_examples=300, deadline=None)
    @given(t=st.floats(1e-8, 0.999), a=st.floats(0.0, 1.0))
    def test_root_identity_and_decrease(self, t, a):
        tp = update_tau_dual(t, a)
        assert tp < t
        lhs, rhs = tp * tp / (1 - tp), (1 - a * t) * t * t
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_invalid(self):
        with pytest.raises(ValueError):
            update_tau_dual(1.0, 0.5)
        with pytest.raises(ValueError):
            update_tau_dual(0.5, 1.5)

    def test_fixed_is_alpha_zero(self):
        assert update_tau_fixed(0.4) == update_tau_dual(0.4, 0.0)


class TestTauPrimal:
    def test_half(self):
        assert update_tau_primal(0.5) == pytest.approx(1 / 3)

    def test_harmonic(self):
        t = 0.5
        for k in range(1, 200):
            t = update_tau_primal(t)
            assert t == pytest.approx(1 / (k + 2), rel=1e-12)

    def test_small(self):
        assert update_tau_primal(1e-9) == pytest.approx(1e-9, rel=1e-8)


ALPHA_MAX_LOWER = 1.0 / (1.0 + GOLDEN_TAU0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), astar=st.floats(0.01, 1.0))
def test_tau_upper_envelope_any_path(seed, astar):
    rng = np.random.default_rng(seed)
    t = GOLDEN_TAU0
    for k in range(1, 2001):
        t = update_tau_dual(t, rng.uniform(astar, 1.0))
        assert t <= tau_bounds(k, GOLDEN_TAU0, astar)[1] + 1e-12


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), astar=st.floats(0.0, ALPHA_MAX_LOWER * 0.999))
def test_tau_lower_envelope_when_alpha_small(seed, astar):
    # the lower envelope needs tau0 < (1 - alpha)/alpha at every step
    rng = np.random.default_rng(seed)
    t = GOLDEN_TAU0
    for k in range(1, 2001):
        t = update_tau_dual(t, rng.uniform(astar, ALPHA_MAX_LOWER * 0.999))
        assert t >= tau_bounds(k, GOLDEN_TAU0, astar)[0] - 1e-12


def test_tau_lower_envelope_fails_for_large_alpha():
    # alpha = 1 at k = 0 already undershoots 1/(1 + 1/tau0)
    t1 = update_tau_dual(GOLDEN_TAU0, 1.0)
    assert t1 < tau_bounds(1, GOLDEN_TAU0, 1.0)[0]


class TestFactors:
    def test_Qk_example(self):
        assert compute_Qk(state(), 0.0, consts()) == pytest.approx(1.5)

    def test_Qk_tau_zero(self):
        c = consts(M=4, C_d=3.0, L_A=2.0)
        assert compute_Qk(state(tau=0.0), 5.0, c) == pytest.approx(2 * 3.0 / 2.0)

    def test_Qk_increases_with_y(self):
        c = consts()
        assert compute_Qk(state(tau=0.3), 2.0, c) > compute_Qk(state(tau=0.3), 1.0, c)

    def test_Rk_example(self):
        assert compute_Rk(state(), consts()) == pytest.approx(2.0)

    def test_Rk_no_beta1_term(self):
        # beta1 -> 0 leaves only the penalty part
        v = compute_Rk(state(beta1=1e-300), consts(M=2, sum_A2=3.0))
        assert v == pytest.approx(2 * 3.0 / (2 * 0.5 * 1.0))

    def test_C0(self):
        assert compute_C0(1.0, consts()) == pytest.approx(1.5)
        assert compute_C0(2.0, consts(C_d=0.0, sum_sigma=3.0)) == pytest.approx(3.0)
        assert compute_C0(4.0, consts()) == pytest.approx(4 * compute_C0(1.0, consts()))

    def test_eta_bounded_by_Qk(self):
        c = consts(M=3, sum_sigma=3.0)
        s = state(tau=0.4, beta1=0.7, beta2=2.0)
        sig = np.ones(3)
        e = np.full(3, 0.01)
        assert eta(s, 1.3, e, sig, c) <= compute_Qk(s, 1.3, c) * 0.01 + 1e-15

    def test_xi_bounded_by_Rk(self):
        c = consts(M=2, sum_sigma=2.0, sum_A2=2.0, D_sigma=1.5)
        s = state(tau=0.4, beta1=0.7, beta2=2.0)
        mu = 2 * np.ones(2) / (0.6 * 2.0)
        e = np.full(2, 0.01)
        assert xi(s, e, e, mu, np.ones(2), c) <= compute_Rk(s, c) * 0.01 + 1e-15

    def test_initial_delta_uniform(self):
        c = consts(M=4, C_d=2.0, L_A=3.0)
        eps = 1e-3
        d = initial_delta(0.5, np.full(4, eps), np.ones(4), c)
        assert d == pytest.approx(0.5 * (2.0 * 2 / 3.0) * eps + 0.5 * 2.0 * eps ** 2)

    def test_requested_accuracy(self):
        s = state(tau=0.5, delta=1e-2)
        assert requested_accuracy(s, 2.0) == pytest.approx(2.5e-3)
        assert requested_accuracy(s, 1e20) == 1e-10
        assert requested_accuracy(s, 2.0, exact=True) == 0.0


def test_state_validation():
    with pytest.raises(ValueError):
        SchedulerState(k=0, tau=1.0, beta1=1.0, beta2=1.0)
    with pytest.raises(ValueError):
        SchedulerState(k=0, tau=0.5, beta1=0.0, beta2=1.0)
    with pytest.raises(ValueError):
        SchedulerState(k=0, tau=0.5, beta1=1.0, beta2=1.0, delta=-1.0)
    s = state()
    assert s.evolve(tau=0.25).tau == 0.25 and s.tau == 0.5
