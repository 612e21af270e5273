import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exgap._parallel import ComponentPool, tree_sum
from exgap.model import (Box, ComponentSpec, Problem, QuadraticObjective, WholeSpace,
                         ZeroObjective, compute_constants, validate)
from exgap.smooth import (dual_lipschitz, gap_bounds, gradient_map, penalty, smoothed_dual)

from conftest import scalar_family, scalar_problem, true_dual


def _g(p, y, beta1):
    return smoothed_dual(p, y, beta1, 0.0).value


class TestSmoothedDual:
    def test_unit_example(self):
        ev = smoothed_dual(scalar_problem(), np.array([0.25]), 1.0)
        assert ev.x[0] == pytest.approx(-0.25)
        assert ev.grad[0] == pytest.approx(-0.25)

    def test_zero_gradient_at_center(self):
        ev = smoothed_dual(scalar_problem(), np.zeros(1), 1.0)
        assert ev.grad[0] == 0.0

    def test_inexact_gradient_error(self):
        rng = np.random.default_rng(3)
        comps = []
        for _ in range(3):
            R = rng.standard_normal((3, 3))
            comps.append(ComponentSpec(QuadraticObjective(R @ R.T + np.eye(3), rng.standard_normal(3)),
                                       Box(-0.5, 0.5), rng.standard_normal((2, 3))))
        p = validate(Problem(comps, 2))
        c = compute_constants(p)
        y = rng.standard_normal(2)
        eps = 1e-3
        rough = smoothed_dual(p, y, 0.3, eps)
        ref = smoothed_dual(p, y, 0.3, 1e-12, budget=100_000)
        assert np.all(rough.eps <= eps)
        assert np.linalg.norm(rough.grad - ref.grad) <= c.norm_A * np.sqrt(p.M) * eps + 1e-10
        # the reported value overestimates the exact one by at most sum beta1 sigma eps^2 / 2
        slack = 0.5 * 0.3 * np.sum(p.sigmas * rough.eps ** 2)
        assert ref.value - 1e-10 <= rough.value <= ref.value + slack + 1e-10

    def test_parallel_matches_serial_bitwise(self):
        p = scalar_family(11, M=9)
        y = np.random.default_rng(0).standard_normal(p.m)
        a = smoothed_dual(p, y, 0.4)
        with ComponentPool(3) as pool:
            b = smoothed_dual(p, y, 0.4, pool=pool)
        assert a.value == b.value
        np.testing.assert_array_equal(a.grad, b.grad)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            smoothed_dual(scalar_problem(), np.zeros(1), 0.0)
        with pytest.raises(ValueError):
            smoothed_dual(scalar_problem(), np.zeros(1), 1.0, -1.0)


@pytest.mark.parametrize("seed", range(4))
def test_finite_difference_gradient(seed):
    p = scalar_family(seed)
    rng = np.random.default_rng(100 + seed)
    beta1 = 0.5
    h = 1e-6
    for _ in range(20):
        y = rng.standard_normal(p.m)
        grad = smoothed_dual(p, y, beta1).grad
        fd = np.array([(_g(p, y + h * e, beta1) - _g(p, y - h * e, beta1)) / (2 * h)
                       for e in np.eye(p.m)])
        assert np.linalg.norm(grad - fd) / (1 + np.linalg.norm(grad)) <= 1e-5


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 5000), beta1=st.floats(0.01, 10.0))
def test_gradient_lipschitz(seed, beta1):
    p = scalar_family(seed)
    rng = np.random.default_rng(seed)
    y1, y2 = rng.standard_normal(p.m), rng.standard_normal(p.m)
    g1 = smoothed_dual(p, y1, beta1).grad
    g2 = smoothed_dual(p, y2, beta1).grad
    L = dual_lipschitz(beta1, compute_constants(p))
    assert np.linalg.norm(g1 - g2) <= L * np.linalg.norm(y1 - y2) * (1 + 1e-12) + 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 5000), beta1=st.floats(1e-3, 10.0))
def test_smoothing_sandwich(seed, beta1):
    p = scalar_family(seed)
    y = np.random.default_rng(seed).standard_normal(p.m) * 3
    gs = _g(p, y, beta1)
    g = true_dual(p, y)
    D_X = compute_constants(p).D_X
    assert gs - beta1 * D_X - 1e-10 <= g <= gs + 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 5000), b1=st.floats(1e-3, 5.0), b2=st.floats(1e-3, 5.0))
def test_monotone_and_concave_in_beta1(seed, b1, b2):
    p = scalar_family(seed)
    y = np.random.default_rng(seed).standard_normal(p.m)
    lo, hi = min(b1, b2), max(b1, b2)
    ev = smoothed_dual(p, y, lo)
    g_hi = _g(p, y, hi)
    assert ev.value <= g_hi + 1e-12
    # tangent bound with slope p_X(x*(y; beta1))
    assert g_hi <= ev.value + (hi - lo) * ev.prox + 1e-10


def test_dual_lipschitz_examples():
    comps = [ComponentSpec(ZeroObjective(), WholeSpace(), [[1.0]], sigma=2.0),
             ComponentSpec(ZeroObjective(), WholeSpace(), [[3.0]], sigma=1.0)]
    c = compute_constants(validate(Problem(comps, 1)))
    assert dual_lipschitz(0.5, c) == pytest.approx(19.0)
    assert dual_lipschitz(1.0, compute_constants(scalar_problem())) == pytest.approx(1.0)
    assert dual_lipschitz(2.0, c) == pytest.approx(0.5 * dual_lipschitz(1.0, c))


class TestPenalty:
    def test_feasible_point(self):
        ev = penalty(scalar_problem(), np.zeros(1), 2.0)
        assert ev.psi == 0.0 and ev.ystar[0] == 0.0

    def test_example(self):
        ev = penalty(scalar_problem(), np.array([2.0]), 4.0)
        assert ev.psi == pytest.approx(0.5)
        assert ev.ystar[0] == pytest.approx(0.5)
        assert ev.f == pytest.approx(0.5)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 5000), beta2=st.floats(1e-3, 100.0))
    def test_variational_form(self, seed, beta2):
        p = scalar_family(seed)
        x = np.random.default_rng(seed).uniform(-3, 3, p.n)
        ev = penalty(p, x, beta2)
        r = p.residual(x)
        var = float(r @ ev.ystar) - 0.5 * beta2 * float(ev.ystar @ ev.ystar)
        assert ev.psi == pytest.approx(var, rel=1e-10, abs=1e-12)
        assert ev.psi == pytest.approx(0.5 * beta2 * float(ev.ystar @ ev.ystar), rel=1e-12)
        assert ev.psi >= 0 and ev.f >= ev.f - ev.psi

    def test_bad_beta2(self):
        with pytest.raises(ValueError):
            penalty(scalar_problem(), np.zeros(1), 0.0)


class _Ev:
    def __init__(self, grad):
        self.grad = np.asarray(grad, dtype=float)


def test_gradient_map():
    c = compute_constants(scalar_problem())
    assert gradient_map(np.array([0.25]), 1.0, _Ev([0.0]), c)[0] == 0.25
    assert gradient_map(np.array([0.25]), 1.0, _Ev([-0.25]), c)[0] == pytest.approx(0.0)
    s1 = gradient_map(np.zeros(1), 1.0, _Ev([1.0]), c)[0]
    s3 = gradient_map(np.zeros(1), 3.0, _Ev([1.0]), c)[0]
    assert s3 == pytest.approx(3 * s1)


class TestGapBounds:
    def test_zero_delta_and_radius(self):
        p = scalar_problem()
        D = compute_constants(p).D_X
        gb = gap_bounds(p, np.zeros(1), np.zeros(1), 0.3, 2.0, 0.0, 0.0)
        assert gb.feas_bound == pytest.approx(np.sqrt(2 * 0.3 * 2.0 * D))
        assert gb.dual_gap_upper == pytest.approx(0.3 * D)

    def test_degenerate_limit(self):
        gb = gap_bounds(scalar_problem(), np.zeros(1), np.zeros(1), 0.0, 0.0, 0.0, 1.0)
        assert gb.feas_bound == 0.0 and gb.dual_gap_upper == 0.0 and gb.dual_gap_lower == 0.0

    def test_upper_example(self):
        p = scalar_problem()
        D = compute_constants(p).D_X
        gb = gap_bounds(p, np.zeros(1), np.zeros(1), 0.2 / D, 1.0, 0.1, 0.0)
        assert gb.dual_gap_upper == pytest.approx(0.3)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            gap_bounds(scalar_problem(), np.zeros(1), np.zeros(1), 1.0, 1.0, -1.0, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=0, max_size=40))
def test_tree_sum_matches_fsum(vals):
    import math
    assert tree_sum(vals) == pytest.approx(math.fsum(vals), abs=1e-6)
