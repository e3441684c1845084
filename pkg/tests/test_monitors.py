import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ovnn.criteria import LambdaVec, gain_lower_bounds
from ovnn.history import ConstantHistory, HistoryTrajectory
from ovnn.monitors import (
    MonitorSeries,
    RangeMax,
    detect_phases,
    feasible_theta,
    lambda_inf_norm,
    lambda_inf_norms,
    monitor_p,
    monitor_phase2,
    window_sup_norm,
    window_sup_series,
)
from ovnn.network import DelayProfile, RateFunction
from ovnn.simulate import SimResult


def fake_result(states, h=0.1, tau=0.3, pre=None, target=None, lam=None):
    """Wrap a grid of states (N, n, 8) as a simulation result with a constant delay bound."""
    states = np.asarray(states, dtype=float)
    n = states.shape[1]
    lam = lam or LambdaVec.uniform(n, 1.0)
    pre = np.empty((0,) + states.shape[1:]) if pre is None else np.asarray(pre, dtype=float)
    z = np.zeros(states.shape[1:]) if target is None else target
    traj = HistoryTrajectory(0.0, h, states, np.zeros_like(states), ConstantHistory(states[0]), pre)
    return SimResult(traj, lambda_inf_norms(lam, states - z), lam, z, lambda t: tau)


def test_lambda_inf_norm():
    lam = LambdaVec.from_blocks([[0.5] * 8, [2.0] * 8])
    y = np.zeros((2, 8))
    y[0, 3] = -1.0
    y[1, 7] = 3.0
    assert lambda_inf_norm(lam, y) == 2.0
    assert lambda_inf_norm(lam, y.reshape(-1)) == 2.0
    np.testing.assert_array_equal(lambda_inf_norms(lam, np.stack([y, 2 * y])), [2.0, 4.0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60), st.data())
def test_range_max_matches_brute_force(values, data):
    rm = RangeMax(values)
    lo = data.draw(st.integers(0, len(values) - 1))
    hi = data.draw(st.integers(lo, len(values) - 1))
    assert rm.query(lo, hi) == max(values[lo : hi + 1])


def test_range_max_errors():
    with pytest.raises(ValueError):
        RangeMax([])
    with pytest.raises(ValueError):
        RangeMax([1.0, 2.0]).query(1, 0)


def test_window_sup_sawtooth():
    # norm climbs 0, 1, 2, 3 then resets; window [t - 0.3, t] covers four grid points
    saw = np.tile(np.arange(4.0), 5)
    states = np.zeros((saw.size, 1, 8))
    states[:, 0, 0] = saw
    pre = np.zeros((3, 1, 8))
    res = fake_result(states, pre=pre)
    sup = window_sup_series(res, res.lam)
    brute = [max(saw[max(0, k - 3) : k + 1]) for k in range(saw.size)]
    np.testing.assert_array_equal(sup, brute)
    assert window_sup_norm(res, res.lam, 0.5) == 3.0
    with pytest.raises(ValueError):
        window_sup_norm(res, res.lam, 100.0)


def test_window_includes_prestart_history():
    states = np.zeros((5, 1, 8))
    pre = np.zeros((3, 1, 8))
    pre[2, 0, 0] = 7.0  # t = -0.1, inside the closed windows up to t = 0.2
    res = fake_result(states, pre=pre)
    np.testing.assert_array_equal(window_sup_series(res, res.lam), [7.0, 7.0, 7.0, 0.0, 0.0])


def test_zero_trajectory_monitors():
    res = fake_result(np.zeros((11, 1, 8)))
    rate = RateFunction.exponential(0.1, DelayProfile.constant([[0.3]]))
    p = monitor_p(res, res.lam, rate)
    np.testing.assert_array_equal(p.values, 0.0)
    theta = 0.5
    p2 = monitor_phase2(res, res.lam, theta)
    np.testing.assert_allclose(p2.values, theta * res.times)
    with pytest.raises(ValueError):
        monitor_phase2(res, res.lam, 0.0)


def test_monitor_onset_and_increases():
    times = np.arange(6.0)
    series = MonitorSeries(times, np.array([1.0, 2.0, 3.0, 2.5, 2.5, 2.0]), 2, 1e-9)
    assert series.increases() == 2
    assert series.increases(2.0) == 0
    assert series.increases(0.0, 1.0) == 1
    states = np.zeros((6, 1, 8))
    states[:, 0, 0] = [1.0, 2.0, 3.0, 2.5, 2.5, 2.0]
    p = monitor_p(fake_result(states, tau=0.0), LambdaVec.uniform(1, 1.0), RateFunction.custom(np.ones_like, 0, 0))
    assert p.onset == pytest.approx(0.2)


def test_phases_at_target_from_the_start():
    res = fake_result(np.zeros((5, 1, 8)))
    ph = detect_phases(res, res.lam)
    assert (ph.T1, ph.T2, ph.t_zero) == (0.0, 0.0, 0.0)


def test_phases_sequence():
    norms = np.array([3.0, 2.0, 0.9, 0.5, 0.1, 1e-7, 0.0, 0.0])
    states = np.zeros((norms.size, 1, 8))
    states[:, 0, 2] = norms
    ph = detect_phases(fake_result(states, tau=0.0), LambdaVec.uniform(1, 1.0))
    assert ph.T1 == pytest.approx(0.2)
    assert ph.T2 == pytest.approx(0.5)
    assert ph.t_zero == pytest.approx(0.6)


def test_phases_not_reached():
    states = np.full((5, 1, 8), 2.0)
    ph = detect_phases(fake_result(states), LambdaVec.uniform(1, 1.0))
    assert (ph.T1, ph.T2, ph.t_zero) == (None, None, None)


def test_feasible_theta(ex2):
    gains = gain_lower_bounds(ex2.networks["proportional"], ex2.lam, ex2.rates["proportional"])
    # margin 0.1 over the largest weight 0.5, halved
    assert feasible_theta(gains, ex2.lam) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        feasible_theta(gains, ex2.lam, kappa_hat=gains.kappa_hat_min)
