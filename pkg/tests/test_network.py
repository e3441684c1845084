import math

import numpy as np
import pytest

from conftest import random_network
from ovnn.builtins import make_activation, sigmoid_mix_activation, tanh_activation, tanh_sign_activation
from ovnn.network import (
    DelayProfile,
    NetworkSpec,
    RateFunction,
    effective_input,
    rhs_octonion,
    rhs_real,
    sign0,
    verify_derivative_bounds,
)
from ovnn.octonion import Octonion


def scalar_net(d=2.0, a=0.0, b=0.0, i=0.0, delay=0.5):
    """One neuron whose weights are real multiples of e0."""
    e0 = np.zeros((1, 1, 8))
    e0[0, 0, 0] = 1.0
    act = tanh_activation()
    return NetworkSpec([d], a * e0, b * e0, np.full((1, 8), i), (act,), DelayProfile.constant([[delay]]))


def test_linear_decay_rhs():
    net = scalar_net(d=3.0, i=0.5)
    w = np.arange(8.0).reshape(1, 8)
    np.testing.assert_allclose(rhs_real(net, w, w[None]), -3.0 * w + 0.5)


def test_real_weights_act_componentwise():
    net = scalar_net(d=1.0, a=0.5, b=-0.25)
    w = np.linspace(-1, 1, 8).reshape(1, 8)
    wd = np.full((1, 1, 8), 0.3)
    expected = -w + 0.5 * np.tanh(w) - 0.25 * np.tanh(0.3)
    np.testing.assert_allclose(rhs_real(net, w, wd), expected, atol=1e-15)


def test_control_is_added():
    net = scalar_net()
    w = np.zeros((1, 8))
    u = np.ones((1, 8))
    np.testing.assert_allclose(rhs_real(net, w, w[None], u), u)


def test_real_matches_octonion_form():
    rng = np.random.default_rng(7)
    for _ in range(5):
        net = random_network(rng)
        w = rng.normal(size=(2, 8))
        wd = rng.normal(size=(2, 2, 8))
        direct = rhs_octonion(
            net,
            [Octonion.from_array(r) for r in w],
            [[Octonion.from_array(wd[p, q]) for q in range(2)] for p in range(2)],
        )
        np.testing.assert_allclose(rhs_real(net, w, wd), np.array([o.c for o in direct]), atol=1e-12)


def test_bad_shapes():
    net = scalar_net()
    with pytest.raises(ValueError):
        rhs_real(net, np.zeros((1, 8)), np.zeros((1, 8)))
    with pytest.raises(ValueError):
        rhs_octonion(net, [], [[]])
    with pytest.raises(ValueError):
        NetworkSpec([-1.0], np.zeros((1, 1, 8)), np.zeros((1, 1, 8)), np.zeros((1, 8)), (tanh_activation(),), DelayProfile.constant([[0.0]]))
    with pytest.raises(ValueError):
        NetworkSpec([1.0, 1.0], np.zeros((2, 2, 8)), np.zeros((2, 2, 8)), np.zeros((2, 8)), (tanh_activation(),), DelayProfile.constant([[0.0]]))


def test_effective_input_at_zero_is_input(ex2):
    # tanh(0) = sign(0) = 0, so the shifted input at the origin is I itself
    net = ex2.networks["proportional"]
    np.testing.assert_allclose(effective_input(net, np.zeros((2, 8))), net.I)


def test_effective_input_vanishes_at_equilibrium():
    net = scalar_net(d=2.0, a=0.5, i=1.0)
    # every component solves -2 z + 0.5 tanh z + 1 = 0
    z = 0.5
    for _ in range(100):
        z = (1.0 + 0.5 * math.tanh(z)) / 2.0
    assert np.max(np.abs(effective_input(net, np.full((1, 8), z)))) < 1e-14


def test_delay_profiles():
    c = DelayProfile.constant([[1.0, 2.0], [3.0, 4.0]])
    assert c.tau_bound(7.0) == 4.0
    assert c.check(np.linspace(0, 5, 11)) == []
    p = DelayProfile.proportional([[0.2, 0.1], [0.2, 0.1]])
    np.testing.assert_allclose(p.tau(10.0), [[2.0, 1.0], [2.0, 1.0]])
    assert p.omega == 0.2
    assert p.check(np.linspace(0, 5, 11)) == []
    with pytest.raises(ValueError):
        DelayProfile.proportional([[1.0]])
    with pytest.raises(ValueError):
        DelayProfile.constant([[-1.0]])
    bad = DelayProfile.custom(lambda t: np.array([[2.0 * t]]), lambda t: t)
    assert bad.check([1.0])


def test_rate_functions():
    c = DelayProfile.constant([[1.0, 2.0], [3.0, 4.0]])
    r = RateFunction.exponential(0.02, c)
    assert (r.alpha, r.beta) == (0.02, pytest.approx(math.exp(0.08) - 1))
    assert r.mu(1.0) == pytest.approx(math.exp(0.02))
    p = RateFunction.power(1.0, DelayProfile.proportional([[0.2, 0.1], [0.2, 0.1]]))
    assert (p.alpha, p.beta) == (0.0, pytest.approx(0.25))
    np.testing.assert_allclose(p.mu([0.0, 2.0]), [0.0, 2.0])
    with pytest.raises(ValueError):
        RateFunction.exponential(0.02, DelayProfile.proportional([[0.2]]))
    with pytest.raises(ValueError):
        RateFunction.power(0.0, c)


def test_sign0():
    np.testing.assert_array_equal(sign0(np.array([-2.0, 0.0, 3.0])), [-1.0, 0.0, 1.0])


@pytest.mark.parametrize("act", [sigmoid_mix_activation(), tanh_activation(2.0)], ids=lambda a: a.name)
def test_smooth_activation_bounds_hold(act):
    assert verify_derivative_bounds(act, which="f").ok
    assert verify_derivative_bounds(act, which="g").ok


def test_tanh_sign_bounds_violated_on_odd_diagonal():
    # odd components have slope 0.4 (f) and 0.55 (g) at the origin, bounds are 0.3 and 0.45
    act = tanh_sign_activation()
    for which in "fg":
        rep = verify_derivative_bounds(act, which=which)
        bad = {tuple(ix) for ix in np.argwhere(rep.worst_violation > 1e-6)}
        assert bad == {(k, k) for k in (1, 3, 5, 7)}
        assert rep.worst_violation.max() == pytest.approx(0.1, abs=1e-5)


def test_sigmoid_mix_values():
    act = sigmoid_mix_activation()
    s = np.zeros(8)
    s[0], s[1] = 1.0, 0.5
    u, v = s[0] + 2 * s[1], 2 * s[0] + s[1]
    odd = lambda x: (1 - math.exp(-x)) / (1 + math.exp(-x))
    sig = lambda x: 1 / (1 + math.exp(-x))
    expected_f = [odd(u), sig(v), odd(v), sig(u)] * 2
    expected_g = [sig(v), odd(u), sig(u), odd(v)] * 2
    np.testing.assert_allclose(act.f(s), expected_f, rtol=1e-14)
    np.testing.assert_allclose(act.g(s), expected_g, rtol=1e-14)


def test_make_activation():
    assert make_activation("tanh", gain=0.5).lambda_bound[0, 0] == 0.5
    with pytest.raises(ValueError):
        make_activation("relu")
