"""Built-in example networks and a small registry of named activation families."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .criteria import LambdaVec
from .network import ActivationSpec, DelayProfile, NetworkSpec, RateFunction, sign0
from .octonion import DIM

_EVEN = np.arange(0, DIM, 2)
_ODD = np.arange(1, DIM, 2)
# columns: the two weighted sums feeding every component
_MIX = np.array([[1.0, 2, 1, 2, 1, 2, 1, 2], [2.0, 1, 2, 1, 2, 1, 2, 1]]).T
# basis order (tanh u, tanh v, sig u, sig v)
_F_PICK = np.array([0, 3, 1, 2, 0, 3, 1, 2])
_G_PICK = np.array([3, 0, 2, 1, 3, 0, 2, 1])


def _sigmoid_mix(s: np.ndarray) -> np.ndarray:
    # (1 - e^-x) / (1 + e^-x) = tanh(x/2) and 1 / (1 + e^-x) = (1 + tanh(x/2)) / 2
    th = np.tanh(0.5 * (np.asarray(s, dtype=float) @ _MIX))
    return np.concatenate([th, 0.5 * (1.0 + th)], axis=-1)


def sigmoid_mix_f(s: np.ndarray) -> np.ndarray:
    return _sigmoid_mix(s)[..., _F_PICK]


def sigmoid_mix_g(s: np.ndarray) -> np.ndarray:
    return _sigmoid_mix(s)[..., _G_PICK]


def _parity_tanh_sign(even: tuple[float, float], odd: tuple[float, float]):
    def fn(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.empty_like(s)
        out[..., _EVEN] = even[0] * np.tanh(s[..., _EVEN]) + even[1] * sign0(s[..., _EVEN])
        out[..., _ODD] = odd[0] * np.tanh(s[..., _ODD]) + odd[1] * sign0(s[..., _ODD])
        return out

    return fn


tanh_sign_f = _parity_tanh_sign((0.5, 0.2), (0.4, -0.1))
tanh_sign_g = _parity_tanh_sign((0.35, 0.05), (0.55, -0.1))


def sigmoid_mix_activation() -> ActivationSpec:
    lam = np.kron(np.ones((2, 4)), np.array([[0.5, 0.5, 1, 0.25], [1, 0.25, 0.5, 0.5]]).T)
    dlt = np.kron(np.ones((2, 4)), np.array([[0.5, 0.5, 0.25, 1], [0.25, 1, 0.5, 0.5]]).T)
    return ActivationSpec(sigmoid_mix_f, sigmoid_mix_g, lam, dlt, name="sigmoid-mix")


def tanh_sign_activation() -> ActivationSpec:
    lam = np.kron(np.ones((8, 4)), np.array([[0.7, 0.3]]))
    dlt = np.kron(np.ones((8, 4)), np.array([[0.4, 0.45]]))
    return ActivationSpec(tanh_sign_f, tanh_sign_g, lam, dlt, name="tanh-sign")


def tanh_activation(gain: float = 1.0, delayed_gain: float | None = None) -> ActivationSpec:
    """Componentwise ``gain * tanh``; smooth, with diagonal derivative bounds."""
    dg = gain if delayed_gain is None else delayed_gain
    return ActivationSpec(
        lambda s: gain * np.tanh(s),
        lambda s: dg * np.tanh(s),
        gain * np.eye(DIM),
        dg * np.eye(DIM),
        name="tanh",
        params={"gain": gain, "delayed_gain": dg},
    )


def make_activation(kind: str, **params) -> ActivationSpec:
    """Look up a named activation family (used by experiment configs)."""
    if kind == "sigmoid-mix":
        return sigmoid_mix_activation()
    if kind == "tanh-sign":
        return tanh_sign_activation()
    if kind == "tanh":
        return tanh_activation(**params)
    raise ValueError(f"unknown activation kind {kind!r}; expected sigmoid-mix, tanh-sign or tanh")


_A = np.array(
    [
        [[-0.2, -0.3] * 4, [0.3, -0.1] * 4],
        [[0.4, -0.2] * 4, [-0.1, 0.2] * 4],
    ]
)
_B = np.array(
    [
        [[-0.11, 0.12] * 4, [0.12, 0.11] * 4],
        [[0.13, -0.14, 0.13, 0.14] * 2, [-0.13, 0.12] * 4],
    ]
)
_PROPORTIONAL = [[0.2, 0.1], [0.2, 0.1]]


@dataclass
class BuiltinExample:
    """A packaged example: networks per delay setting, weights, rates and targets."""

    name: str
    networks: dict[str, NetworkSpec]
    lam: LambdaVec
    rates: dict[str, RateFunction]
    initial_state: np.ndarray
    targets: dict[str, np.ndarray] = field(default_factory=dict)


def builtin_example1() -> BuiltinExample:
    """Two neurons, d = 30, sigmoid-mix activations; constant and proportional delays."""
    act = sigmoid_mix_activation()
    d = np.array([30.0, 30.0])
    inputs = np.array([[-3.0, 1] * 4, [2.0, 4] * 4])
    constant = DelayProfile.constant([[1.0, 2.0], [3.0, 4.0]])
    proportional = DelayProfile.proportional(_PROPORTIONAL)
    nets = {
        "constant": NetworkSpec(d, _A, _B, inputs, (act, act), constant),
        "proportional": NetworkSpec(d, _A, _B, inputs, (act, act), proportional),
    }
    rates = {
        "constant": RateFunction.exponential(0.02, constant),
        "proportional": RateFunction.power(1.0, proportional),
    }
    init = np.array([[1.0, -1, 2, -2, 0.5, -0.5, 1.5, -1.5], [-1.0, 1, -2, 2, -0.5, 0.5, -1.5, 1.5]])
    return BuiltinExample("example1", nets, LambdaVec.uniform(2, 0.2), rates, init)


def builtin_example2() -> BuiltinExample:
    """Two neurons, d = (0.1, 0.2), tanh+sign activations, proportional delays."""
    act = tanh_sign_activation()
    d = np.array([0.1, 0.2])
    inputs = np.array([[1.6, 1.5, 1.2, 0.2] * 2] * 2)
    delays = DelayProfile.proportional(_PROPORTIONAL)
    net = NetworkSpec(d, _A, _B, inputs, (act, act), delays)
    lam = LambdaVec(np.kron(np.ones(4), [0.3, 0.5, 0.5, 0.3]), 2)
    targets = {
        "zero": np.zeros((2, DIM)),
        # (1, ..., 16) read neuron by neuron
        "ramp": np.arange(1.0, 17.0).reshape(2, DIM),
    }
    init = np.array([[2.0, -1.5, 1, -0.5, 1.5, -2, 0.5, -1], [-2.0, 1.5, -1, 0.5, -1.5, 2, -0.5, 1]])
    return BuiltinExample(
        "example2",
        {"proportional": net},
        lam,
        {"proportional": RateFunction.power(1.0, delays)},
        init,
        targets,
    )


BUILTINS = {"example1": builtin_example1, "example2": builtin_example2}
