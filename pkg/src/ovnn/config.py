"""JSON experiment configs and their resolution into runnable objects.

A config is a JSON object with the keys ``network``, ``lambda``, ``rate``,
``controller``, ``target``, ``sim``, ``monitors`` and ``outputs``; only
``network`` is required.  Octonions are 8-element arrays in e0..e7 order and
neuron-indexed data are row-major nested arrays.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .builtins import BUILTINS, make_activation
from .control import ControllerConfig
from .criteria import GainBounds, LambdaVec, gain_lower_bounds, search_lambda
from .equilibrium import companion_fixed_point
from .network import DelayProfile, NetworkSpec, RateFunction
from .octonion import DIM
from .simulate import SimConfig

DEFAULT_DELAY_SETTING = {"example1": "constant", "example2": "proportional"}
OUTPUT_KINDS = ("csv", "svg", "report")


class ConfigError(ValueError):
    """Malformed or inconsistent experiment config."""


@dataclass
class Output:
    kind: str
    path: str
    columns: list[str] = field(default_factory=lambda: ["norm"])
    log: bool = False
    title: str = ""


@dataclass
class Experiment:
    """A fully resolved config."""

    name: str
    net: NetworkSpec
    lam: LambdaVec
    rate: RateFunction
    controller: ControllerConfig
    sim: SimConfig
    target: np.ndarray | None
    gains: GainBounds | None = None
    lambda_search: object = None
    equilibrium: object = None
    monitor_p: bool = False
    theta: float | str | None = None
    phase_tol: float = 1e-6
    outputs: list[Output] = field(default_factory=list)
    raw: dict = field(default_factory=dict)


def load_config(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _array(value, shape: tuple[int, ...], what: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what} must be numeric") from exc
    if arr.size == math.prod(shape) and arr.shape != shape:
        arr = arr.reshape(shape)
    if arr.shape != shape:
        raise ConfigError(f"{what} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{what} must be finite")
    return arr


def _delays(spec, n: int | None = None) -> DelayProfile:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("delays must be an object with a 'kind'")
    kind = spec["kind"]
    try:
        if kind == "constant":
            return DelayProfile.constant(spec["values"])
        if kind == "proportional":
            return DelayProfile.proportional(spec["ratios"])
    except KeyError as exc:
        raise ConfigError(f"delays of kind {kind!r} need {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown delay kind {kind!r}; expected constant or proportional")


def _inline_network(spec: dict) -> NetworkSpec:
    try:
        d = np.array(spec["d"], dtype=float)
    except KeyError as exc:
        raise ConfigError("inline network needs 'd'") from exc
    if d.ndim != 1:
        raise ConfigError("'d' must be a list of decay rates")
    n = d.shape[0]
    try:
        A = _array(spec["A"], (n, n, DIM), "A")
        B = _array(spec["B"], (n, n, DIM), "B")
        I = _array(spec.get("I", np.zeros((n, DIM))), (n, DIM), "I")
        acts_spec = spec.get("activation", {"kind": "tanh"})
        if isinstance(acts_spec, dict):
            kind = acts_spec.get("kind", "tanh")
            params = {k: v for k, v in acts_spec.items() if k != "kind"}
            act = make_activation(kind, **params)
            acts = (act,) * n
        else:
            acts = tuple(
                make_activation(a.get("kind", "tanh"), **{k: v for k, v in a.items() if k != "kind"})
                for a in acts_spec
            )
        return NetworkSpec(d, A, B, I, acts, _delays(spec.get("delays", {}), n))
    except KeyError as exc:
        raise ConfigError(f"inline network needs {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _rate(spec, delays: DelayProfile) -> RateFunction:
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("rate must be an object with a 'family'")
    family = spec["family"]
    try:
        if family == "exponential":
            return RateFunction.exponential(float(spec["alpha"]), delays)
        if family == "power":
            return RateFunction.power(float(spec.get("gamma", 1.0)), delays)
    except KeyError as exc:
        raise ConfigError(f"rate family {family!r} needs {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown rate family {family!r}; expected exponential or power")


def _initial_state(spec, n: int, builtin, seed: int | None) -> np.ndarray:
    if spec is None or spec == "builtin":
        if builtin is None:
            raise ConfigError("sim.initial_state is required for inline networks")
        return builtin.initial_state.copy()
    if isinstance(spec, dict) and "random" in spec:
        opts = spec["random"] or {}
        low, high = float(opts.get("low", -2.0)), float(opts.get("high", 2.0))
        rng = np.random.default_rng(seed if seed is not None else opts.get("seed", 0))
        return rng.uniform(low, high, (n, DIM))
    return _array(spec, (n, DIM), "sim.initial_state")


def resolve(
    data: dict,
    step: float | None = None,
    seed: int | None = None,
    name: str = "experiment",
    need_equilibrium: bool = True,
) -> Experiment:
    """Turn a parsed config into an :class:`Experiment`; raises :class:`ConfigError`."""
    if "network" not in data:
        raise ConfigError("config needs a 'network' entry")
    net_spec = data["network"]
    builtin = None
    if isinstance(net_spec, str):
        net_spec = {"builtin": net_spec}
    if not isinstance(net_spec, dict):
        raise ConfigError("network must be a builtin name or an object")
    if "builtin" in net_spec:
        bname = net_spec["builtin"]
        if bname not in BUILTINS:
            raise ConfigError(f"unknown builtin network {bname!r}; expected one of {sorted(BUILTINS)}")
        builtin = BUILTINS[bname]()
        setting = net_spec.get("delays", DEFAULT_DELAY_SETTING[bname])
        if setting not in builtin.networks:
            raise ConfigError(f"{bname} has delay settings {sorted(builtin.networks)}, not {setting!r}")
        net = builtin.networks[setting]
        default_rate = builtin.rates[setting]
    else:
        net = _inline_network(net_spec)
        default_rate = None
    n = net.n

    rate = _rate(data["rate"], net.delays) if "rate" in data else default_rate
    if rate is None:
        raise ConfigError("config needs a 'rate' for inline networks")

    lam_spec = data.get("lambda")
    search = None
    if lam_spec is None:
        if builtin is None:
            raise ConfigError("config needs 'lambda' for inline networks")
        lam = builtin.lam
    elif lam_spec == "search":
        search = search_lambda(net, rate)
        lam = search.lam if search.feasible else LambdaVec.uniform(n, 1.0)
    elif isinstance(lam_spec, dict) and "uniform" in lam_spec:
        lam = LambdaVec.uniform(n, float(lam_spec["uniform"]))
    else:
        try:
            vals = np.array(lam_spec, dtype=float).reshape(-1)
        except (TypeError, ValueError) as exc:
            raise ConfigError("lambda must be a numeric list, {'uniform': c} or 'search'") from exc
        if vals.size != DIM * n:
            raise ConfigError(f"lambda must have {DIM * n} entries, got {vals.size}")
        try:
            lam = LambdaVec(vals, n)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    sim_spec = dict(data.get("sim", {}))
    target_spec = data.get("target", sim_spec.pop("target", None))
    equilibrium = None
    if target_spec is None:
        target = None
    elif isinstance(target_spec, str):
        if target_spec == "equilibrium":
            target = None
            if need_equilibrium:
                rng = np.random.default_rng(0 if seed is None else seed)
                equilibrium = companion_fixed_point(net, [rng.uniform(-5, 5, (n, DIM)) for _ in range(5)], lam)
                target = equilibrium.point
        elif builtin is not None and target_spec in builtin.targets:
            target = builtin.targets[target_spec]
        elif target_spec == "zero":
            target = np.zeros((n, DIM))
        else:
            raise ConfigError(f"unknown target {target_spec!r}")
    else:
        target = _array(target_spec, (n, DIM), "target")

    ctrl_spec = data.get("controller", "none")
    if isinstance(ctrl_spec, str):
        ctrl_spec = {"variant": ctrl_spec}
    variant = ctrl_spec.get("variant", "none")
    gains = None
    try:
        if variant == "design":
            gains = gain_lower_bounds(net, lam, rate, target, margin=float(ctrl_spec.get("margin", 0.1)))
            controller = ControllerConfig.fixed(gains.kappa, gains.kappa_hat)
        elif variant == "fixed":
            controller = ControllerConfig.fixed(
                _array(ctrl_spec.get("kappa"), (n, DIM), "controller.kappa"),
                _array(ctrl_spec.get("kappa_hat"), (n, DIM), "controller.kappa_hat"),
            )
        elif variant == "adaptive":
            controller = ControllerConfig.adaptive(
                float(ctrl_spec.get("c1", 0.9)),
                float(ctrl_spec.get("c2", 0.9)),
                float(ctrl_spec.get("c3", 0.9)),
                float(ctrl_spec.get("kappa0", 0.0)),
                float(ctrl_spec.get("kappa_hat0", 0.0)),
            )
        elif variant == "none":
            controller = ControllerConfig.none()
        else:
            raise ConfigError(f"unknown controller variant {variant!r}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if gains is None and target is not None and variant != "none":
        gains = gain_lower_bounds(net, lam, rate, target)

    init = _initial_state(sim_spec.get("initial_state"), n, builtin, seed)
    try:
        sim = SimConfig(
            t_start=float(sim_spec.get("t_start", 0.0)),
            t_end=float(sim_spec.get("t_end", 10.0)),
            h=float(step if step is not None else sim_spec.get("h", 1e-3)),
            initial_history=init,
            norm_zero_tol=float(sim_spec.get("norm_zero_tol", 1e-9)),
            target=target,
            sign_treatment=sim_spec.get("sign_treatment", "implicit"),
            dead_band=float(sim_spec.get("dead_band", 0.0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    mon = data.get("monitors", {})
    theta = None
    if mon.get("P2"):
        p2 = mon["P2"]
        theta = p2.get("theta", "auto") if isinstance(p2, dict) else "auto"
        if theta != "auto" and not float(theta) > 0:
            raise ConfigError("monitors.P2.theta must be positive or 'auto'")

    outputs = []
    for item in data.get("outputs", []):
        if not isinstance(item, dict) or item.get("kind") not in OUTPUT_KINDS or "path" not in item:
            raise ConfigError(f"each output needs kind in {OUTPUT_KINDS} and a path")
        outputs.append(
            Output(
                item["kind"],
                item["path"],
                list(item.get("columns", ["norm"])),
                bool(item.get("log", False)),
                str(item.get("title", "")),
            )
        )

    return Experiment(
        name=data.get("name", name),
        net=net,
        lam=lam,
        rate=rate,
        controller=controller,
        sim=sim,
        target=target,
        gains=gains,
        lambda_search=search,
        equilibrium=equilibrium,
        monitor_p=bool(mon.get("P", False)),
        theta=theta,
        phase_tol=float(mon.get("phase_tol", 1e-6)),
        outputs=outputs,
        raw=data,
    )
