"""Sufficient-condition criteria for equilibrium uniqueness, mu-stability and control gains.

All criterion quantities are linear in the positive weight vector ``Lambda``.
Neuron and component indices are 0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .network import NetworkSpec, RateFunction, effective_input
from .octonion import DIM


@dataclass(frozen=True, eq=False)
class LambdaVec:
    """Positive weights stored component-major: ``raw[l * n + p]`` belongs to neuron ``p``.

    This is the ordering ``(xi_1..xi_n, phi_1..phi_n, ..., rho_1..rho_n)``; the
    block of neuron ``p`` collects its eight weights, one per component.
    """

    raw: np.ndarray
    n: int

    def __post_init__(self) -> None:
        raw = np.array(self.raw, dtype=float).reshape(-1)
        if raw.shape[0] != DIM * self.n:
            raise ValueError(f"Lambda must have {DIM * self.n} entries, got {raw.shape[0]}")
        if not np.all(np.isfinite(raw)) or np.any(raw <= 0):
            raise ValueError("every Lambda entry must be finite and strictly positive")
        raw.setflags(write=False)
        object.__setattr__(self, "raw", raw)

    @classmethod
    def uniform(cls, n: int, value: float) -> LambdaVec:
        return cls(np.full(DIM * n, float(value)), n)

    @classmethod
    def from_blocks(cls, blocks) -> LambdaVec:
        arr = np.asarray(blocks, dtype=float)
        return cls(arr.T.reshape(-1), arr.shape[0])

    @property
    def blocks(self) -> np.ndarray:
        """``(n, 8)`` array; row ``p`` is the block ``Lambda_p``."""
        return self.raw.reshape(DIM, self.n).T

    def scaled(self, c: float) -> LambdaVec:
        return LambdaVec(self.raw * c, self.n)


def lambda_block(lam: LambdaVec, p: int) -> np.ndarray:
    if not 0 <= p < lam.n:
        raise IndexError(f"neuron index {p} out of range")
    return lam.blocks[p].copy()


def lambda_block_masked(lam: LambdaVec, p: int, ell: int) -> np.ndarray:
    if not 0 <= ell < DIM:
        raise IndexError(f"component index {ell} out of range")
    block = lambda_block(lam, p)
    block[ell] = 0.0
    return block


def _check_indices(net: NetworkSpec, lam: LambdaVec, p: int, ell: int) -> None:
    if lam.n != net.n:
        raise ValueError(f"Lambda is for {lam.n} neurons, network has {net.n}")
    if not 0 <= p < net.n or not 0 <= ell < DIM:
        raise IndexError(f"index (p={p}, l={ell}) out of range")


def _bounds(net: NetworkSpec, q: int) -> tuple[np.ndarray, np.ndarray]:
    act = net.activations[q]
    return act.lambda_bound, act.delta_bound


def _t_ell(net: NetworkSpec, blocks: np.ndarray, p: int, ell: int) -> float:
    va = net.a_rows[p, p, ell]
    vb = net.b_rows[p, p, ell]
    ml, md = _bounds(net, p)
    own = blocks[p, ell] * (
        -net.d[p] + np.maximum(va, 0) @ ml[:, ell] + np.maximum(vb, 0) @ md[:, ell]
    )
    masked = blocks[p].copy()
    masked[ell] = 0.0
    total = own + (np.abs(va) @ ml + np.abs(vb) @ md) @ masked
    for q in range(net.n):
        if q == p:
            continue
        mlq, mdq = _bounds(net, q)
        total += (np.abs(net.a_rows[p, q, ell]) @ mlq + np.abs(net.b_rows[p, q, ell]) @ mdq) @ blocks[q]
    return float(total)


def _t_ell_simplified(net: NetworkSpec, blocks: np.ndarray, p: int, ell: int) -> float:
    total = -net.d[p] * blocks[p, ell]
    for q in range(net.n):
        mlq, mdq = _bounds(net, q)
        total += (np.abs(net.a_rows[p, q, ell]) @ mlq + np.abs(net.b_rows[p, q, ell]) @ mdq) @ blocks[q]
    return float(total)


def _tbar_ell(net: NetworkSpec, blocks: np.ndarray, p: int, ell: int, alpha: float, beta: float) -> float:
    va = net.a_rows[p, p, ell]
    ml, _ = _bounds(net, p)
    masked = blocks[p].copy()
    masked[ell] = 0.0
    total = blocks[p, ell] * (-net.d[p] + alpha + np.maximum(va, 0) @ ml[:, ell])
    total += (np.abs(va) @ ml) @ masked
    delayed = 0.0
    for q in range(net.n):
        mlq, mdq = _bounds(net, q)
        if q != p:
            total += (np.abs(net.a_rows[p, q, ell]) @ mlq) @ blocks[q]
        delayed += (np.abs(net.b_rows[p, q, ell]) @ mdq) @ blocks[q]
    return float(total + (1.0 + beta) * delayed)


def t_ell(net: NetworkSpec, lam: LambdaVec, p: int, ell: int) -> float:
    """Uniqueness criterion value with sign-aware self terms; must be < 0."""
    _check_indices(net, lam, p, ell)
    return _t_ell(net, lam.blocks, p, ell)


def t_ell_simplified(net: NetworkSpec, lam: LambdaVec, p: int, ell: int) -> float:
    """Sign-agnostic variant: ``-d_p Lambda_p[l] + sum_q (|a M| Mf + |b M| Mg) Lambda_q``."""
    _check_indices(net, lam, p, ell)
    return _t_ell_simplified(net, lam.blocks, p, ell)


def tbar_ell(net: NetworkSpec, lam: LambdaVec, p: int, ell: int, alpha: float, beta: float) -> float:
    """mu-stability criterion value for rate limits ``alpha``, ``beta``; must be < 0."""
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be nonnegative")
    _check_indices(net, lam, p, ell)
    return _tbar_ell(net, lam.blocks, p, ell, alpha, beta)


@dataclass
class CriterionReport:
    """Criterion values for every (neuron, component) pair."""

    name: str
    values: np.ndarray
    family: str = ""
    alpha: float | None = None
    beta: float | None = None

    @property
    def satisfied(self) -> bool:
        return bool(np.max(self.values) < 0)

    @property
    def worst(self) -> tuple[int, int, float]:
        p, ell = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return int(p), int(ell), float(self.values[p, ell])

    @property
    def margin(self) -> float:
        return -self.worst[2]

    def to_dict(self) -> dict:
        p, ell, val = self.worst
        out = {
            "name": self.name,
            "satisfied": self.satisfied,
            "worst": {"p": p, "l": ell, "value": val},
            "margin": self.margin,
            "values": self.values.tolist(),
        }
        if self.family:
            out["family"] = self.family
        if self.alpha is not None:
            out["alpha"] = self.alpha
            out["beta"] = self.beta
        return out


def _table(fn, n: int) -> np.ndarray:
    return np.array([[fn(p, ell) for ell in range(DIM)] for p in range(n)])


def check_unique_equilibrium(net: NetworkSpec, lam: LambdaVec, simplified: bool = False) -> CriterionReport:
    """Evaluate the uniqueness criterion (or its sign-agnostic variant) everywhere."""
    _check_indices(net, lam, 0, 0)
    blocks = lam.blocks
    if simplified:
        vals = _table(lambda p, ell: _t_ell_simplified(net, blocks, p, ell), net.n)
        return CriterionReport("unique-equilibrium-simplified", vals)
    vals = _table(lambda p, ell: _t_ell(net, blocks, p, ell), net.n)
    return CriterionReport("unique-equilibrium", vals)


def _check_rate(net: NetworkSpec, rate: RateFunction) -> None:
    delays = net.delays
    if rate.kind == "exponential":
        if delays.kind != "constant":
            raise ValueError(f"exponential rate is incompatible with {delays.kind} delays")
        expected = math.expm1(rate.alpha * delays.tau_bound(0.0))
        if not math.isclose(rate.beta, expected, rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError("rate beta does not match the network's delays")
    elif rate.kind == "power":
        if delays.kind == "proportional":
            expected = (1.0 - delays.omega) ** (-rate.param) - 1.0
        elif delays.kind == "constant":
            expected = 0.0
        else:
            raise ValueError("power rate needs constant or proportional delays")
        if not math.isclose(rate.beta, expected, rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError("rate beta does not match the network's delays")


def check_mu_stability(net: NetworkSpec, lam: LambdaVec, rate: RateFunction) -> CriterionReport:
    _check_indices(net, lam, 0, 0)
    _check_rate(net, rate)
    blocks = lam.blocks
    vals = _table(lambda p, ell: _tbar_ell(net, blocks, p, ell, rate.alpha, rate.beta), net.n)
    return CriterionReport("mu-stability", vals, family=rate.kind, alpha=rate.alpha, beta=rate.beta)


@dataclass
class GainBounds:
    """Lower bounds for the proportional and constant controller gains."""

    kappa_min: np.ndarray
    kappa_hat_min: np.ndarray
    margin: float = 0.1
    effective_input: np.ndarray | None = None
    raw_kappa: np.ndarray | None = None

    @property
    def kappa(self) -> np.ndarray:
        return self.kappa_min + self.margin

    @property
    def kappa_hat(self) -> np.ndarray:
        return self.kappa_hat_min + self.margin

    def to_dict(self) -> dict:
        out = {
            "kappa_min": self.kappa_min.tolist(),
            "kappa_hat_min": self.kappa_hat_min.tolist(),
            "margin": self.margin,
            "kappa": self.kappa.tolist(),
            "kappa_hat": self.kappa_hat.tolist(),
        }
        if self.effective_input is not None:
            out["effective_input"] = self.effective_input.tolist()
        return out


def gain_lower_bounds(
    net: NetworkSpec,
    lam: LambdaVec,
    rate: RateFunction,
    z_hat=None,
    margin: float = 0.1,
) -> GainBounds:
    """Bounds ``kappa > T-bar / Lambda_p[l]`` (clamped at 0) and
    ``kappa_hat > sum_q |b~_pq^T M^l| Mg(q) Lambda_q + |I-hat_p^l|``."""
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    report = check_mu_stability(net, lam, rate)
    blocks = lam.blocks
    raw = report.values / blocks
    z = np.zeros((net.n, DIM)) if z_hat is None else np.asarray(z_hat, dtype=float).reshape(net.n, DIM)
    i_hat = effective_input(net, z)
    delayed = np.zeros((net.n, DIM))
    for p in range(net.n):
        for ell in range(DIM):
            delayed[p, ell] = sum(
                (np.abs(net.b_rows[p, q, ell]) @ net.activations[q].delta_bound) @ blocks[q]
                for q in range(net.n)
            )
    return GainBounds(
        kappa_min=np.maximum(raw, 0.0),
        kappa_hat_min=delayed + np.abs(i_hat),
        margin=margin,
        effective_input=i_hat,
        raw_kappa=raw,
    )


@dataclass
class LambdaSearch:
    """Outcome of :func:`search_lambda`; ``lam`` is ``None`` when nothing feasible was found."""

    lam: LambdaVec | None
    iterations: int
    ratio: float
    history: list[float] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.lam is not None


def criterion_matrix(net: NetworkSpec, alpha: float, beta: float) -> np.ndarray:
    """Matrix ``K`` with ``T-bar(Lambda) = K @ Lambda.raw`` (rows in Lambda ordering)."""
    n = net.n
    size = DIM * n
    K = np.empty((size, size))
    for j in range(size):
        unit = np.zeros(size)
        unit[j] = 1.0
        blocks = unit.reshape(DIM, n).T
        for p in range(n):
            for ell in range(DIM):
                K[ell * n + p, j] = _tbar_ell(net, blocks, p, ell, alpha, beta)
    return K


def search_lambda(
    net: NetworkSpec,
    rate: RateFunction,
    budget: int = 200,
    factors: tuple[float, ...] = (0.5, 0.8, 0.95, 1.05, 1.25, 2.0),
) -> LambdaSearch:
    """Multiplicative coordinate descent on ``max_i (K Lambda)_i / Lambda_i`` from ``ones``.

    Stops as soon as the ratio is negative (all criteria hold).  A failed
    search does not prove that no feasible ``Lambda`` exists.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    K = criterion_matrix(net, rate.alpha, rate.beta)
    lam = np.ones(K.shape[0])

    def ratio(x: np.ndarray) -> float:
        return float(np.max((K @ x) / x))

    best = ratio(lam)
    history = [best]
    it = 0
    while best >= 0 and it < budget:
        it += 1
        cand_best, cand = best, None
        for j in range(lam.size):
            for fac in factors:
                trial = lam.copy()
                trial[j] *= fac
                r = ratio(trial)
                if r < cand_best:
                    cand_best, cand = r, trial
        if cand is None:
            break
        lam = cand / cand.max()
        best = cand_best
        history.append(best)
    found = LambdaVec(lam, net.n) if best < 0 else None
    return LambdaSearch(found, it, best, history)
