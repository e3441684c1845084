"""State-feedback controllers: fixed gains and the adaptive gain laws."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .octonion import DIM

BRANCH_OUTER = "outer"
BRANCH_INNER = "inner"
BRANCH_ZERO = "zero"


def sign_band(x: np.ndarray, dead_band: float = 0.0) -> np.ndarray:
    """``sign`` with ``sign(0) = 0``; entries with ``|x| <= dead_band`` also map to 0."""
    s = np.sign(x)
    if dead_band > 0:
        s = np.where(np.abs(x) <= dead_band, 0.0, s)
    return s


def fixed_controller(kappa, kappa_hat, w_hat, dead_band: float = 0.0) -> np.ndarray:
    """``U = -sign(w_hat) * (kappa |w_hat| + kappa_hat)`` componentwise."""
    w = np.asarray(w_hat, dtype=float)
    k = np.asarray(kappa, dtype=float)
    kh = np.asarray(kappa_hat, dtype=float)
    if np.any(k <= 0) or np.any(kh <= 0):
        raise ValueError("controller gains must be positive")
    return -sign_band(w, dead_band) * (k * np.abs(w) + kh)


def adaptive_branch(sup_norm: float, zero_tol: float) -> str:
    """Branch of the adaptive laws; the zero branch wins over ``sup <= 1``."""
    if zero_tol <= 0:
        raise ValueError("zero_tol must be positive")
    if sup_norm <= zero_tol:
        return BRANCH_ZERO
    if sup_norm <= 1.0:
        return BRANCH_INNER
    return BRANCH_OUTER


def adaptive_rates(branch: str, cur_norm: float, mu_t: float, c1: float, c2: float, c3: float) -> tuple[float, float]:
    if branch == BRANCH_OUTER:
        return c2 * mu_t * cur_norm, 0.0
    if branch == BRANCH_INNER:
        return c3 * cur_norm, c1
    return 0.0, 0.0


def adaptive_update(
    kappa: float,
    kappa_hat: float,
    sup_norm: float,
    cur_norm: float,
    mu_t: float,
    c1: float,
    c2: float,
    c3: float,
    zero_tol: float = 1e-9,
) -> tuple[float, float]:
    """Return ``(kappa_dot, kappa_hat_dot)``.

    The current gains do not enter the laws; they are accepted so that the
    call mirrors the state the integrator carries.
    """
    values = (kappa, kappa_hat, sup_norm, cur_norm, mu_t, c1, c2, c3)
    if not all(np.isfinite(v) for v in values):
        raise ValueError("adaptive_update inputs must be finite")
    return adaptive_rates(adaptive_branch(sup_norm, zero_tol), cur_norm, mu_t, c1, c2, c3)


@dataclass(frozen=True, eq=False)
class ControllerConfig:
    """``variant`` is ``"none"``, ``"fixed"`` or ``"adaptive"``."""

    variant: str = "none"
    kappa: np.ndarray | None = None
    kappa_hat: np.ndarray | None = None
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    kappa0: float = 0.0
    kappa_hat0: float = 0.0

    def __post_init__(self) -> None:
        if self.variant == "fixed":
            for attr in ("kappa", "kappa_hat"):
                val = getattr(self, attr)
                if val is None:
                    raise ValueError(f"fixed controller needs {attr}")
                arr = np.array(val, dtype=float)
                if arr.ndim != 2 or arr.shape[1] != DIM:
                    raise ValueError(f"{attr} must have shape (n, 8), got {arr.shape}")
                if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                    raise ValueError(f"{attr} entries must be finite and strictly positive")
                arr.setflags(write=False)
                object.__setattr__(self, attr, arr)
        elif self.variant == "adaptive":
            if min(self.c1, self.c2, self.c3) <= 0:
                raise ValueError("adaptive rates c1, c2, c3 must be strictly positive")
            if not (np.isfinite(self.kappa0) and np.isfinite(self.kappa_hat0)):
                raise ValueError("initial adaptive gains must be finite")
        elif self.variant != "none":
            raise ValueError(f"unknown controller variant {self.variant!r}")

    @classmethod
    def none(cls) -> ControllerConfig:
        return cls("none")

    @classmethod
    def fixed(cls, kappa, kappa_hat) -> ControllerConfig:
        return cls("fixed", kappa=kappa, kappa_hat=kappa_hat)

    @classmethod
    def adaptive(cls, c1: float, c2: float, c3: float, kappa0: float = 0.0, kappa_hat0: float = 0.0) -> ControllerConfig:
        return cls("adaptive", c1=c1, c2=c2, c3=c3, kappa0=kappa0, kappa_hat0=kappa_hat0)

    def to_dict(self) -> dict:
        if self.variant == "fixed":
            return {"variant": "fixed", "kappa": self.kappa.tolist(), "kappa_hat": self.kappa_hat.tolist()}
        if self.variant == "adaptive":
            return {
                "variant": "adaptive",
                "c1": self.c1,
                "c2": self.c2,
                "c3": self.c3,
                "kappa0": self.kappa0,
                "kappa_hat0": self.kappa_hat0,
            }
        return {"variant": "none"}
