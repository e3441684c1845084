"""CSV and JSON writers for simulation results and reports."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .octonion import DIM


def state_columns(n: int) -> list[str]:
    """``w{p}_{l}`` with neurons counted from 1 and components from 0."""
    return [f"w{p + 1}_{ell}" for p in range(n) for ell in range(DIM)]


def result_table(result, rate=None, monitors: dict | None = None) -> tuple[list[str], np.ndarray]:
    """Columns ``t``, states, ``norm`` and, when available, ``mu_norm``,
    ``kappa``, ``kappa_hat``, ``P`` and ``P2``."""
    n = result.states.shape[1]
    cols = ["t", *state_columns(n), "norm"]
    parts = [result.times[:, None], result.states.reshape(len(result.times), n * DIM), result.norms[:, None]]
    if rate is not None:
        cols.append("mu_norm")
        parts.append((rate.mu(result.times) * result.norms)[:, None])
    if result.kappa is not None:
        cols += ["kappa", "kappa_hat"]
        parts += [result.kappa[:, None], result.kappa_hat[:, None]]
    for key in ("P", "P2"):
        if monitors and key in monitors:
            cols.append(key)
            parts.append(np.asarray(monitors[key].values)[:, None])
    return cols, np.hstack(parts)


def fmt(x: float) -> str:
    return f"{x:.17g}"


def write_csv(path: str | Path, columns: list[str], table: np.ndarray, note: str | None = None) -> None:
    """Write with 17 significant digits; ``note`` becomes a leading ``#`` comment line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if note:
            fh.write(f"# {note}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in table:
            writer.writerow([fmt(x) for x in row])


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], np.array(rows[1:], dtype=float)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path: str | Path, data) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, default=_jsonable, allow_nan=True)
        fh.write("\n")
