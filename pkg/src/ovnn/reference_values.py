"""Published numbers for the two built-in examples, used for discrepancy reports.

Neuron and component indices are 0-based: row ``p`` holds components 0..7.
"""

from __future__ import annotations

import numpy as np

# example 1, constant delays, exponential rate alpha = 0.02
EX1_TBAR_CONSTANT = np.array(
    [
        [-0.8621, -1.2121, -0.9871, -1.2221, -0.9671, -1.2421, -0.9521, -1.2421],
        [-0.6781, -0.9281, -0.6881, -0.9331, -0.6781, -0.8731, -0.6881, -0.9081],
    ]
)

# example 1, proportional delays, power rate gamma = 1 (printed to 2-3 decimals)
EX1_TBAR_PROPORTIONAL = np.array(
    [
        [-0.59, -0.94, -0.715, -0.95, -0.695, -0.97, -0.68, -0.97],
        [-0.37, -0.62, -0.38, -0.625, -0.37, -0.565, -0.38, -0.6],
    ]
)

# example 2, target 0: lower bounds for kappa and kappa-hat
EX2_KAPPA_MIN = np.array(
    [
        [29.1733, 17.1880, 28.4733, 17.1880, 28.4733, 17.2180, 28.4733, 17.1880],
        [17.3820, 29.9433, 17.5220, 29.9433, 17.5220, 30.0633, 17.5220, 29.9433],
    ]
)
EX2_KAPPA_HAT_MIN = np.array(
    [
        [4.0656, 3.9656, 3.6656, 2.6656, 4.0656, 3.9656, 3.6656, 2.6656],
        [4.4704, 4.3704, 4.0704, 3.0704, 4.4704, 4.3704, 4.0704, 3.0704],
    ]
)

# gains used in the published controllers (bounds + 0.1)
EX2_KAPPA_USED = np.array(
    [
        [29.2733, 17.2880, 28.5733, 17.2880, 28.5733, 17.3180, 28.5733, 17.2880],
        [17.4820, 30.0433, 17.6220, 30.0433, 18.6220, 30.1633, 17.6220, 30.0433],
    ]
)
EX2_KAPPA_HAT_USED_ZERO = EX2_KAPPA_HAT_MIN + 0.1
EX2_KAPPA_HAT_USED_RAMP = np.array(
    [
        [6.4788, 5.2113, 5.0113, 4.1113, 5.6113, 8.6244, 5.4113, 4.5113],
        [3.5750, 8.7339, 8.6339, 7.8339, 9.4339, 6.7698, 7.5889, 10.4789],
    ]
)


def compare(name: str, computed, printed, atol: float | None = None, rtol: float | None = None) -> dict:
    """Entrywise comparison with a flag per entry that misses the tolerance."""
    comp = np.asarray(computed, dtype=float)
    ref = np.asarray(printed, dtype=float)
    diff = comp - ref
    limit = np.zeros_like(ref)
    if atol is not None:
        limit = limit + atol
    if rtol is not None:
        limit = limit + rtol * np.abs(ref)
    flags = np.abs(diff) > limit
    entries = [
        {
            "p": int(p),
            "l": int(ell),
            "computed": float(comp[p, ell]),
            "printed": float(ref[p, ell]),
            "diff": float(diff[p, ell]),
            "flag": bool(flags[p, ell]),
        }
        for p in range(ref.shape[0])
        for ell in range(ref.shape[1])
    ]
    return {
        "name": name,
        "atol": atol,
        "rtol": rtol,
        "max_abs_diff": float(np.max(np.abs(diff))),
        "max_rel_diff": float(np.max(np.abs(diff) / np.abs(ref))),
        "flagged": int(flags.sum()),
        "entries": entries,
    }
