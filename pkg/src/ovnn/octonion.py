"""Octonion arithmetic in table form and in multiplication-matrix form.

Components are stored in basis order (e0, ..., e7).  The product of two
octonions can be computed either from the basis multiplication table or
from the eight signed permutation matrices ``M^l`` via
``(ab)^l = a^T M^l b``.  Both paths sum with ``math.fsum`` so they agree
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DIM = 8

# Row i, column j holds (sign, k) with e_i * e_j = sign * e_k.
_TABLE_TEXT = """
 +0 +1 +2 +3 +4 +5 +6 +7
 +1 -0 +3 -2 +5 -4 -7 +6
 +2 -3 -0 +1 +6 +7 -4 -5
 +3 +2 -1 -0 +7 -6 +5 -4
 +4 -5 -6 -7 -0 +1 +2 +3
 +5 +4 -7 +6 -1 -0 -3 +2
 +6 +7 +4 -5 -2 +3 -0 -1
 +7 -6 +5 +4 -3 -2 +1 -0
"""


def _parse_table(text: str) -> tuple[tuple[tuple[int, int], ...], ...]:
    rows = []
    for line in text.strip().splitlines():
        row = []
        for tok in line.split():
            row.append((1 if tok[0] == "+" else -1, int(tok[1:])))
        rows.append(tuple(row))
    return tuple(rows)


MUL_TABLE = _parse_table(_TABLE_TEXT)

# Nonzero entries of M^1..M^7 as (row, col) pairs, 1-based as usually printed;
# converted to 0-based indices in _build_matrices.  M^5(4,7) is +1: the table
# gives e3*e6 = +e5, and a -1 there would make e3 and e6 commute.
_MATRIX_ENTRIES: dict[int, tuple[list[tuple[int, int]], list[tuple[int, int]]]] = {
    1: ([(1, 2), (2, 1), (3, 4), (5, 6), (8, 7)], [(4, 3), (6, 5), (7, 8)]),
    2: ([(1, 3), (3, 1), (4, 2), (5, 7), (6, 8)], [(2, 4), (7, 5), (8, 6)]),
    3: ([(1, 4), (2, 3), (4, 1), (5, 8), (7, 6)], [(3, 2), (6, 7), (8, 5)]),
    4: ([(1, 5), (5, 1), (6, 2), (7, 3), (8, 4)], [(2, 6), (3, 7), (4, 8)]),
    5: ([(1, 6), (2, 5), (4, 7), (6, 1), (8, 3)], [(3, 8), (5, 2), (7, 4)]),
    6: ([(1, 7), (2, 8), (3, 5), (6, 4), (7, 1)], [(4, 6), (5, 3), (8, 2)]),
    7: ([(1, 8), (3, 6), (4, 5), (7, 2), (8, 1)], [(2, 7), (5, 4), (6, 3)]),
}


def _build_matrices() -> np.ndarray:
    mats = np.zeros((DIM, DIM, DIM))
    mats[0] = np.diag([1.0, -1, -1, -1, -1, -1, -1, -1])
    for ell, (plus, minus) in _MATRIX_ENTRIES.items():
        for i, j in plus:
            mats[ell, i - 1, j - 1] = 1.0
        for i, j in minus:
            mats[ell, i - 1, j - 1] = -1.0
    mats.setflags(write=False)
    return mats


MUL_MATRICES = _build_matrices()


@dataclass(frozen=True)
class Octonion:
    """An octonion ``sum_l c[l] e_l`` with immutable real coefficients."""

    c: tuple[float, ...]

    def __post_init__(self) -> None:
        comps = tuple(float(x) for x in self.c)
        if len(comps) != DIM:
            raise ValueError(f"an octonion has {DIM} components, got {len(comps)}")
        if not all(math.isfinite(x) for x in comps):
            raise ValueError("octonion components must be finite")
        object.__setattr__(self, "c", comps)

    @classmethod
    def basis(cls, ell: int) -> Octonion:
        if not 0 <= ell < DIM:
            raise IndexError(f"basis index {ell} out of range 0..7")
        comps = [0.0] * DIM
        comps[ell] = 1.0
        return cls(tuple(comps))

    @classmethod
    def zero(cls) -> Octonion:
        return cls((0.0,) * DIM)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> Octonion:
        return cls(tuple(values))

    def to_array(self) -> np.ndarray:
        return np.array(self.c)

    def __getitem__(self, ell: int) -> float:
        return self.c[ell]

    def __add__(self, other: Octonion) -> Octonion:
        return oct_add(self, other)

    def __sub__(self, other: Octonion) -> Octonion:
        return oct_add(self, oct_scale(-1.0, other))

    def __neg__(self) -> Octonion:
        return oct_scale(-1.0, self)

    def __mul__(self, other: Octonion | float) -> Octonion:
        if isinstance(other, Octonion):
            return oct_mul(self, other)
        return oct_scale(float(other), self)

    def __rmul__(self, other: float) -> Octonion:
        return oct_scale(float(other), self)

    def __abs__(self) -> float:
        return oct_norm(self)


def oct_add(a: Octonion, b: Octonion) -> Octonion:
    return Octonion(tuple(x + y for x, y in zip(a.c, b.c)))


def oct_scale(m: float, a: Octonion) -> Octonion:
    if not math.isfinite(m):
        raise ValueError("scale factor must be finite")
    return Octonion(tuple(m * x for x in a.c))


def mul_matrix(ell: int) -> np.ndarray:
    """Return the signed permutation matrix ``M^ell`` (read-only)."""
    if not 0 <= ell < DIM:
        raise IndexError(f"basis index {ell} out of range 0..7")
    return MUL_MATRICES[ell]


def oct_mul(a: Octonion, b: Octonion) -> Octonion:
    """Product from the basis table, extended bilinearly."""
    terms: list[list[float]] = [[] for _ in range(DIM)]
    for i in range(DIM):
        ai = a.c[i]
        for j in range(DIM):
            sign, k = MUL_TABLE[i][j]
            terms[k].append(ai * (sign * b.c[j]))
    return Octonion(tuple(math.fsum(t) for t in terms))


def oct_mul_matrix_form(a: Octonion, b: Octonion) -> Octonion:
    """Product via ``(ab)^l = a^T M^l b``."""
    out = []
    for ell in range(DIM):
        m = MUL_MATRICES[ell]
        out.append(
            math.fsum(
                a.c[i] * (m[i, j] * b.c[j])
                for i in range(DIM)
                for j in range(DIM)
                if m[i, j] != 0.0
            )
        )
    return Octonion(tuple(out))


def oct_norm(a: Octonion) -> float:
    return math.sqrt(math.fsum(x * x for x in a.c))


def left_rows(a: Sequence[float] | np.ndarray, matrices: np.ndarray | None = None) -> np.ndarray:
    """Matrix whose row ``l`` is ``a^T M^l``, so that ``(ab)~ = left_rows(a) @ b~``.

    Accepts any leading batch shape: ``(..., 8) -> (..., 8, 8)``.
    """
    mats = MUL_MATRICES if matrices is None else matrices
    arr = np.asarray(a, dtype=float)
    return np.einsum("...i,lij->...lj", arr, mats)


def pos_part(v) -> np.ndarray:
    return np.maximum(np.asarray(v, dtype=float), 0.0)


def abs_vec(v) -> np.ndarray:
    return np.abs(np.asarray(v, dtype=float))


def oct_mul_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized matrix-form product of coefficient arrays of shape ``(..., 8)``."""
    return np.einsum("...i,lij,...j->...l", a, MUL_MATRICES, b)


def _printed_matrices() -> np.ndarray:
    mats = MUL_MATRICES.copy()
    mats[5, 3, 6] = -1.0
    mats.setflags(write=False)
    return mats


# The entry list as commonly printed, with M^5(4,7) = -1.  Not a valid
# octonion product; kept only to reproduce numbers computed from that list.
PRINTED_MUL_MATRICES = _printed_matrices()
