"""O(n) representation of a structured QR iterate.

An iterate ``A`` is held as a banded part plus four generator vectors.  With
0-based indices, row ``i`` of the band covers columns ``lower(i)..upper(i)``;
entries right of ``upper(i)`` are recovered as

    a[i, j] = -f[i] * conj(g[j]) / sigma - z[i] * conj(w[j])

and entries left of ``lower(i)`` are zero.  Band storage is an ``n x 6``
array with ``band[i, j - i + 2]`` holding ``a[i, j]`` for offsets -2..3;
slots outside the profile are kept at exact zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BAND_LOW = -2
BAND_HIGH = 3
BAND_WIDTH = BAND_HIGH - BAND_LOW + 1


def formula_rows(n: int) -> int:
    """Number of leading rows whose far-right entries come from the generators."""
    return max(0, 2 * ((n + 1) // 2) - 4)


def lower_col(i: int) -> int:
    """First column of the lower staircase profile in row ``i``."""
    return max(0, i - 1 if i % 2 == 0 else i - 2)


def upper_col(i: int, n: int) -> int:
    """Last band column of row ``i`` (inclusive)."""
    if i < formula_rows(n):
        return 2 * ((i + 2) // 2) + 1
    return n - 1


def in_profile(i: int, j: int, n: int) -> bool:
    return lower_col(i) <= j <= upper_col(i, n)


def staircase_profile(n: int) -> np.ndarray:
    """``m_j`` bound of the lower profile (0-based last row per column)."""
    j = np.arange(n)
    return np.minimum(n - 1, np.where(j % 2 == 0, j + 1, j + 2))


@dataclass
class StructuredState:
    """Band + generators for one iterate; ``[pst, n - qst)`` is the active window."""

    n: int
    band: np.ndarray
    z: np.ndarray
    w: np.ndarray
    f: np.ndarray
    g: np.ndarray
    sigma: complex
    pst: int = 0
    qst: int = 0
    sweeps: int = 0
    fill_log: list = field(default_factory=list)

    @property
    def lo(self) -> int:
        return self.pst

    @property
    def hi(self) -> int:
        return self.n - self.qst

    @property
    def window(self) -> int:
        return self.n - self.pst - self.qst

    def copy(self) -> "StructuredState":
        return StructuredState(
            self.n,
            self.band.copy(),
            self.z.copy(),
            self.w.copy(),
            self.f.copy(),
            self.g.copy(),
            self.sigma,
            self.pst,
            self.qst,
            self.sweeps,
            list(self.fill_log),
        )

    def band_norm_inf(self) -> float:
        return float(np.abs(self.band).sum(axis=1).max())

    def to_dense(self) -> np.ndarray:
        """Full matrix reconstructed from the representation (O(n^2))."""
        n = self.n
        a = -np.outer(self.f, self.g.conj()) / self.sigma - np.outer(self.z, self.w.conj())
        for i in range(n):
            a[i, : lower_col(i)] = 0.0
            lc, uc = lower_col(i), upper_col(i, n)
            for j in range(lc, uc + 1):
                a[i, j] = self.band[i, j - i - BAND_LOW]
        return a

    def unitary_part(self) -> np.ndarray:
        """``U_s = A_s + z w^H`` formed densely."""
        return self.to_dense() + np.outer(self.z, self.w.conj())


def reconstruct_entry(state: StructuredState, i: int, j: int) -> complex:
    """Entry ``a[i, j]`` (0-based) of the iterate inside the active window.

    Entries outside the window are stale after deflation, so they are refused;
    :meth:`StructuredState.to_dense` rebuilds the whole matrix when needed.
    """
    n = state.n
    if not (state.lo <= i < state.hi and state.lo <= j < state.hi):
        raise IndexError(f"entry ({i}, {j}) outside the active window [{state.lo}, {state.hi})")
    if j < lower_col(i):
        return 0j
    if j <= upper_col(i, n):
        return complex(state.band[i, j - i - BAND_LOW])
    return complex(
        -state.f[i] * np.conj(state.g[j]) / state.sigma - state.z[i] * np.conj(state.w[j])
    )


def band_from_dense(a: np.ndarray) -> np.ndarray:
    """Restrict a dense matrix to the band profile."""
    n = a.shape[0]
    band = np.zeros((n, BAND_WIDTH), dtype=complex)
    for i in range(n):
        for j in range(lower_col(i), upper_col(i, n) + 1):
            band[i, j - i - BAND_LOW] = a[i, j]
    return band
