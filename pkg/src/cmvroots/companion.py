"""Companion matrix, CMV permutation and the initial structured state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import Polynomial, PolynomialError
from .state import StructuredState, band_from_dense

MIN_STRUCTURED_DEGREE = 4


@dataclass(frozen=True)
class PermutationMap:
    """``pi[j-1] = pi(j)`` with 1-based values; ``P e_j = e_pi(j)``."""

    pi: tuple
    inverse: tuple

    @property
    def n(self) -> int:
        return len(self.pi)

    def zero_based(self) -> np.ndarray:
        return np.array(self.pi) - 1

    def matrix(self) -> np.ndarray:
        n = self.n
        p = np.zeros((n, n))
        p[self.zero_based(), np.arange(n)] = 1.0
        return p


def build_permutation(n: int) -> PermutationMap:
    if n < 2:
        raise ValueError("permutation needs n >= 2")
    pi = [0] * n
    for j in range(1, n + 1):
        if j == 1:
            pi[0] = 1
        elif j % 2 == 0:
            pi[j - 1] = j // 2 + 1
        else:
            pi[j - 1] = n - (j - 1) // 2 + 1
    inv = [0] * n
    for j, v in enumerate(pi, start=1):
        inv[v - 1] = j
    return PermutationMap(tuple(pi), tuple(inv))


def companion_dense(p: Polynomial) -> np.ndarray:
    """Upper Hessenberg companion matrix with first row ``-p_{n-1}/p_n .. -p_0/p_n``."""
    n = p.degree
    if n < 1:
        raise PolynomialError("companion matrix needs degree >= 1")
    c = p.as_array()
    if c[-1] == 0:
        raise PolynomialError("leading coefficient is zero")
    a = np.zeros((n, n), dtype=complex)
    a[0, :] = -c[-2::-1] / c[-1]
    a[np.arange(1, n), np.arange(n - 1)] = 1.0
    return a


def cyclic_shift(n: int) -> np.ndarray:
    """The unitary ``U`` of the split ``C = U - e_1 p^H``."""
    u = np.zeros((n, n))
    u[np.arange(1, n), np.arange(n - 1)] = 1.0
    u[0, n - 1] = 1.0
    return u


@dataclass(frozen=True)
class CompanionSetup:
    """Permuted companion ``P^T C P = Uhat - e_1 phat^H``.

    ``col_of_row[i]`` is the column of the single 1 in row ``i`` of ``Uhat``
    (0-based); ``uhat_support`` lists the same positions 1-based.
    """

    p: Polynomial
    perm: PermutationMap
    phat: np.ndarray
    col_of_row: np.ndarray
    row_of_col: np.ndarray

    @property
    def n(self) -> int:
        return self.p.degree

    @property
    def uhat_support(self) -> list:
        return sorted((i + 1, int(j) + 1) for i, j in enumerate(self.col_of_row))

    def uhat_dense(self) -> np.ndarray:
        n = self.n
        u = np.zeros((n, n))
        u[np.arange(n), self.col_of_row] = 1.0
        return u

    def apply_uhat(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v)[self.col_of_row]

    def apply_uhat_h(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v)[self.row_of_col]

    def permuted_dense(self) -> np.ndarray:
        a = self.uhat_dense().astype(complex)
        a[0, :] -= self.phat.conj()
        return a


def companion_setup(p: Polynomial) -> CompanionSetup:
    n = p.degree
    perm = build_permutation(n)
    pz = perm.zero_based()
    # U e_k = e_{k+1} (cyclically); Uhat(a, b) = U(pi(a), pi(b))
    inv0 = np.array(perm.inverse) - 1
    col_of_row = np.empty(n, dtype=np.intp)
    for a in range(n):
        src = (pz[a] - 1) % n  # U(r, c) = 1 iff r = c + 1 mod n
        col_of_row[a] = inv0[src]
    row_of_col = np.empty(n, dtype=np.intp)
    row_of_col[col_of_row] = np.arange(n)

    c = p.as_array()
    row = c[-2::-1] / c[-1]
    row[-1] += 1.0
    phat = row[pz].conj()
    return CompanionSetup(p, perm, phat, col_of_row, row_of_col)


def initial_state(p: Polynomial) -> StructuredState:
    """Structured representation of ``A_0 = P^T C P`` (``z = e_1``, ``w = phat``)."""
    n = p.degree
    if n < MIN_STRUCTURED_DEGREE:
        raise PolynomialError(f"structured solver needs degree >= {MIN_STRUCTURED_DEGREE}")
    c = p.as_array()
    if c[0] == 0:
        raise PolynomialError("p(0) = 0: strip zero roots before building the state")
    setup = companion_setup(p)
    z = np.zeros(n, dtype=complex)
    z[0] = 1.0
    w = setup.phat.astype(complex)
    f = setup.apply_uhat(w).astype(complex)
    g = setup.apply_uhat_h(z).astype(complex)
    sigma = complex(-np.conj(c[0]) / np.conj(c[-1]))
    band = _initial_band(setup)
    return StructuredState(n, band, z, w, f, g, sigma)


def _initial_band(setup: CompanionSetup) -> np.ndarray:
    # O(n): only Uhat's n ones and the first row are nonzero
    from .state import BAND_LOW, BAND_WIDTH, in_profile

    n = setup.n
    band = np.zeros((n, BAND_WIDTH), dtype=complex)
    for i, j in enumerate(setup.col_of_row):
        if in_profile(i, int(j), n):
            band[i, j - i - BAND_LOW] += 1.0
    for j in range(n):
        if in_profile(0, j, n):
            band[0, j - BAND_LOW] -= np.conj(setup.phat[j])
    return band


def sigma_from_generators(state: StructuredState) -> complex:
    """``1 - g^H w``; equals ``state.sigma`` for an exact representation."""
    return complex(1.0 - np.vdot(state.g, state.w))


__all__ = [
    "PermutationMap",
    "CompanionSetup",
    "build_permutation",
    "companion_dense",
    "companion_setup",
    "cyclic_shift",
    "initial_state",
    "band_from_dense",
    "sigma_from_generators",
]
