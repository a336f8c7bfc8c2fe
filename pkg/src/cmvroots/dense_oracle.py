"""Unstructured reference: dense explicit shifted QR and eigenvector conditioning.

The shift and deflation policy mirrors :mod:`cmvroots.structqr` so that the
two solvers can be compared sweep by sweep.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

EPS = float(np.finfo(float).eps)
STAGNATION_SWEEPS = 10


def dense_qr(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR factorization with a real nonnegative diagonal in ``R``."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("dense_qr expects a square matrix")
    q, r = np.linalg.qr(a)
    d = np.diagonal(r).copy()
    # lift subnormal entries (exact power-of-two scaling) so d/|d| stays unimodular
    d = np.where(np.abs(d) < 1e-280, d * 2.0**600, d)
    mag = np.abs(d)
    phase = np.ones_like(d)
    nz = mag > 0
    phase[nz] = d[nz] / mag[nz]
    return q * phase, r * phase.conj()[:, None]


def dense_qr_step(a: np.ndarray, shift: complex) -> np.ndarray:
    """One explicit shifted QR step ``Q^H a Q`` with ``a - shift I = Q R``."""
    a = np.asarray(a, dtype=complex)
    q, _ = dense_qr(a - shift * np.eye(a.shape[0]))
    return q.conj().T @ a @ q


def eig2x2(a: complex, b: complex, c: complex, d: complex) -> tuple[complex, complex]:
    """Eigenvalues of ``[[a, b], [c, d]]``; the larger root is formed first."""
    half_tr = 0.5 * (a + d)
    det = a * d - b * c
    disc = cmath.sqrt(0.25 * (a - d) ** 2 + b * c)
    if (half_tr.conjugate() * disc).real < 0:
        disc = -disc
    big = half_tr + disc
    if big == 0:
        return 0j, 0j
    return big, det / big


def closest_eig2x2(a: complex, b: complex, c: complex, d: complex) -> complex:
    """Wilkinson shift: eigenvalue of the 2x2 block nearest ``d``."""
    l1, l2 = eig2x2(a, b, c, d)
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def exceptional_shift(a: complex, b: complex, c: complex, d: complex, rng: np.random.Generator) -> complex:
    mag = math.sqrt(abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2)
    return mag * cmath.exp(2j * math.pi * rng.random())


def negligible(values, diag_a: complex, diag_b: complex, tol: float, fallback: float) -> bool:
    scale = abs(diag_a) + abs(diag_b)
    if scale == 0.0:
        scale = fallback
    bound = tol * EPS * scale
    return all(abs(v) <= bound for v in values)


@dataclass
class DenseRun:
    roots: np.ndarray
    sweeps: int
    converged: bool
    flags: list = field(default_factory=list)


def dense_eigenvalues(
    a: np.ndarray,
    max_sweeps: int | None = None,
    tol: float = 1.0,
    seed: int = 0,
) -> DenseRun:
    """Explicit shifted QR with Wilkinson shifts and bottom/top deflation."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if n == 0:
        return DenseRun(np.zeros(0, dtype=complex), 0, True)
    if max_sweeps is None:
        max_sweeps = 30 * n
    rng = np.random.default_rng(seed)
    found: list[complex] = []
    lo, hi = 0, n
    sweeps = 0
    idle = 0
    while hi - lo > 0:
        progressed = True
        deflated = False
        while progressed and hi - lo > 0:
            progressed = False
            fb = float(np.abs(a[lo:hi, lo:hi]).sum(axis=1).max())
            m = hi - lo
            if m == 1:
                found.append(a[lo, lo])
                hi = lo
                break
            if m == 2:
                found.extend(eig2x2(a[lo, lo], a[lo, lo + 1], a[lo + 1, lo], a[hi - 1, hi - 1]))
                hi = lo
                break
            if negligible(a[hi - 1, lo : hi - 1], a[hi - 2, hi - 2], a[hi - 1, hi - 1], tol, fb):
                a[hi - 1, lo : hi - 1] = 0
                found.append(a[hi - 1, hi - 1])
                hi -= 1
                progressed = deflated = True
                continue
            if negligible(a[hi - 2 : hi, lo : hi - 2].ravel(), a[hi - 3, hi - 3], a[hi - 2, hi - 2], tol, fb):
                a[hi - 2 : hi, lo : hi - 2] = 0
                found.extend(eig2x2(a[hi - 2, hi - 2], a[hi - 2, hi - 1], a[hi - 1, hi - 2], a[hi - 1, hi - 1]))
                hi -= 2
                progressed = deflated = True
                continue
            if m > 3 and negligible(a[lo + 2 : hi, lo : lo + 2].ravel(), a[lo + 1, lo + 1], a[lo + 2, lo + 2], tol, fb):
                a[lo + 2 : hi, lo : lo + 2] = 0
                found.extend(eig2x2(a[lo, lo], a[lo, lo + 1], a[lo + 1, lo], a[lo + 1, lo + 1]))
                lo += 2
                progressed = deflated = True
        if deflated:
            idle = 0
        if hi - lo == 0:
            break
        if sweeps >= max_sweeps:
            rest = np.linalg.eigvals(a[lo:hi, lo:hi])
            found.extend(rest)
            return DenseRun(np.array(found), sweeps, False, ["max_sweeps reached"])
        blk = (a[hi - 2, hi - 2], a[hi - 2, hi - 1], a[hi - 1, hi - 2], a[hi - 1, hi - 1])
        if idle >= STAGNATION_SWEEPS:
            shift = exceptional_shift(*blk, rng)
            idle = 0
        else:
            shift = closest_eig2x2(*blk)
        a[lo:hi, lo:hi] = dense_qr_step(a[lo:hi, lo:hi], shift)
        sweeps += 1
        idle += 1
    return DenseRun(np.array(found, dtype=complex), sweeps, True)


def vandermonde_condition(roots) -> float:
    """``kappa_inf`` of the eigenvector matrix of the companion matrix.

    Column ``k`` is ``(l_k^(n-1), ..., l_k, 1)`` scaled to unit 2-norm; roots
    outside the unit disk are expanded in ``1/l_k`` so nothing overflows.
    """
    lam = np.asarray(roots, dtype=complex).ravel()
    n = lam.size
    if n == 0:
        raise ValueError("need at least one root")
    with np.errstate(all="ignore"):
        expo = np.arange(n - 1, -1, -1)[:, None]
        big = np.abs(lam) > 1.0
        base = np.where(big, 1.0 / np.where(big, lam, 1.0), lam)
        v = np.where(big[None, :], base[None, :] ** (n - 1 - expo), base[None, :] ** expo)
        v = v / np.linalg.norm(v, axis=0)
        if not np.all(np.isfinite(v)):
            return math.inf
        try:
            vinv = np.linalg.inv(v)
        except np.linalg.LinAlgError:
            return math.inf
        if not np.all(np.isfinite(vinv)):
            return math.inf
        return float(np.abs(v).sum(axis=1).max() * np.abs(vinv).sum(axis=1).max())
